#!/usr/bin/env python3
"""Run the operad axiom checker across core dimensions and orders."""

import argparse

from microsympl.micro import MicroObject
from microsympl.operad import check_operad_axioms


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--samples", type=int, default=20)
    parser.add_argument("--dims", type=int, nargs="*", default=[1, 2])
    parser.add_argument("--orders", type=int, nargs="*", default=[2, 3])
    args = parser.parse_args()

    failures = 0
    for dim in args.dims:
        for order in args.orders:
            report = check_operad_axioms(MicroObject(dim), args.seed,
                                         max_arity=3, levels=2,
                                         samples=args.samples, order=order)
            status = "ok" if report.passed else "FAIL"
            print(f"dim={dim} order={order}: {report.checked} checks, "
                  f"{report.failed} failed [{status}]")
            failures += report.failed
    if failures:
        raise SystemExit(1)


if __name__ == "__main__":
    main()
