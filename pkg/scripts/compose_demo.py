#!/usr/bin/env python3
"""Worked micromorphism computations, printed as serialized records."""

from fractions import Fraction as F

from microsympl.jetalg import FiberGradedPoly
from microsympl.micro import (CoreMap, Micromorphism, MicroObject, compose,
                              cotangent_lift, extract_germ, graph_of_germ,
                              identity, symmetry, tensor)
from microsympl.textio import format_germ, format_morphism


def show(title, text):
    print(f"--- {title}")
    print(text, end="")
    print()


def main():
    one = MicroObject(1)

    a, b = F(2, 3), F(1, 5)
    f = Micromorphism(one, one, FiberGradedPoly(
        1, 1, 2, {((1,), (1,)): F(1), ((2,), (0,)): a}))
    g = Micromorphism(one, one, FiberGradedPoly(
        1, 1, 2, {((1,), (1,)): F(1), ((2,), (0,)): b}))
    show(f"deformations add: coefficients {a} and {b}", format_morphism(compose(g, f)))

    square = cotangent_lift(CoreMap.from_terms(1, [{((), (2,)): F(1)}]), 2)
    cube = cotangent_lift(CoreMap.from_terms(1, [{((), (3,)): F(1)}]), 2)
    show("lift(x^3) after lift(x^2) is lift(x^6)", format_morphism(compose(cube, square)))

    shear = Micromorphism(one, one, FiberGradedPoly(
        1, 1, 2, {((1,), (1,)): F(1), ((2,), (0,)): F(1, 2)}))
    germ = extract_germ(shear)
    show("germ of S = p x + p^2/2", format_germ(germ))
    show("graph of that germ (round trip)", format_morphism(graph_of_germ(germ)))

    braid = symmetry(one, MicroObject(2), 2)
    show("braiding of dimensions 1 and 2", format_morphism(braid))
    both = compose(symmetry(MicroObject(2), one, 2), braid)
    assert both == identity(MicroObject(3), 2)
    print("braiding squared equals the identity:", both == identity(MicroObject(3), 2))

    pair = tensor(square, cube)
    show("tensor of the two lifts", format_morphism(pair))


if __name__ == "__main__":
    main()
