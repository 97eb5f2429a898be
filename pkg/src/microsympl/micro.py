"""The extended microsymplectic category over coordinate cores.

Objects are cotangent microbundles [T*R^n, R^n], identified by the core
dimension n.  A micromorphism from dimension m to dimension n is stored as a
generating function S(p, x) of mixed type: p ranges over the source fibers,
x over the target core, S is polynomial in x and truncated at a fiber order
K >= 1, and the normal form S(0, x) = 0 holds identically.  The underlying
canonical relation is parametrized by

    x1 = dS/dp(p1, x2),    p2 = dS/dx(p1, x2),

which is lagrangian for (-omega) x omega by construction.  S(0, x) = 0 makes
the relation meet the product of cores exactly in the graph of the core map
phi = dS/dp(0, .), a polynomial map from the target core to the source core;
the tangent counterpart of that intersection condition is then automatic.
Graphicality over (p1, x2) is precisely transversality to the vertical
splitting of the target, so this normal form loses nothing on the class it
represents, and equality of micromorphisms is decidable coefficient by
coefficient because the additive constant is pinned to zero.

Composition eliminates the middle cotangent block through the stationarity
system of S_f(p1, y) + S_g(q, x3) - <q, y>, solved as a filtered fixed point
that always converges for valid operands; internally one extra truncation
order is carried so fiber derivatives stay faithful at the stored order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import (CheckResult, ConvergenceError, FiltrationError,
                     InternalInvariantError, NormalFormError, ShapeError,
                     UnsupportedCoreError, ValidityError)
from .jetalg import FiberGradedPoly, solve_triangular_fixed_point, substitute_many
from .linsympl import (LinCanonicalRelation, Matrix, check_linear_micromorphism,
                       frac, mat_inverse, mat_mul, mat_vec, transpose,
                       unit_vector, zero_vector)


@dataclass(frozen=True)
class MicroObject:
    """Cotangent microbundle [T*R^n, R^n]; equality is by core dimension."""

    core_dim: int
    label: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.core_dim < 0:
            raise ShapeError("core dimension must be non-negative")

    def tensor(self, other: "MicroObject") -> "MicroObject":
        return MicroObject(self.core_dim + other.core_dim)

    def __repr__(self):
        name = self.label or f"[T*R^{self.core_dim}, R^{self.core_dim}]"
        return f"MicroObject({self.core_dim}, {name!r})"


def unit_object() -> MicroObject:
    """The cotangent microbundle of the one-point manifold."""
    return MicroObject(0, "E")


def _strip_fiber(poly: FiberGradedPoly) -> FiberGradedPoly:
    # project a fiber-degree-0 polynomial onto the pure base space
    terms = {((), xe): c for (pe, xe), c in poly.terms.items() if sum(pe) == 0}
    if len(terms) != len(poly.terms):
        raise InternalInvariantError("fiber terms survived a core restriction")
    return FiberGradedPoly(0, poly.base_arity, 0, terms)


@dataclass(frozen=True)
class CoreMap:
    """Polynomial map between coordinate cores.

    ``components`` are pure base polynomials in ``domain_dim`` variables; a
    micromorphism's core map has the target core as its domain.
    """

    domain_dim: int
    components: tuple[FiberGradedPoly, ...]

    def __post_init__(self):
        comps = []
        for comp in self.components:
            if comp.fiber_arity != 0 or comp.base_arity != self.domain_dim:
                raise ShapeError(
                    f"core map component space {comp.space()} does not match "
                    f"domain dimension {self.domain_dim}")
            comps.append(comp.at_order(0))
        object.__setattr__(self, "components", tuple(comps))

    @property
    def codomain_dim(self) -> int:
        return len(self.components)

    @staticmethod
    def from_terms(domain_dim: int, component_terms: Sequence) -> "CoreMap":
        comps = tuple(FiberGradedPoly(0, domain_dim, 0, t) for t in component_terms)
        return CoreMap(domain_dim, comps)

    @staticmethod
    def identity(n: int) -> "CoreMap":
        return CoreMap(n, tuple(FiberGradedPoly.base_var(0, n, 0, i) for i in range(n)))

    @staticmethod
    def diagonal(n: int, copies: int) -> "CoreMap":
        """The map x -> (x, ..., x) with the given number of copies."""
        if copies < 0:
            raise ShapeError("copies must be non-negative")
        comps = tuple(FiberGradedPoly.base_var(0, n, 0, i)
                      for _ in range(copies) for i in range(n))
        return CoreMap(n, comps)

    @staticmethod
    def to_point(n: int) -> "CoreMap":
        return CoreMap(n, ())

    @staticmethod
    def constant_point(values: Sequence) -> "CoreMap":
        comps = tuple(FiberGradedPoly.constant(0, 0, 0, frac(v)) for v in values)
        return CoreMap(0, comps)

    def compose(self, inner: "CoreMap") -> "CoreMap":
        """self after inner, as polynomial maps."""
        if self.domain_dim != inner.codomain_dim:
            raise ShapeError(
                f"cannot compose core maps: domain {self.domain_dim} != "
                f"codomain {inner.codomain_dim}")
        comps = tuple(c.substitute((), inner.components, space=(0, inner.domain_dim, 0))
                      for c in self.components)
        return CoreMap(inner.domain_dim, comps)

    def product(self, other: "CoreMap") -> "CoreMap":
        dom = self.domain_dim + other.domain_dim
        comps = tuple(c.embed(0, dom, 0, 0) for c in self.components)
        comps += tuple(c.embed(0, dom, 0, self.domain_dim) for c in other.components)
        return CoreMap(dom, comps)

    def evaluate(self, point: Sequence) -> tuple[Fraction, ...]:
        return tuple(c.evaluate((), point) for c in self.components)

    def jacobian_at(self, point: Sequence) -> Matrix:
        return tuple(tuple(c.partial_base(j).evaluate((), point)
                           for j in range(self.domain_dim))
                     for c in self.components)

    def is_affine(self) -> bool:
        return all(all(sum(xe) <= 1 for _, xe in comp.terms)
                   for comp in self.components)

    def affine_parts(self) -> tuple[Matrix, tuple[Fraction, ...]]:
        """Linear part and constant part of an affine map."""
        if not self.is_affine():
            raise UnsupportedCoreError("core map is not affine")
        rows = []
        consts = []
        for comp in self.components:
            rows.append(tuple(comp.coefficient((), unit_exp(self.domain_dim, j))
                              for j in range(self.domain_dim)))
            consts.append(comp.coefficient((), (0,) * self.domain_dim))
        return tuple(rows), tuple(consts)

    def affine_inverse(self) -> "CoreMap":
        """Inverse of an affine map with invertible linear part."""
        if self.codomain_dim != self.domain_dim:
            raise UnsupportedCoreError("core map is not square")
        rows, consts = self.affine_parts()
        inv = mat_inverse(rows)
        if inv is None:
            raise UnsupportedCoreError("linear part of the core map is not invertible")
        n = self.domain_dim
        shift = mat_vec(inv, consts)
        comps = []
        for i in range(n):
            terms = {((), unit_exp(n, j)): inv[i][j] for j in range(n)}
            terms[((), (0,) * n)] = -shift[i]
            comps.append(FiberGradedPoly(0, n, 0, terms))
        return CoreMap(n, tuple(comps))


def unit_exp(n: int, index: int) -> tuple[int, ...]:
    return tuple(1 if i == index else 0 for i in range(n))


@dataclass(frozen=True)
class Micromorphism:
    """Symplectic micromorphism in generating-function normal form."""

    source: MicroObject
    target: MicroObject
    gen: FiberGradedPoly
    core: CoreMap = field(init=False, compare=False)

    def __post_init__(self):
        m, n = self.source.core_dim, self.target.core_dim
        if self.gen.fiber_arity != m or self.gen.base_arity != n:
            raise ShapeError(
                f"generating function space {self.gen.space()} does not match "
                f"objects ({m} -> {n})")
        if self.gen.order < 1:
            raise ShapeError("micromorphisms need fiber order K >= 1")
        offending = self.gen.core_part()
        if not offending.is_zero():
            raise NormalFormError(
                f"S(0, x) = {offending.to_text()} but must vanish; offending "
                f"monomials: {', '.join(t for t in _monomial_names(offending))}")
        comps = tuple(_strip_fiber(self.gen.partial_fiber(i).core_part())
                      for i in range(m))
        object.__setattr__(self, "core", CoreMap(n, comps))

    @property
    def order(self) -> int:
        return self.gen.order

    def __repr__(self):
        return (f"Micromorphism({self.source.core_dim} -> {self.target.core_dim}, "
                f"K={self.order}, S={self.gen.to_text()})")


def _monomial_names(poly: FiberGradedPoly) -> list[str]:
    from .jetalg import _term_text
    return [_term_text(key, c) for key, c in poly.sorted_terms()]


# -- constructors -------------------------------------------------------------


def identity(obj: MicroObject, order: int) -> Micromorphism:
    n = obj.core_dim
    terms = {(unit_exp(n, i), unit_exp(n, i)): Fraction(1) for i in range(n)}
    return Micromorphism(obj, obj, FiberGradedPoly(n, n, order, terms))


def cotangent_lift(phi: CoreMap, order: int) -> Micromorphism:
    """The micromorphism with S = <p, phi(x)>; its core map is phi."""
    m, n = phi.codomain_dim, phi.domain_dim
    gen = FiberGradedPoly.zero(m, n, order)
    for i, comp in enumerate(phi.components):
        p_i = FiberGradedPoly.monomial(m, n, order, 1, unit_exp(m, i), (0,) * n)
        gen = gen + p_i * comp.embed(m, n).at_order(order)
    return Micromorphism(MicroObject(m), MicroObject(n), gen)


def unit_to(obj: MicroObject, order: int) -> Micromorphism:
    """The unique micromorphism out of the unit object E."""
    return Micromorphism(unit_object(), obj,
                         FiberGradedPoly.zero(0, obj.core_dim, order))


def point_morphism(obj: MicroObject, tail: FiberGradedPoly) -> Micromorphism:
    """Morphism to E given by a fiber-only generating function.

    The tail has no base variables and no constant term; its gradient at 0
    is the core point, and transversality of the encoded lagrangian germ to
    the core is automatic in this representation.
    """
    if tail.base_arity != 0 or tail.fiber_arity != obj.core_dim:
        raise ShapeError("tail must be a fiber-only polynomial over the object fibers")
    if tail.coefficient((0,) * tail.fiber_arity, ()):
        raise NormalFormError("tail has a nonzero constant term")
    return Micromorphism(obj, unit_object(), tail)


def symmetry(a: MicroObject, b: MicroObject, order: int) -> Micromorphism:
    """Braiding a (x) b -> b (x) a: the cotangent lift of the factor swap."""
    na, nb = a.core_dim, b.core_dim
    dom = nb + na
    comps = [FiberGradedPoly.base_var(0, dom, 0, nb + i) for i in range(na)]
    comps += [FiberGradedPoly.base_var(0, dom, 0, j) for j in range(nb)]
    return cotangent_lift(CoreMap(dom, tuple(comps)), order)


# -- composition and tensor ----------------------------------------------------


def _stationary(g: Micromorphism, f: Micromorphism, order: int):
    """Middle fixed point of composition, in the (source fiber, final base) space."""
    m = f.source.core_dim
    n = f.target.core_dim
    q = g.target.core_dim
    sf = f.gen.at_order(order)
    sg = g.gen.at_order(order)
    sf_dx = [sf.partial_base(j) for j in range(n)]
    sg_dp = [sg.partial_fiber(j) for j in range(n)]
    space = (m, q, order)
    seed_x = [comp.embed(m, q).at_order(order) for comp in g.core.components]
    seed_p = [FiberGradedPoly.zero(m, q, order) for _ in range(n)]
    none_m = [None] * m
    none_q = [None] * q

    def step(z):
        xb = z[:n]
        pb = substitute_many(sf_dx, none_m, xb, space)
        xb_new = substitute_many(sg_dp, pb, none_q, space)
        return (*xb_new, *pb)

    sol = solve_triangular_fixed_point((*seed_x, *seed_p), step)
    return sol[:n], sol[n:], sf, sg, space


def compose(g: Micromorphism, f: Micromorphism) -> Micromorphism:
    """Composite g after f; always defined for valid micromorphisms.

    With f carrying S_f(p1, y) and g carrying S_g(q, x3), the composite is
    S_f(p1, Y) + S_g(Q, x3) - <Q, Y> where (Y, Q) is the unique filtered
    stationary point, seeded at (core(g)(x3), 0).  The core of the result is
    core(f) composed after core(g).  A non-contracting fixed point cannot
    occur for valid operands; hitting one raises InternalInvariantError.
    """
    if f.target != g.source:
        raise ShapeError(
            f"objects do not match: {f.target.core_dim} vs {g.source.core_dim}")
    if f.order != g.order:
        raise ShapeError(f"orders differ: {f.order} vs {g.order}")
    k = f.order
    m = f.source.core_dim
    n = f.target.core_dim
    q = g.target.core_dim
    try:
        xb, pb, sf, sg, space = _stationary(g, f, k + 1)
        total = sf.substitute([None] * m, xb, space=space)
        total = total + sg.substitute(list(pb), [None] * q, space=space)
        for y, p in zip(xb, pb):
            total = total - p * y
        return Micromorphism(f.source, g.target, total.at_order(k))
    except (ConvergenceError, NormalFormError, FiltrationError) as exc:
        raise InternalInvariantError(
            f"composition failed on valid-looking inputs: {exc}") from exc


def stationary_middle(g: Micromorphism, f: Micromorphism):
    """The middle point (Y, Q) eliminated by compose, truncated at the stored order."""
    if f.target != g.source:
        raise ShapeError("objects do not match")
    if f.order != g.order:
        raise ShapeError("orders differ")
    xb, pb, _, _, _ = _stationary(g, f, f.order + 1)
    k = f.order
    return tuple(y.at_order(k) for y in xb), tuple(p.at_order(k) for p in pb)


def tensor(f1: Micromorphism, f2: Micromorphism) -> Micromorphism:
    """Tensor product: generating functions in disjoint variable blocks."""
    if f1.order != f2.order:
        raise ShapeError(f"orders differ: {f1.order} vs {f2.order}")
    m1, n1 = f1.source.core_dim, f1.target.core_dim
    m2, n2 = f2.source.core_dim, f2.target.core_dim
    gen = f1.gen.embed(m1 + m2, n1 + n2, 0, 0) + f2.gen.embed(m1 + m2, n1 + n2, m1, n1)
    return Micromorphism(f1.source.tensor(f2.source), f1.target.tensor(f2.target), gen)


# -- checks --------------------------------------------------------------------


def _sample_core_points(n: int) -> list[tuple[Fraction, ...]]:
    if n == 0:
        return [()]
    return [
        tuple(Fraction(0) for _ in range(n)),
        tuple(Fraction(1) for _ in range(n)),
        tuple(Fraction(1, 2) if i % 2 == 0 else Fraction(-1, 2) for i in range(n)),
    ]


def linearized_relation(gen: FiberGradedPoly, point: Sequence) -> LinCanonicalRelation:
    """Tangent relation of the parametrized relation of S at a base point.

    Works for any generating function; for a valid micromorphism the base
    Hessian block vanishes and this reduces to the normal-form formula
    dx1 = Q dp1 + Dphi dx2, dp2 = Dphi^T dp1 with Q = d2S/dp2(0, point).
    """
    m, n = gen.fiber_arity, gen.base_arity
    b = tuple(frac(v) for v in point)
    if len(b) != n:
        raise ShapeError(f"point has dimension {len(b)}, expected {n}")
    zeros = (Fraction(0),) * m
    dp = [gen.partial_fiber(i) for i in range(m)]
    dx = [gen.partial_base(j) for j in range(n)]
    spp = [[dp[i].partial_fiber(j).evaluate(zeros, b) for j in range(m)] for i in range(m)]
    spx = [[dp[i].partial_base(j).evaluate(zeros, b) for j in range(n)] for i in range(m)]
    sxx = [[dx[i].partial_base(j).evaluate(zeros, b) for j in range(n)] for i in range(n)]
    vectors = []
    for a in range(m):
        vectors.append(tuple(spp[i][a] for i in range(m)) + unit_vector(m, a)
                       + zero_vector(n) + tuple(spx[a][j] for j in range(n)))
    for c in range(n):
        vectors.append(tuple(spx[i][c] for i in range(m)) + zero_vector(m)
                       + unit_vector(n, c) + tuple(sxx[j][c] for j in range(n)))
    return LinCanonicalRelation.from_vectors(m, n, vectors)


def tangent_relation_at(f: Micromorphism, point: Sequence) -> LinCanonicalRelation:
    """Tangent relation of a micromorphism at a point of the target core."""
    return linearized_relation(f.gen, point)


def is_micromorphism(gen: FiberGradedPoly, source: MicroObject,
                     target: MicroObject) -> CheckResult:
    """Normal-form check with diagnostics, plus the linear-level cross-check.

    Returns false with the offending monomials when S(0, x) != 0.  When the
    normal form holds, the tangent relation at sampled core points is checked
    against the graph of the core differential by exact elimination.
    """
    if gen.fiber_arity != source.core_dim or gen.base_arity != target.core_dim:
        raise ShapeError(
            f"generating function space {gen.space()} does not match objects "
            f"({source.core_dim} -> {target.core_dim})")
    offending = gen.core_part()
    if not offending.is_zero():
        names = ", ".join(_monomial_names(offending))
        return CheckResult(False, (f"S(0, x) != 0; offending monomials: {names}",))
    morphism = Micromorphism(source, target, gen)
    reasons = []
    for b in _sample_core_points(target.core_dim):
        rel = tangent_relation_at(morphism, b)
        res = check_linear_micromorphism(rel, morphism.core.jacobian_at(b))
        if not res:
            reasons.append(f"linear check failed at core point {b}: {res.describe()}")
    return CheckResult(not reasons, tuple(reasons))


# -- symplectomorphism germs -----------------------------------------------------


@dataclass(frozen=True)
class GermJet:
    """Forward jet maps (x, p) -> (X(x, p), P(x, p)) of a symplectomorphism germ.

    Components live in the fiber/base space of the source: base variables are
    the source positions, fiber variables the source momenta, truncated at
    the germ order.

    The position block carries one order of redundancy relative to the graph
    micromorphism: its fiber-degree-K part reflects degree-K+1 data of the
    underlying generating function.  extract_germ after graph_of_germ is
    therefore the identity on extracted jets, while jets obtained by
    compose_germs agree with the re-extracted ones only through degree K-1
    in X (and exactly in P); the graphs themselves always agree exactly.
    """

    dim: int
    order: int
    x_out: tuple[FiberGradedPoly, ...]
    p_out: tuple[FiberGradedPoly, ...]

    def __post_init__(self):
        if len(self.x_out) != self.dim or len(self.p_out) != self.dim:
            raise ShapeError("component count does not match the dimension")
        space = (self.dim, self.dim, self.order)
        for comp in (*self.x_out, *self.p_out):
            if comp.space() != space:
                raise ShapeError(f"component space {comp.space()} != {space}")

    def core_restriction(self) -> CoreMap:
        """The positional map along the core, X(x, 0)."""
        return CoreMap(self.dim, tuple(_strip_fiber(c.core_part()) for c in self.x_out))


def identity_germ(dim: int, order: int) -> GermJet:
    xs = tuple(FiberGradedPoly.base_var(dim, dim, order, i) for i in range(dim))
    ps = tuple(FiberGradedPoly.fiber_var(dim, dim, order, i) for i in range(dim))
    return GermJet(dim, order, xs, ps)


def compose_germs(outer: GermJet, inner: GermJet) -> GermJet:
    """Jet composition outer after inner, truncated at the common order."""
    if outer.dim != inner.dim:
        raise ShapeError(f"dimensions differ: {outer.dim} vs {inner.dim}")
    if outer.order != inner.order:
        raise ShapeError(f"orders differ: {outer.order} vs {inner.order}")
    n, k = outer.dim, outer.order
    for comp in inner.p_out:
        if any(sum(pe) == 0 for pe, _ in comp.terms):
            raise ValidityError("inner germ does not preserve the core")
    space = (n, n, k)
    xs = tuple(c.substitute(inner.p_out, inner.x_out, space=space) for c in outer.x_out)
    ps = tuple(c.substitute(inner.p_out, inner.x_out, space=space) for c in outer.p_out)
    return GermJet(n, k, xs, ps)


def _affine_solve(target_vars, linear_inv, equations, seeds, space):
    """Fixed point of z = z + linear_inv (target - equations(z)) in a filtered space."""
    none_fiber = [None] * space[0]

    def step(z):
        vals = substitute_many(equations, none_fiber, list(z), space)
        out = []
        for i in range(len(z)):
            corr = FiberGradedPoly.zero(*space)
            for j in range(len(z)):
                delta = target_vars[j] - vals[j]
                if linear_inv[i][j]:
                    corr = corr + delta.scale(linear_inv[i][j])
            out.append(z[i] + corr)
        return tuple(out)

    return solve_triangular_fixed_point(tuple(seeds), step)


def extract_germ(f: Micromorphism) -> GermJet:
    """Forward jet maps of the symplectomorphism germ underlying f.

    Supported exactly when the core map is affine with invertible linear
    part; x1 = dS/dp(p1, X) is solved for X by the filtered fixed point
    seeded at the affine core inverse, and P = dS/dx(p1, X).  The round trip
    graph_of_germ(extract_germ(f)) recovers f exactly at the stored order.
    """
    if f.source.core_dim != f.target.core_dim:
        raise UnsupportedCoreError("source and target core dimensions differ")
    n = f.source.core_dim
    core = f.core
    if not core.is_affine():
        raise UnsupportedCoreError("core map is not affine")
    rows, _ = core.affine_parts()
    inv = mat_inverse(rows)
    if inv is None:
        raise UnsupportedCoreError("linear part of the core map is not invertible")
    k = f.order
    space = (n, n, k)
    gen = f.gen
    equations = [gen.partial_fiber(i) for i in range(n)]
    seeds = [c.embed(n, n).at_order(k) for c in core.affine_inverse().components]
    xvars = [FiberGradedPoly.base_var(n, n, k, j) for j in range(n)]
    xs = _affine_solve(xvars, inv, equations, seeds, space)
    ps = tuple(substitute_many([gen.partial_base(i) for i in range(n)],
                               [None] * n, list(xs), space))
    return GermJet(n, k, tuple(xs), ps)


def invert_germ(germ: GermJet) -> GermJet:
    """Jet inverse of a germ whose core restriction is affine invertible."""
    n, k = germ.dim, germ.order
    for comp in germ.p_out:
        if not comp.core_part().is_zero():
            raise ValidityError("germ does not preserve the core")
    xi = germ.core_restriction()
    if not xi.is_affine():
        raise UnsupportedCoreError("core restriction is not affine")
    rows, _ = xi.affine_parts()
    b_inv = mat_inverse(rows)
    if b_inv is None:
        raise UnsupportedCoreError("core restriction is not invertible")
    c_rows = []
    for i in range(n):
        row = []
        for j in range(n):
            deriv = germ.p_out[i].partial_fiber(j).core_part()
            const = deriv.coefficient((0,) * n, (0,) * n)
            if deriv != FiberGradedPoly.constant(n, n, k, const):
                raise UnsupportedCoreError(
                    "momentum linearization varies along the core; inversion "
                    "is supported only for the affine class")
            row.append(const)
        c_rows.append(tuple(row))
    c_inv = mat_inverse(tuple(c_rows))
    if c_inv is None:
        raise UnsupportedCoreError("momentum linearization is not invertible")
    space = (n, n, k)
    xvars = [FiberGradedPoly.base_var(n, n, k, j) for j in range(n)]
    pvars = [FiberGradedPoly.fiber_var(n, n, k, j) for j in range(n)]
    phi = xi.affine_inverse()
    seeds = [c.embed(n, n).at_order(k) for c in phi.components]
    seeds += [FiberGradedPoly.zero(n, n, k) for _ in range(n)]

    def step(z):
        # momenta first, then positions against the refreshed momenta: the
        # momentum equation contracts on its own, the position one only
        # against momenta that are already one degree better
        xs, ps = z[:n], z[n:]
        vals_p = substitute_many(germ.p_out, list(ps), list(xs), space)
        new_p = []
        for i in range(n):
            corr = FiberGradedPoly.zero(*space)
            for j in range(n):
                if c_inv[i][j]:
                    corr = corr + (pvars[j] - vals_p[j]).scale(c_inv[i][j])
            new_p.append(ps[i] + corr)
        vals_x = substitute_many(germ.x_out, new_p, list(xs), space)
        new_x = []
        for i in range(n):
            corr = FiberGradedPoly.zero(*space)
            for j in range(n):
                if b_inv[i][j]:
                    corr = corr + (xvars[j] - vals_x[j]).scale(b_inv[i][j])
            new_x.append(xs[i] + corr)
        return (*new_x, *new_p)

    sol = solve_triangular_fixed_point(tuple(seeds), step)
    return GermJet(n, k, sol[:n], sol[n:])


def _symplectic_jacobian_check(germ: GermJet, point) -> None:
    n = germ.dim
    zeros = (Fraction(0),) * n
    rows = []
    for comp in (*germ.x_out, *germ.p_out):
        row = [comp.partial_base(j).evaluate(zeros, point) for j in range(n)]
        row += [comp.partial_fiber(j).evaluate(zeros, point) for j in range(n)]
        rows.append(tuple(row))
    j_mat = tuple(rows)
    omega = []
    for i in range(n):
        omega.append(zero_vector(n) + tuple(Fraction(-1 if j == i else 0)
                                            for j in range(n)))
    for i in range(n):
        omega.append(unit_vector(n, i) + zero_vector(n))
    omega = tuple(omega)
    if mat_mul(transpose(j_mat), mat_mul(omega, j_mat)) != omega:
        raise ValidityError(
            f"linearization at core point {tuple(point)} is not symplectic")


def graph_of_germ(germ: GermJet) -> Micromorphism:
    """The micromorphism whose parametrized relation is the graph of the germ.

    Validates that the jets preserve the core, have symplectic linearization
    at sampled core points, and satisfy the closedness identities at every
    faithful order; then solves X(u, p1) = x2 for u, pushes the momenta
    forward, and integrates the resulting closed form radially into S.
    Functorial against compose, and inverse to extract_germ on its domain.
    """
    n, k = germ.dim, germ.order
    xi = germ.core_restriction()
    if not xi.is_affine():
        raise UnsupportedCoreError("core restriction is not affine")
    rows, _ = xi.affine_parts()
    b_inv = mat_inverse(rows)
    if b_inv is None:
        raise UnsupportedCoreError("core restriction is not invertible")
    for comp in germ.p_out:
        stray = comp.core_part()
        if not stray.is_zero():
            raise ValidityError(
                f"germ does not preserve the core: momentum output {stray.to_text()} at p = 0")
    for b in _sample_core_points(n):
        _symplectic_jacobian_check(germ, b)
    space = (n, n, k)
    xvars = [FiberGradedPoly.base_var(n, n, k, j) for j in range(n)]
    phi = xi.affine_inverse()
    seeds = [c.embed(n, n).at_order(k) for c in phi.components]
    x_hat = _affine_solve(xvars, b_inv, list(germ.x_out), seeds, space)
    p_hat = tuple(substitute_many(germ.p_out, [None] * n, list(x_hat), space))
    for i in range(n):
        for j in range(i + 1, n):
            if x_hat[i].partial_fiber(j) != x_hat[j].partial_fiber(i):
                raise ValidityError(
                    f"jet data is not lagrangian: dX{i + 1}/dp{j + 1} != dX{j + 1}/dp{i + 1}")
            if p_hat[i].partial_base(j) != p_hat[j].partial_base(i):
                raise ValidityError(
                    f"jet data is not lagrangian: dP{i + 1}/dx{j + 1} != dP{j + 1}/dx{i + 1}")
    for i in range(n):
        for j in range(n):
            lhs = x_hat[i].partial_base(j).at_order(k - 1)
            rhs = p_hat[j].partial_fiber(i).at_order(k - 1)
            if lhs != rhs:
                raise ValidityError(
                    f"jet data is not lagrangian: dX{i + 1}/dx{j + 1} != dP{j + 1}/dp{i + 1} "
                    f"at the faithful order")
    gen = _radial_potential(x_hat, p_hat, space).at_order(k)
    return Micromorphism(MicroObject(n), MicroObject(n), gen)


def _radial_potential(fiber_comps, base_comps, space) -> FiberGradedPoly:
    """Potential of the closed 1-form (fiber_comps) dp + (base_comps) dx with S(0) = 0."""
    tm, tn, torder = space
    out: dict = {}
    for i, comp in enumerate(fiber_comps):
        for (pe, xe), c in comp.terms.items():
            if sum(pe) + 1 > torder:
                continue
            key = (pe[:i] + (pe[i] + 1,) + pe[i + 1:], xe)
            weight = c / (sum(pe) + sum(xe) + 1)
            prev = out.get(key)
            total = weight if prev is None else prev + weight
            if total:
                out[key] = total
            elif prev is not None:
                del out[key]
    for j, comp in enumerate(base_comps):
        for (pe, xe), c in comp.terms.items():
            key = (pe, xe[:j] + (xe[j] + 1,) + xe[j + 1:])
            weight = c / (sum(pe) + sum(xe) + 1)
            prev = out.get(key)
            total = weight if prev is None else prev + weight
            if total:
                out[key] = total
            elif prev is not None:
                del out[key]
    return FiberGradedPoly(tm, tn, torder, out)
