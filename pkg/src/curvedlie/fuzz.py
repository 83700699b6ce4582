"""Seeded random instances: valid curved Lie algebras, raw candidates,
morphism chains, and augmented cdgas.

Valid algebras come from families that satisfy the axioms by construction
(abelian with a staircase differential, central-extension brackets, small
free truncations) composed with random twists: twisting preserves validity,
so the pool reaches generic-looking curved algebras with nonzero
everything.  Candidates for validator fuzzing are only repaired to be
antisymmetric; every other axiom is left to chance.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .cdga import Cdga
from .curved import (
    CurvedLieAlgebra,
    CurvedMorphism,
    compose,
    invert,
    truncation_algebra,
    twist,
    validate_algebra,
)
from .freelie import build_truncation
from .graded import Element, GradedSpace, LinearMap, parity


def rng_from_seed(seed: int) -> random.Random:
    return random.Random(seed)


def random_scalar(rng: random.Random, allow_zero: bool = True) -> Fraction:
    num = rng.randint(-4, 4)
    if not allow_zero and num == 0:
        num = 1
    den = rng.choice([1, 1, 1, 2, 3])
    return Fraction(num, den)


def random_element(rng: random.Random, space: GradedSpace, degree: int,
                   allow_zero: bool = True) -> Element:
    names = space.names_in_degree(degree)
    coeffs = {n: random_scalar(rng) for n in names if rng.random() < 0.7}
    e = Element(space, coeffs)
    if e.is_zero() and not allow_zero and names:
        e = space.element(rng.choice(names), random_scalar(rng, allow_zero=False))
    return e


def _staircase(rng: random.Random, space: GradedSpace) -> LinearMap:
    """A differential built from disjoint arrows n -> m with |m| = |n| - 1;
    no chain of length two ever forms, so the square is zero."""
    cols: dict[str, Element] = {}
    targets_used: set[str] = set()
    for n, dn in space.basis:
        if n in targets_used or rng.random() < 0.45:
            continue
        candidates = [m for m, dm in space.basis
                      if dm == dn - 1 and m != n
                      and m not in cols and m not in targets_used]
        if candidates:
            tgt = rng.choice(candidates)
            cols[n] = space.element(tgt, random_scalar(rng, allow_zero=False))
            targets_used.add(tgt)
    return LinearMap(space, space, -1, cols)


def _abelian_with_staircase(rng: random.Random, dim: int) -> CurvedLieAlgebra:
    degrees = sorted((rng.randint(-3, -1) for _ in range(dim)), reverse=True)
    space = GradedSpace((f"e{i}", degrees[i]) for i in range(dim))
    d = _staircase(rng, space)
    # curvature: any d-closed degree -2 element keeps d² = ad_ω (= 0) valid
    omega_pool = [n for n in space.names_in_degree(-2)
                  if d.column(n).is_zero()]
    omega = Element(space, {n: random_scalar(rng) for n in omega_pool
                            if rng.random() < 0.5})
    return CurvedLieAlgebra(space, {}, d, omega)


def _central_extension(rng: random.Random) -> CurvedLieAlgebra:
    da, db = rng.choice([(-1, -1), (-1, -2)])
    dc = da + db
    space = GradedSpace([("a", da), ("b", db), ("c", dc)])
    brackets = {("a", "b"): space.element("c", random_scalar(rng, allow_zero=False))}
    cols = {}
    if db - 1 == dc and rng.random() < 0.5:
        # db = λc is a derivation because c is central and dc = 0
        cols["b"] = space.element("c", random_scalar(rng))
    d = LinearMap(space, space, -1, cols)
    omega = space.element("c", random_scalar(rng)) if dc == -2 else space.zero()
    return CurvedLieAlgebra(space, brackets, d, omega)


def _small_free(rng: random.Random) -> CurvedLieAlgebra:
    gens = GradedSpace([("p", rng.choice([-1, -2])), ("q", -1)])
    T = build_truncation(gens, rng.choice([2, 3]))
    return truncation_algebra(T, LinearMap.zero(T.space, T.space, -1),
                              T.space.zero())


def random_valid_algebra(rng: random.Random, max_dim: int = 4,
                         allow_free: bool = True,
                         max_twists: int = 2) -> CurvedLieAlgebra:
    roll = rng.random()
    if roll < 0.45 or max_dim < 3:
        g = _abelian_with_staircase(rng, rng.randint(1, max_dim))
    elif roll < 0.8 or not allow_free:
        g = _central_extension(rng)
    else:
        g = _small_free(rng)
    for _ in range(rng.randint(0, max_twists)):
        xi = random_element(rng, g.space, -1)
        if not xi.is_zero():
            g, _ = twist(g, xi)
    report = validate_algebra(g)
    if not report.ok:
        raise AssertionError(
            f"fuzz family produced an invalid algebra: {report.failures}")
    return g


def random_candidate_algebra(rng: random.Random, max_dim: int = 4
                             ) -> CurvedLieAlgebra:
    """Random structure constants repaired only for antisymmetry."""
    dim = rng.randint(1, max_dim)
    basis = [(f"e{i}", rng.randint(-3, 0)) for i in range(dim)]
    space = GradedSpace(basis)
    brackets = {}
    for i, (n, dn) in enumerate(basis):
        for j in range(i, dim):
            m, dm = basis[j]
            if i == j and not parity(dn):
                continue  # even diagonal is forced to zero by antisymmetry
            if rng.random() < 0.5:
                val = random_element(rng, space, dn + dm)
                if not val.is_zero():
                    brackets[(n, m)] = val
    cols = {}
    for n, dn in basis:
        if rng.random() < 0.6:
            val = random_element(rng, space, dn - 1)
            if not val.is_zero():
                cols[n] = val
    d = LinearMap(space, space, -1, cols)
    omega = random_element(rng, space, -2)
    return CurvedLieAlgebra(space, brackets, d, omega)


def random_morphism_chain(rng: random.Random, length: int = 3
                          ) -> list[CurvedMorphism]:
    """A composable chain of valid curved morphisms with invertible parts.

    Each link is a twist morphism composed with a conjugated scaling of the
    uncurved abelian base (scalings with d-closed corrections are curved
    endomorphisms there); conjugation transports them along the chain, so
    every link is valid by composition.  Innermost first.
    """
    base = _abelian_with_staircase(rng, rng.randint(2, 4))
    base = CurvedLieAlgebra(base.space, {}, base.d, base.space.zero())
    chain: list[CurvedMorphism] = []
    transport = CurvedMorphism.identity(base)  # base -> current
    current = base
    for _ in range(length):
        lam = random_scalar(rng, allow_zero=False)
        f = LinearMap(base.space, base.space, 0, {
            n: base.space.element(n, lam) for n in base.space.names()
        })
        closed = [n for n in base.space.names_in_degree(-1)
                  if base.d.column(n).is_zero()]
        alpha = Element(base.space,
                        {n: random_scalar(rng) for n in closed
                         if rng.random() < 0.6})
        scaling = CurvedMorphism(base, base, f, alpha)
        conjugated = compose(transport, compose(scaling, invert(transport)))
        xi = random_element(rng, current.space, -1)
        twisted, tw = twist(current, xi)
        link = compose(tw, conjugated)
        chain.append(link)
        transport = compose(link, transport)
        current = twisted
    return chain


def random_augmented_cdga(rng: random.Random, max_dim: int = 3) -> Cdga:
    """Valid augmented cdgas: square-zero extensions with a staircase
    differential, or a truncated polynomial algebra on an even generator."""
    if rng.random() < 0.6:
        m = max(1, rng.randint(1, max_dim - 1))
        degrees = [rng.randint(-3, 0) for _ in range(m)]
        space = GradedSpace([("1", 0)] + [(f"a{i}", degrees[i])
                                          for i in range(m)])
        aug_space = GradedSpace((n, d) for n, d in space.basis if n != "1")
        stair = _staircase(rng, aug_space)
        cols = {n: Element(space, dict(stair.column(n).coeffs))
                for n in aug_space.names() if not stair.column(n).is_zero()}
        d = LinearMap(space, space, -1, cols)
        return Cdga(space, "1", {}, d)
    k = rng.randint(2, 3)
    # Q[u]/(u^k) with u of cohomological degree 2
    def name(i):
        return "1" if i == 0 else ("u" if i == 1 else f"u^{i}")
    space = GradedSpace([(name(i), -2 * i) for i in range(k)])
    products = {}
    for i in range(1, k):
        for j in range(1, k):
            if i + j < k:
                products[(name(i), name(j))] = space.element(name(i + j))
    return Cdga(space, "1", products, LinearMap.zero(space, space, -1))


def random_retraction_shift(rng: random.Random, A: Cdga) -> dict[str, Fraction]:
    """A retraction differing from the basis retraction by a degree-0
    functional on the complement of the unit."""
    eps = {A.unit: Fraction(1)}
    for n in A.space.names_in_degree(0):
        if n != A.unit and rng.random() < 0.7:
            eps[n] = random_scalar(rng)
    return eps
