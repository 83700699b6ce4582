"""The model functors and the adjunction: sign conventions under exact fire.

The dualisation signs are pinned by two independent hand computations kept
in these tests (the split-perturbation model and its predicted twist), and
by the requirement that every constructed model satisfy d² = ad_ω on the
nose within its caps.
"""

from fractions import Fraction

import pytest

from curvedlie.cdga import Cdga, ground_cdga, split, validate_cdga
from curvedlie.curved import (
    CurvedLieAlgebra,
    CurvedMorphism,
    abelian_algebra,
    compose,
    twist,
    validate_algebra,
    validate_morphism,
    zero_algebra,
)
from curvedlie.functors import (
    CdgaMorphism,
    adjunction_backward,
    adjunction_forward,
    ce_model_of_morphism,
    chevalley_eilenberg,
    compose_cdga,
    counit_map,
    extend_algebra_morphism,
    free_lie_model,
    lie_model_of_morphism,
    unit_map,
    validate_cdga_morphism,
)
from curvedlie.graded import Element, GradedSpace, LinearMap


def sphere_cohomology():
    space = GradedSpace([("1", 0), ("u", -2)])
    return Cdga(space, "1", {}, LinearMap.zero(space, space, -1))


def two_points_algebra():
    space = GradedSpace([("1", 0), ("u", 0)])
    return Cdga(space, "1", {("u", "u"): space.element("1")},
                LinearMap.zero(space, space, -1))


def contractible_algebra():
    space = GradedSpace([("1", 0), ("a", 0), ("b", -1)])
    d = LinearMap(space, space, -1, {"a": space.element("b")})
    return Cdga(space, "1", {}, d)


# -- free Lie models -----------------------------------------------------------


def test_lie_model_of_sphere_cohomology():
    # one generator dual to u: odd, with trivial differential and curvature;
    # weight dims (1, 1, 0).  (The generator sits in degree +1: the degree
    # forced by the adjunction pairing on generators.)
    M = free_lie_model(sphere_cohomology(), cap=3)
    assert M.split.augmentation
    T = M.truncation
    assert T.dims_by_weight() == {1: 1, 2: 1, 3: 0}
    assert T.generators.basis == (("Σu*", 1),)
    assert M.algebra.curvature.is_zero()
    assert M.algebra.d.cols == {}
    assert validate_algebra(M.algebra).ok


def test_lie_model_of_ground_field_is_zero():
    M = free_lie_model(ground_cdga(), cap=3)
    assert M.algebra.dim == 0


def test_lie_model_of_two_points_has_weight_two_curvature():
    M = free_lie_model(two_points_algebra(), cap=3)
    assert not M.split.augmentation
    v = M.algebra.space.element("Σu*")
    vv = M.algebra.bracket(v, v)
    assert M.algebra.curvature == vv.scale(Fraction(-1, 2))
    assert validate_algebra(M.algebra).ok


def test_lie_model_of_contractible_is_acyclic_arrow():
    M = free_lie_model(contractible_algebra(), cap=3)
    assert M.algebra.curvature.is_zero()
    # d(Σb*) = Σa* and d(Σa*) = 0
    assert M.algebra.d.column("Σb*") == M.algebra.space.element("Σa*")
    assert M.algebra.d.column("Σa*").is_zero()
    assert validate_algebra(M.algebra).ok


def test_perturbed_split_model_by_hand():
    # ε'(a) = 1/2 on the contractible algebra.  Hand expansion of the split:
    # (a - 1/2)² = -2·(1/2)(a - 1/2) - 1/4, so
    #   d v_a = 1/2 [v_a, v_a],  d v_b = v_a + 1/2 [v_a, v_b],
    #   ω = 1/8 [v_a, v_a] · 2 = (1/2)(1/2)² [v_a,v_a]... kept exact below.
    phi = Fraction(1, 2)
    M = free_lie_model(contractible_algebra(), eps={"1": 1, "a": phi}, cap=3)
    S = M.algebra.space
    va, vb = S.element("Σa*"), S.element("Σb*")
    vaa = M.algebra.bracket(va, va)
    vab = M.algebra.bracket(va, vb)
    assert M.algebra.d.column("Σa*") == vaa.scale(phi)
    assert M.algebra.d.column("Σb*") == va + vab.scale(phi)
    assert M.algebra.curvature == vaa.scale(phi * phi / 2)
    assert validate_algebra(M.algebra).ok


def test_perturbed_split_model_is_a_twist():
    # changing the retraction by a degree-0 functional φ twists the model by
    # ξ = Σ φ(a)·(generator of a)
    phi = Fraction(2, 3)
    M0 = free_lie_model(contractible_algebra(), cap=3)
    M1 = free_lie_model(contractible_algebra(), eps={"1": 1, "a": phi}, cap=3)
    xi = M0.algebra.space.element("Σa*", phi)
    twisted, iso = twist(M0.algebra, xi)
    assert twisted.table == M1.algebra.table
    assert twisted.d == M1.algebra.d
    assert twisted.curvature == M1.algebra.curvature
    assert validate_morphism(iso).ok


def test_model_validates_for_every_split_of_two_points():
    for c in (0, 1, Fraction(1, 3), -2):
        M = free_lie_model(two_points_algebra(), eps={"1": 1, "u": c}, cap=4)
        assert validate_algebra(M.algebra).ok


# -- Chevalley-Eilenberg-type models ---------------------------------------------


def test_ce_of_zero_algebra_is_ground():
    M = chevalley_eilenberg(zero_algebra(), 3)
    assert M.algebra.dim == 1
    assert validate_cdga(M.algebra).ok


def test_ce_of_abelian_point_is_polynomial_line():
    g = abelian_algebra([("x", -1)])
    M = chevalley_eilenberg(g, 3)
    # one even generator in degree 0: monomials 1, t, t², t³
    assert M.algebra.dim == 4
    assert all(d == 0 for _, d in M.algebra.space.basis)
    assert M.algebra.d.cols == {}
    assert validate_cdga(M.algebra).ok


def test_ce_odd_generator_squares_to_zero():
    g = abelian_algebra([("x", -2)])
    M = chevalley_eilenberg(g, 3)
    # generator in degree +1 (odd): only 1 and the generator survive
    assert M.algebra.dim == 2


def test_ce_with_curvature_has_constant_term_and_flat_square():
    space = GradedSpace([("x", -1), ("w", -2)])
    g = CurvedLieAlgebra(space, {}, LinearMap(space, space, -1,
                                              {"x": space.element("w")}),
                         space.element("w", 3))
    M = chevalley_eilenberg(g, 3)
    const = M.algebra.d.column(M.gen_of["w"]).coefficient("1")
    assert const == -3  # (-1)^(|w|+1) ω^w with |w| = -2
    report = M.validate_below_band()
    assert report.ok


def test_ce_below_band_valid_on_heisenberg_with_curvature():
    space = GradedSpace([("a", -1), ("b", -1), ("c", -2)])
    g = CurvedLieAlgebra(space, {("a", "b"): space.element("c")},
                         LinearMap.zero(space, space, -1),
                         space.element("c", 1))
    M = chevalley_eilenberg(g, 4)
    assert M.validate_below_band().ok


def test_ce_uncurved_is_honest_cdga():
    space = GradedSpace([("a", -1), ("b", -1), ("c", -2)])
    g = CurvedLieAlgebra(space, {("a", "b"): space.element("c")},
                         LinearMap.zero(space, space, -1), space.zero())
    M = chevalley_eilenberg(g, 3)
    assert validate_cdga(M.algebra).ok


def test_ce_augmentation_exists_iff_uncurved():
    # the generator-killing retraction is a chain map exactly when the
    # constant component of the differential vanishes
    space = GradedSpace([("x", -1), ("w", -2)])
    d = LinearMap(space, space, -1, {"x": space.element("w")})
    flat = CurvedLieAlgebra(space, {}, d, space.zero())
    curved = CurvedLieAlgebra(space, {}, d, space.element("w"))
    for g, expected in ((flat, True), (curved, False)):
        M = chevalley_eilenberg(g, 3)
        killing_is_chain = all(
            M.algebra.d.column(n).coefficient("1") == 0
            for n in M.algebra.space.names()
        )
        assert killing_is_chain == expected


# -- functors on morphisms ---------------------------------------------------------


def test_lie_model_of_identity_morphism():
    A = contractible_algebra()
    M = free_lie_model(A, cap=3)
    ident = CdgaMorphism(A, A, LinearMap.identity(A.space))
    L = lie_model_of_morphism(ident, M, M)
    assert L.alpha.is_zero()
    assert L.f == LinearMap.identity(M.algebra.space)
    assert validate_morphism(L).ok


def test_lie_model_contravariance():
    A = sphere_cohomology()
    B = contractible_algebra()
    # φ: A -> B must be a cdga map; u -> 0 is the only degree-correct choice,
    # so use a rescaling automorphism chain on B instead
    f1 = LinearMap(B.space, B.space, 0, {
        "1": B.space.element("1"),
        "a": B.space.element("a", 2),
        "b": B.space.element("b", 2),
    })
    f2 = LinearMap(B.space, B.space, 0, {
        "1": B.space.element("1"),
        "a": B.space.element("a", 3),
        "b": B.space.element("b", 3),
    })
    m1 = CdgaMorphism(B, B, f1)
    m2 = CdgaMorphism(B, B, f2)
    assert validate_cdga_morphism(m1).ok
    M = free_lie_model(B, cap=3)
    lhs = lie_model_of_morphism(compose_cdga(m2, m1), M, M)
    rhs = compose(lie_model_of_morphism(m1, M, M),
                  lie_model_of_morphism(m2, M, M))
    assert lhs.f == rhs.f and lhs.alpha == rhs.alpha


def test_lie_model_morphism_with_unit_component():
    # B = two points, A = ground field; the unique map A -> B hits the unit,
    # and a map B -> B with a unit component gives a genuinely curved image
    B = two_points_algebra()
    fmap = LinearMap(B.space, B.space, 0, {
        "1": B.space.element("1"),
        "u": B.space.element("1", 1) + B.space.element("u", 0),
    })
    # u -> 1 is multiplicative: (u·u = 1) -> 1·1 = 1 and chain (d = 0)
    m = CdgaMorphism(B, B, fmap)
    assert validate_cdga_morphism(m).ok
    M = free_lie_model(B, cap=3)
    L = lie_model_of_morphism(m, M, M)
    assert not L.alpha.is_zero()
    assert validate_morphism(L).ok


def test_ce_of_identity_and_of_twist():
    space = GradedSpace([("x", -1), ("y", -2)])
    d = LinearMap(space, space, -1, {"x": space.element("y")})
    g = CurvedLieAlgebra(space, {}, d, space.zero())
    M = chevalley_eilenberg(g, 3)
    ident = ce_model_of_morphism(CurvedMorphism.identity(g), M, M)
    assert ident.f == LinearMap.identity(M.algebra.space)
    assert validate_cdga_morphism(ident).ok

    xi = space.element("x", 5)
    twisted, iso = twist(g, xi)
    Mt = chevalley_eilenberg(twisted, 3)
    Phi = ce_model_of_morphism(iso, Mt, M)
    # generator dual to x picks up the constant -⟨x, ξ⟩
    assert Phi.f.column(Mt.gen_of["x"]).coefficient("1") == -5
    assert validate_cdga_morphism(Phi).ok


def test_ce_contravariance_on_twist_chain():
    g = abelian_algebra([("x", -1), ("y", -2)],
                        d={"x": None} if False else None)
    g1, m1 = twist(g, g.space.element("x", 2))
    g2, m2 = twist(g1, g1.space.element("x", -1))
    M0 = chevalley_eilenberg(g, 3)
    M1 = chevalley_eilenberg(g1, 3)
    M2 = chevalley_eilenberg(g2, 3)
    lhs = ce_model_of_morphism(compose(m2, m1), M2, M0)
    rhs = compose_cdga(ce_model_of_morphism(m1, M1, M0),
                       ce_model_of_morphism(m2, M2, M1))
    assert lhs.f == rhs.f


# -- the adjunction ------------------------------------------------------------


def heisenberg_g():
    space = GradedSpace([("a", -1), ("b", -1), ("c", -2)])
    return CurvedLieAlgebra(space, {("a", "b"): space.element("c")},
                            LinearMap.zero(space, space, -1),
                            space.element("c", 1))


def test_adjunction_round_trip_on_generator_data():
    g = heisenberg_g()
    A = contractible_algebra()
    ce = chevalley_eilenberg(g, 3)
    flm = free_lie_model(A, cap=3)
    # arbitrary degree-correct generator assignment for φ: C(g) -> A
    images = {}
    for x in g.space.names():
        gen = ce.gen_of[x]
        deg = ce.algebra.space.degree(gen)
        val = A.space.zero()
        for n, dn in A.space.basis:
            if dn == deg:
                val = val + A.space.element(n, 1 + A.space.index(n))
        images[gen] = val
    fmap = extend_algebra_morphism(ce, images, A)
    phi = CdgaMorphism(ce.algebra, A, fmap)
    m = adjunction_forward(phi, ce, flm)
    phi_back = adjunction_backward(m, flm, ce)
    for gen in images:
        assert phi_back.f.column(gen) == phi.f.column(gen)

    m_back = adjunction_forward(phi_back, ce, flm)
    assert m_back.f == m.f and m_back.alpha == m.alpha


def test_adjunction_transports_validity():
    # identity of C(g) is a chain algebra map; its image must be a valid
    # curved morphism (this is the counit)
    g = heisenberg_g()
    counit, ce, flm = counit_map(g, weight_cap=3, word_cap=3)
    assert validate_morphism(counit).ok
    # weight-one collapse: generators dual to single carrier letters map back
    for x in g.space.names():
        gen = flm.gen_of[ce.gen_of[x]]
        assert counit.f.column(gen) == g.space.element(x)
    assert counit.alpha.is_zero()


def test_counit_of_abelian_point_is_weight_one_projection():
    g = abelian_algebra([("x", -1)])
    counit, ce, flm = counit_map(g, weight_cap=3, word_cap=3)
    assert validate_morphism(counit).ok
    for name, w in flm.truncation.weights.items():
        col = counit.f.column(name)
        if w >= 2:
            assert col.is_zero()


def test_unit_map_of_sphere_cohomology():
    A = sphere_cohomology()
    unit, flm, ce = unit_map(A, weight_cap=3, word_cap=3)
    assert validate_cdga_morphism(unit).ok
    # the generator dual to the Lie generator v = Σu* maps onto u
    vname = flm.gen_of["u"]
    assert unit.f.column(ce.gen_of[vname]) == A.space.element("u")


def test_unit_map_of_two_points():
    A = two_points_algebra()
    unit, flm, ce = unit_map(A, weight_cap=3, word_cap=3)
    assert validate_cdga_morphism(unit).ok


def test_adjunction_naturality_in_the_algebra():
    # backward((g,γ) ∘ L(ψ)) = ψ ∘ backward(g,γ) for ψ: A -> B
    B = two_points_algebra()
    fmap = LinearMap(B.space, B.space, 0, {
        "1": B.space.element("1"),
        "u": B.space.element("1", 1),
    })
    psi = CdgaMorphism(B, B, fmap)
    assert validate_cdga_morphism(psi).ok
    g = heisenberg_g()
    ce = chevalley_eilenberg(g, 3)
    flmA = free_lie_model(B, cap=3)
    flmB = free_lie_model(B, cap=3)
    # start from a curved morphism L(B) -> g obtained via forward transport
    images = {ce.gen_of["a"]: B.space.zero(),
              ce.gen_of["b"]: B.space.zero(),
              ce.gen_of["c"]: B.space.zero()}
    # degree match: generators of C(g) sit in degrees 0 (a, b) and 1 (c);
    # B is concentrated in degree 0, so only a- and b-generators can hit u/1
    images[ce.gen_of["a"]] = B.space.element("u", 2)
    images[ce.gen_of["b"]] = B.space.element("1", 3) + B.space.element("u")
    phi = CdgaMorphism(ce.algebra, B,
                       extend_algebra_morphism(ce, images, B))
    mg = adjunction_forward(phi, ce, flmB)
    lhs = adjunction_backward(compose(mg, lie_model_of_morphism(psi, flmB, flmA)),
                              flmA, ce)
    rhs = compose_cdga(psi, adjunction_backward(mg, flmB, ce))
    assert lhs.f == rhs.f
