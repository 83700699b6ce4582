"""Curved Lie algebras, curved morphisms, and their (co)limits.

A curved Lie algebra is a graded Lie algebra together with a degree -1
derivation d and a degree -2 element ω satisfying d²(x) = [ω, x] and dω = 0.
Morphisms are pairs (f, α) of a graded Lie map and a degree -1 correction.
Completed free constructions (coproducts, free models) are represented at a
finite stage by weight truncation; structurally the truncation is the
quotient by the part of the lower central series above the cap, so every
axiom that holds in the completed object holds exactly in the truncation.

Validation reports rather than raises: a loaded description may violate any
axiom and each violation is listed with a witness tuple.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .freelie import FreeLieTruncation, build_truncation
from .graded import (
    ONE,
    ZERO,
    Element,
    GradedSpace,
    LinearMap,
    Subspace,
    compose_maps,
    invert_linear_map,
    koszul_sign,
    parity,
)

HALF = Fraction(1, 2)


class CurvedLieAlgebra:
    """Structure constants, differential and curvature on a graded basis."""

    def __init__(self, space: GradedSpace, brackets: dict[tuple[str, str], Element],
                 d: LinearMap, curvature: Element,
                 weights: dict[str, int] | None = None,
                 weight_cap: int | None = None,
                 label: str = ""):
        if d.source != space or d.target != space:
            raise ValueError("differential must be an endomorphism of the carrier")
        if curvature.space != space:
            raise ValueError("curvature must live in the carrier")
        self.space = space
        self.d = d
        self.curvature = curvature
        self.weights = weights
        self.weight_cap = weight_cap
        self.label = label
        self.table: dict[tuple[str, str], Element] = {}
        for (a, b), val in brackets.items():
            if a not in space or b not in space:
                raise KeyError(f"bracket entry ({a!r}, {b!r}) uses unknown names")
            if val.space != space:
                raise ValueError("bracket values must live in the carrier")
            if not val.is_zero():
                self.table[(a, b)] = val
        # fill missing orientations by graded antisymmetry; supplied entries
        # are kept as-is so that inconsistent input is caught by validation.
        for (a, b), val in list(self.table.items()):
            if (b, a) not in self.table and a != b:
                sign = koszul_sign([(space.degree(a), space.degree(b))])
                self.table[(b, a)] = val.scale(-sign)

    @property
    def dim(self) -> int:
        return self.space.dim

    def is_dgla(self) -> bool:
        return self.curvature.is_zero()

    def bracket_basis(self, a: str, b: str) -> Element:
        return self.table.get((a, b), self.space.zero())

    def bracket(self, x: Element, y: Element) -> Element:
        out = self.space.zero()
        for a, ca in x.coeffs.items():
            for b, cb in y.coeffs.items():
                val = self.table.get((a, b))
                if val is not None:
                    out = out + val.scale(ca * cb)
        return out

    def ad(self, x: Element) -> LinearMap:
        cols = {b: self.bracket(x, self.space.element(b)) for b, _ in self.space.basis}
        deg = x.degree() if not x.is_zero() else 0
        return LinearMap(self.space, self.space, deg or 0, cols)

    def __repr__(self):
        tag = f" {self.label!r}" if self.label else ""
        return f"CurvedLieAlgebra(dim={self.dim}{tag})"


def abelian_algebra(basis: Iterable[tuple[str, int]],
                    d: dict[str, Element] | None = None,
                    curvature: dict[str, Fraction] | None = None) -> CurvedLieAlgebra:
    space = GradedSpace(basis)
    dmap = LinearMap(space, space, -1, d or {})
    omega = Element(space, curvature or {})
    return CurvedLieAlgebra(space, {}, dmap, omega)


def zero_algebra() -> CurvedLieAlgebra:
    space = GradedSpace([])
    return CurvedLieAlgebra(space, {}, LinearMap.zero(space, space, -1), space.zero())


class InitialObject:
    """Formal initial object: pure bookkeeping, carries no algebra data."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "InitialObject"


INITIAL = InitialObject()


@dataclass
class AxiomFailure:
    axiom: str
    witness: tuple
    detail: str


@dataclass
class ValidationReport:
    ok: bool
    failures: list[AxiomFailure] = field(default_factory=list)
    weight_cap: int | None = None

    def failed_axioms(self) -> set[str]:
        return {f.axiom for f in self.failures}

    def to_json(self) -> dict:
        return {
            "verdict": "valid" if self.ok else "invalid",
            "caps": {"weight": self.weight_cap},
            "failures": [
                {"axiom": f.axiom, "witness": list(f.witness), "detail": f.detail}
                for f in self.failures
            ],
        }


def validate_algebra(g: CurvedLieAlgebra, check_jacobi: bool = True) -> ValidationReport:
    """Check every defining axiom exactly; never raises, reports witnesses."""
    fails: list[AxiomFailure] = []
    space = g.space
    names = list(space.names())

    for (a, b), val in sorted(g.table.items()):
        want = space.degree(a) + space.degree(b)
        for m in val.coeffs:
            if space.degree(m) != want:
                fails.append(AxiomFailure(
                    "bracket-degree", (a, b, m),
                    f"[{a},{b}] has a component in degree {space.degree(m)}, "
                    f"expected {want}"))
    for (a, m) in g.d.degree_violations():
        fails.append(AxiomFailure(
            "differential-degree", (a, m),
            f"d({a}) has a component {m} off the degree -1 shift"))
    if not g.curvature.is_zero():
        if not g.curvature.is_homogeneous() or g.curvature.degree() != -2:
            fails.append(AxiomFailure(
                "curvature-degree", (), "curvature is not homogeneous of degree -2"))

    for a in names:
        for b in names:
            sign = koszul_sign([(space.degree(a), space.degree(b))])
            lhs = g.bracket_basis(a, b)
            rhs = g.bracket_basis(b, a).scale(-sign)
            if lhs != rhs:
                fails.append(AxiomFailure(
                    "antisymmetry", (a, b),
                    f"[{a},{b}] != -(-1)^(|{a}||{b}|)[{b},{a}]"))
                break

    if check_jacobi:
        elts = {n: space.element(n) for n in names}
        for a in names:
            for b in names:
                for c in names:
                    sign = koszul_sign([(space.degree(a), space.degree(b))])
                    lhs = g.bracket(elts[a], g.bracket(elts[b], elts[c]))
                    rhs = g.bracket(g.bracket(elts[a], elts[b]), elts[c]) + \
                        g.bracket(elts[b], g.bracket(elts[a], elts[c])).scale(sign)
                    if lhs != rhs:
                        fails.append(AxiomFailure(
                            "jacobi", (a, b, c),
                            f"graded Jacobi fails on ({a},{b},{c})"))
        # report at most the first few Jacobi failures verbosely
        jac = [f for f in fails if f.axiom == "jacobi"]
        if len(jac) > 5:
            fails = [f for f in fails if f.axiom != "jacobi"] + jac[:5]

    for a in names:
        for b in names:
            da = g.d.column(a)
            db = g.d.column(b)
            lhs = g.d.apply(g.bracket_basis(a, b))
            rhs = g.bracket(da, space.element(b)) + \
                g.bracket(space.element(a), db).scale(koszul_sign([(1, space.degree(a))]))
            if lhs != rhs:
                fails.append(AxiomFailure(
                    "derivation", (a, b),
                    f"d is not a derivation on ({a},{b})"))
                break

    for a in names:
        lhs = g.d.apply(g.d.column(a))
        rhs = g.bracket(g.curvature, space.element(a))
        if lhs != rhs:
            fails.append(AxiomFailure(
                "d-squared", (a,),
                f"d²({a}) != [ω, {a}]"))

    if not g.d.apply(g.curvature).is_zero():
        fails.append(AxiomFailure("flat-curvature", (), "dω != 0"))

    return ValidationReport(ok=not fails, failures=fails, weight_cap=g.weight_cap)


class CurvedMorphism:
    """Pair (f, α): a graded Lie map plus a degree -1 correction in the target."""

    def __init__(self, source: CurvedLieAlgebra, target: CurvedLieAlgebra,
                 f: LinearMap, alpha: Element):
        if f.source != source.space or f.target != target.space:
            raise ValueError("underlying map must go from source to target carrier")
        if f.shift != 0:
            raise ValueError("underlying map must have degree 0")
        if alpha.space != target.space:
            raise ValueError("correction must live in the target")
        self.source = source
        self.target = target
        self.f = f
        self.alpha = alpha

    @classmethod
    def strict(cls, source: CurvedLieAlgebra, target: CurvedLieAlgebra,
               f: LinearMap) -> "CurvedMorphism":
        return cls(source, target, f, target.space.zero())

    @classmethod
    def identity(cls, g: CurvedLieAlgebra) -> "CurvedMorphism":
        return cls(g, g, LinearMap.identity(g.space), g.space.zero())

    def is_strict(self) -> bool:
        return self.alpha.is_zero()

    def image_of_element(self, x: Element) -> Element:
        """The set-level image f(x) - α; the zero of the source goes to -α."""
        return self.f.apply(x) - self.alpha

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, CurvedMorphism)
            and self.source.space == other.source.space
            and self.target.space == other.target.space
            and self.f == other.f
            and self.alpha == other.alpha
        )

    def __repr__(self):
        strictness = "strict" if self.is_strict() else "curved"
        return f"CurvedMorphism({strictness}, {self.f!r})"


def validate_morphism(m: CurvedMorphism) -> ValidationReport:
    fails: list[AxiomFailure] = []
    g, h = m.source, m.target

    if not m.alpha.is_zero():
        if not m.alpha.is_homogeneous() or m.alpha.degree() != -1:
            fails.append(AxiomFailure(
                "alpha-degree", (), "correction term is not of degree -1"))
    for (a, b) in m.f.degree_violations():
        fails.append(AxiomFailure(
            "map-degree", (a, b), f"f({a}) hits {b} off degree 0"))

    names = list(g.space.names())
    for a in names:
        for b in names:
            lhs = m.f.apply(g.bracket_basis(a, b))
            rhs = h.bracket(m.f.column(a), m.f.column(b))
            if lhs != rhs:
                fails.append(AxiomFailure(
                    "lie-map", (a, b), f"f[{a},{b}] != [f{a}, f{b}]"))
                break

    for a in names:
        lhs = h.d.apply(m.f.column(a))
        rhs = m.f.apply(g.d.column(a)) + h.bracket(m.alpha, m.f.column(a))
        if lhs != rhs:
            fails.append(AxiomFailure(
                "differential-intertwine", (a,),
                f"d f({a}) != f(d {a}) + [α, f({a})]"))

    lhs = h.curvature
    rhs = m.f.apply(g.curvature) + h.d.apply(m.alpha) - \
        h.bracket(m.alpha, m.alpha).scale(HALF)
    if lhs != rhs:
        fails.append(AxiomFailure(
            "curvature-equation", (),
            "ω_target != f(ω_source) + dα - ½[α,α]"))

    cap = h.weight_cap if h.weight_cap is not None else g.weight_cap
    return ValidationReport(ok=not fails, failures=fails, weight_cap=cap)


def compose(m2: CurvedMorphism, m1: CurvedMorphism) -> CurvedMorphism:
    """(f, α)∘(g, β) = (f∘g, α + f(β)); m2 after m1."""
    if m1.target.space != m2.source.space:
        raise ValueError("morphisms are not composable")
    return CurvedMorphism(
        m1.source, m2.target,
        compose_maps(m2.f, m1.f),
        m2.alpha + m2.f.apply(m1.alpha),
    )


def invert(m: CurvedMorphism) -> CurvedMorphism:
    """(f, α)^{-1} = (f^{-1}, -f^{-1}(α)); requires f bijective per degree."""
    finv = invert_linear_map(m.f)
    return CurvedMorphism(m.target, m.source, finv, -finv.apply(m.alpha))


def twist(g: CurvedLieAlgebra, xi: Element) -> tuple[CurvedLieAlgebra, CurvedMorphism]:
    """Twisted algebra (𝔤, d + ad_ξ, ω + dξ + ½[ξ,ξ]) and the isomorphism (id, ξ)."""
    if xi.space != g.space:
        raise ValueError("twisting element must live in the algebra")
    if not xi.is_zero() and (not xi.is_homogeneous() or xi.degree() != -1):
        raise ValueError("twisting element must be homogeneous of degree -1")
    cols = {}
    for n, _ in g.space.basis:
        cols[n] = g.d.column(n) + g.bracket(xi, g.space.element(n))
    new_d = LinearMap(g.space, g.space, -1, cols)
    new_curv = g.curvature + g.d.apply(xi) + g.bracket(xi, xi).scale(HALF)
    twisted = CurvedLieAlgebra(g.space, dict(g.table), new_d, new_curv,
                               weights=g.weights, weight_cap=g.weight_cap,
                               label=f"{g.label}^ξ" if g.label else "")
    morphism = CurvedMorphism(g, twisted, LinearMap.identity(g.space), xi)
    return twisted, morphism


# ---------------------------------------------------------------------------
# Limits


def product(gs: Sequence[CurvedLieAlgebra]) -> tuple[CurvedLieAlgebra, list[CurvedMorphism]]:
    """Componentwise structure on the direct sum carrier, with projections."""
    if len(gs) == 1:
        only = gs[0]
        return only, [CurvedMorphism.identity(only)]
    basis = []
    for i, g in enumerate(gs):
        basis.extend((f"{i}:{n}", d) for n, d in g.space.basis)
    space = GradedSpace(basis)

    def inj(i: int, e: Element) -> Element:
        return Element(space, {f"{i}:{n}": c for n, c in e.coeffs.items()})

    table = {}
    for i, g in enumerate(gs):
        for (a, b), val in g.table.items():
            table[(f"{i}:{a}", f"{i}:{b}")] = inj(i, val)
    d = LinearMap(space, space, -1, {
        f"{i}:{n}": inj(i, g.d.column(n))
        for i, g in enumerate(gs) for n, _ in g.space.basis
    })
    curv = space.zero()
    for i, g in enumerate(gs):
        curv = curv + inj(i, g.curvature)
    prod = CurvedLieAlgebra(space, table, d, curv)
    projections = []
    for i, g in enumerate(gs):
        cols = {f"{i}:{n}": g.space.element(n) for n, _ in g.space.basis}
        projections.append(CurvedMorphism.strict(
            prod, g, LinearMap(space, g.space, 0, cols)))
    return prod, projections


def product_induced_map(prod: CurvedLieAlgebra, projections: list[CurvedMorphism],
                        maps: Sequence[CurvedMorphism]) -> CurvedMorphism:
    """The universal map T -> ∏ g_i induced by curved maps (f_i, α_i)."""
    if not maps:
        raise ValueError("need at least one component map")
    source = maps[0].source
    space = prod.space
    cols = {}
    for n, _ in source.space.basis:
        val = space.zero()
        for i, m in enumerate(maps):
            val = val + Element(space, {f"{i}:{k}": c
                                        for k, c in m.f.column(n).coeffs.items()})
        cols[n] = val
    alpha = space.zero()
    for i, m in enumerate(maps):
        alpha = alpha + Element(space, {f"{i}:{k}": c
                                        for k, c in m.alpha.coeffs.items()})
    return CurvedMorphism(source, prod, LinearMap(source.space, space, 0, cols), alpha)


def subalgebra_on_subspace(g: CurvedLieAlgebra, V: Subspace,
                           prefix: str = "e") -> tuple[CurvedLieAlgebra, CurvedMorphism]:
    """Curved structure induced on a bracket- and d-closed subspace containing ω."""
    reps = V.basis_elements()
    names = []
    for k, r in enumerate(reps):
        lead = r.support()[0]
        names.append((f"{prefix}{k}:{lead}", r.degree()))
    space = GradedSpace(names)

    def express(x: Element) -> Element:
        # coordinates over the echelon representatives, per degree
        out: dict[str, Fraction] = {}
        remaining = x
        for (nm, _), rep in zip(names, reps):
            lead = rep.support()[0]
            c = remaining.coefficient(lead)
            if c != 0:
                out[nm] = c
                remaining = remaining - rep.scale(c)
        if not remaining.is_zero():
            raise ArithmeticError("element does not lie in the subspace")
        return Element(space, out)

    table = {}
    for i, (ni, _) in enumerate(names):
        for j, (nj, _) in enumerate(names):
            val = g.bracket(reps[i], reps[j])
            if not val.is_zero():
                table[(ni, nj)] = express(val)
    d = LinearMap(space, space, -1, {
        ni: express(g.d.apply(reps[i])) for i, (ni, _) in enumerate(names)
    })
    curv = express(g.curvature)
    sub = CurvedLieAlgebra(space, table, d, curv)
    inclusion = CurvedMorphism.strict(
        sub, g, LinearMap(space, g.space, 0,
                          {ni: reps[i] for i, (ni, _) in enumerate(names)}))
    return sub, inclusion


def equaliser(m1: CurvedMorphism, m2: CurvedMorphism):
    """Largest curved subalgebra on which the set-level images agree.

    With differing correction terms no subalgebra can agree (zero already
    disagrees), and the answer is the formal initial object.  Otherwise the
    agreement set is the kernel of f1 - f2, which is automatically closed
    under the bracket and the differential; the stabilisation loop below is
    the defensive algorithmic form of that statement.
    """
    if m1.source.space != m2.source.space or m1.target.space != m2.target.space:
        raise ValueError("equaliser needs a parallel pair")
    g = m1.source
    if m1.alpha != m2.alpha:
        return INITIAL, None
    diff = m1.f - m2.f
    from .graded import kernel as kernel_of

    ker_space, emb = kernel_of(diff)
    V = Subspace.spanned_by(g.space, [emb.column(n) for n in ker_space.names()])

    while True:
        reps = V.basis_elements()
        keep = []
        for r in reps:
            if not V.contains(g.d.apply(r)):
                continue
            if any(not V.contains(g.bracket(r, s)) for s in reps):
                continue
            keep.append(r)
        W = Subspace.spanned_by(g.space, keep)
        if W.dim == V.dim:
            break
        V = W

    if not V.contains(g.curvature):
        # cannot happen when the parallel pair is made of valid morphisms;
        # reported as the initial object for robustness on invalid input.
        return INITIAL, None
    return subalgebra_on_subspace(g, V)


# ---------------------------------------------------------------------------
# Colimits


@dataclass
class CoproductStage:
    """Finite stage of a coproduct: the truncated free algebra on the letters
    together with the projection onto the quotient by the relation ideal."""
    truncation: FreeLieTruncation
    free_algebra: CurvedLieAlgebra
    projection: CurvedMorphism  # strict, free stage -> coproduct


def coproduct(g: CurvedLieAlgebra, h: CurvedLieAlgebra, cap: int = 4):
    """Weight-truncated free product with a formal degree -1 element x.

    Underlying algebra: the free product of the graded Lie algebras g and h
    with one extra letter x, i.e. the free Lie algebra on all basis letters
    modulo the ideal identifying free brackets of letters from the same
    factor with that factor's structure constants.  Truncation above `cap`
    is the quotient by the corresponding stage of the lower central series.
    Differential rules: d restricted to g is d_g, restricted to h it is
    d_h - ad_x, and dx = ω_h - ω_g - ½[x,x].  The curvature is ω_g.
    Returns (coproduct, inclusion_g, inclusion_h, stage).
    """
    if cap < 2:
        raise ValueError("weight cap too small to express dx (needs cap >= 2)")
    gens = [(f"g.{n}", d) for n, d in g.space.basis]
    gens += [(f"h.{n}", d) for n, d in h.space.basis]
    gens += [("x", -1)]
    gen_space = GradedSpace(gens)
    T = build_truncation(gen_space, cap)

    def push_g(e: Element) -> Element:
        return Element(T.space, {f"g.{n}": c for n, c in e.coeffs.items()})

    def push_h(e: Element) -> Element:
        return Element(T.space, {f"h.{n}": c for n, c in e.coeffs.items()})

    x = T.space.element("x")
    d_values: dict[str, Element] = {}
    for n, _ in g.space.basis:
        d_values[f"g.{n}"] = push_g(g.d.column(n))
    for n, _ in h.space.basis:
        d_values[f"h.{n}"] = push_h(h.d.column(n)) - T.bracket(x, T.space.element(f"h.{n}"))
    d_values["x"] = push_h(h.curvature) - push_g(g.curvature) - T.bracket(x, x).scale(HALF)

    d = T.extend_derivation(d_values, -1)
    omega = push_g(g.curvature)
    free_alg = truncation_algebra(T, d, omega, label="coproduct-free-stage")

    # relation ideal: free brackets of same-factor letters agree with the
    # factor's structure constants
    rels = []
    for a in g.space.names():
        for b in g.space.names():
            rel = T.bracket(T.space.element(f"g.{a}"), T.space.element(f"g.{b}")) \
                - push_g(g.bracket_basis(a, b))
            if not rel.is_zero():
                rels.append(rel)
    for a in h.space.names():
        for b in h.space.names():
            rel = T.bracket(T.space.element(f"h.{a}"), T.space.element(f"h.{b}")) \
                - push_h(h.bracket_basis(a, b))
            if not rel.is_zero():
                rels.append(rel)

    ideal = Subspace(free_alg.space)
    queue = []
    for r in rels:
        if ideal.add(r):
            queue.append(r)
    while queue:
        v = queue.pop()
        for part in v.homogeneous_components().values():
            dv = free_alg.d.apply(part)
            if not dv.is_zero() and ideal.add(dv):
                queue.append(dv)
            for b in free_alg.space.names():
                w = free_alg.bracket(part, free_alg.space.element(b))
                if not w.is_zero() and ideal.add(w):
                    queue.append(w)

    algebra, proj = quotient_by_ideal(free_alg, ideal.basis_elements(),
                                      prefer_late_pivots=True)
    algebra.label = "coproduct"
    algebra.weight_cap = cap
    stage = CoproductStage(truncation=T, free_algebra=free_alg, projection=proj)

    incl_g = CurvedMorphism.strict(
        g, algebra,
        LinearMap(g.space, algebra.space, 0,
                  {n: proj.f.apply(push_g(g.space.element(n)))
                   for n in g.space.names()}))
    incl_h = CurvedMorphism(
        h, algebra,
        LinearMap(h.space, algebra.space, 0,
                  {n: proj.f.apply(push_h(h.space.element(n)))
                   for n in h.space.names()}),
        -proj.f.apply(x))
    return algebra, incl_g, incl_h, stage


def truncation_algebra(T: FreeLieTruncation, d: LinearMap, curvature: Element,
                       label: str = "") -> CurvedLieAlgebra:
    """Structure-constant table of a free truncation with chosen (d, ω)."""
    table = {}
    for m1 in T.monomials:
        e1 = T.space.element(m1.name)
        for m2 in T.monomials:
            if m1.weight + m2.weight > T.cap:
                continue
            val = T.bracket(e1, T.space.element(m2.name))
            if not val.is_zero():
                table[(m1.name, m2.name)] = val
    return CurvedLieAlgebra(T.space, table, d, curvature,
                            weights=dict(T.weights), weight_cap=T.cap, label=label)


def coproduct_induced_map(algebra: CurvedLieAlgebra, stage: CoproductStage,
                          mg: CurvedMorphism, mh: CurvedMorphism) -> CurvedMorphism:
    """Universal map out of a coproduct: restricts to the given morphisms and
    sends the formal letter to α - β; the whole morphism is (f, α)."""
    X = mg.target
    if mh.target.space != X.space:
        raise ValueError("component morphisms must share a target")
    values: dict[str, Element] = {}
    for n, _ in mg.source.space.basis:
        values[f"g.{n}"] = mg.f.column(n)
    for n, _ in mh.source.space.basis:
        values[f"h.{n}"] = mh.f.column(n)
    values["x"] = mg.alpha - mh.alpha
    free_f = stage.truncation.extend_lie_morphism(values, X.space, X.bracket)
    # relations map to zero because each component is a Lie morphism, so the
    # extension descends to the quotient along the surviving basis names.
    f = LinearMap(algebra.space, X.space, 0,
                  {n: free_f.column(n) for n in algebra.space.names()})
    return CurvedMorphism(algebra, X, f, mg.alpha)


def coproduct_symmetry(g: CurvedLieAlgebra, h: CurvedLieAlgebra, cap: int = 4):
    """The curved isomorphism (f, -x): g ⊔ h -> h ⊔ g fixing letters, negating x."""
    left, _, _, Sl = coproduct(g, h, cap)
    right, _, _, Sr = coproduct(h, g, cap)

    def swap(source_stage: CoproductStage, src_alg: CurvedLieAlgebra,
             tgt_stage: CoproductStage, tgt_alg: CurvedLieAlgebra,
             first: CurvedLieAlgebra, second: CurvedLieAlgebra) -> CurvedMorphism:
        projT = tgt_stage.projection.f
        Tt = tgt_stage.truncation
        values: dict[str, Element] = {}
        for n, _ in first.space.basis:
            values[f"g.{n}"] = projT.apply(Tt.space.element(f"h.{n}"))
        for n, _ in second.space.basis:
            values[f"h.{n}"] = projT.apply(Tt.space.element(f"g.{n}"))
        x_class = projT.apply(Tt.space.element("x"))
        values["x"] = -x_class
        free_f = source_stage.truncation.extend_lie_morphism(
            values, tgt_alg.space, tgt_alg.bracket)
        f = LinearMap(src_alg.space, tgt_alg.space, 0,
                      {n: free_f.column(n) for n in src_alg.space.names()})
        return CurvedMorphism(src_alg, tgt_alg, f, -x_class)

    fwd = swap(Sl, left, Sr, right, g, h)
    back = swap(Sr, right, Sl, left, h, g)
    return fwd, back


def coequaliser(m1: CurvedMorphism, m2: CurvedMorphism) -> tuple[CurvedLieAlgebra, CurvedMorphism]:
    """Quotient of the target by the d-stable ideal generated by the
    differences f1(x) - f2(x) and α1 - α2."""
    if m1.source.space != m2.source.space or m1.target.space != m2.target.space:
        raise ValueError("coequaliser needs a parallel pair")
    h = m1.target
    gens = [m1.f.column(n) - m2.f.column(n) for n in m1.source.space.names()]
    gens.append(m1.alpha - m2.alpha)
    ideal = Subspace(h.space)
    queue = [e for e in gens if not e.is_zero()]
    for e in queue:
        ideal.add(e)
    while queue:
        v = queue.pop()
        for part in v.homogeneous_components().values():
            dv = h.d.apply(part)
            if not dv.is_zero() and ideal.add(dv):
                queue.append(dv)
            for b in h.space.names():
                w = h.bracket(part, h.space.element(b))
                if not w.is_zero() and ideal.add(w):
                    queue.append(w)
    return quotient_by_ideal(h, ideal.basis_elements())


def quotient_by_ideal(h: CurvedLieAlgebra, ideal_elements: list[Element],
                      prefer_late_pivots: bool = False
                      ) -> tuple[CurvedLieAlgebra, CurvedMorphism]:
    """Quotient algebra on the complement of a d-stable Lie ideal.

    With `prefer_late_pivots`, elimination removes basis vectors late in the
    basis order first, so (for weight-ordered carriers) low-weight
    representatives survive.
    """
    from .graded import _Echelon

    order: dict[int, list[str]] = {}
    ech: dict[int, _Echelon] = {}
    for dg in h.space.degrees():
        names = h.space.names_in_degree(dg)
        order[dg] = list(reversed(names)) if prefer_late_pivots else list(names)
        ech[dg] = _Echelon(len(names))

    def coords(part: Element, dg: int) -> list[Fraction]:
        return [part.coefficient(n) for n in order[dg]]

    for e in ideal_elements:
        for dg, part in e.homogeneous_components().items():
            ech[dg].insert(coords(part, dg))

    pivot_names: set[str] = set()
    for dg, e_ in ech.items():
        for p in e_.pivots:
            pivot_names.add(order[dg][p])
    kept = [(n, deg) for n, deg in h.space.basis if n not in pivot_names]
    qspace = GradedSpace(kept)

    def project(x: Element) -> Element:
        out: dict[str, Fraction] = {}
        for dg, part in x.homogeneous_components().items():
            vec = ech[dg].reduce(coords(part, dg))
            for n, c in zip(order[dg], vec):
                if c != 0:
                    out[n] = c
        return Element(qspace, out)

    table = {}
    for (a, b), val in h.table.items():
        if a in pivot_names or b in pivot_names:
            continue
        pv = project(val)
        if not pv.is_zero():
            table[(a, b)] = pv
    # representatives of surviving names differ from the raw basis vector
    # only by ideal terms, so projecting the raw structure constants is exact.
    d = LinearMap(qspace, qspace, -1, {
        n: project(h.d.column(n)) for n, _ in kept
    })
    curv = project(h.curvature)
    q = CurvedLieAlgebra(qspace, table, d, curv)
    proj = CurvedMorphism.strict(
        h, q, LinearMap(h.space, qspace, 0,
                        {n: project(h.space.element(n)) for n in h.space.names()}))
    return q, proj


# ---------------------------------------------------------------------------
# Filtrations


@dataclass
class Filtration:
    algebra: CurvedLieAlgebra
    subspaces: list[Subspace]  # F_1, F_2, ..., last entry is the stable tail
    respects_bracket: bool = False
    respects_differential: bool = False
    complete_at_truncation: bool = False
    admissible: bool = False

    def depth(self) -> int:
        return len(self.subspaces)

    def stage(self, i: int) -> Subspace:
        """F_i, with the convention that indices beyond the list hit the tail."""
        if i < 1:
            raise ValueError("filtrations are positively indexed")
        if i <= len(self.subspaces):
            return self.subspaces[i - 1]
        return self.subspaces[-1]

    def check_flags(self) -> "Filtration":
        g = self.algebra
        n = len(self.subspaces)
        ok_br = True
        for i in range(1, n + 1):
            for j in range(i, n + 1):
                Fi = self.stage(i).basis_elements()
                Fj = self.stage(j).basis_elements()
                tgt = self.stage(i + j)
                for u in Fi:
                    for v in Fj:
                        if not tgt.contains(g.bracket(u, v)):
                            ok_br = False
        ok_d = all(
            self.stage(i).contains(g.d.apply(u))
            for i in range(1, n + 1)
            for u in self.stage(i).basis_elements()
        )
        tail_zero = self.subspaces[-1].dim == 0
        self.respects_bracket = ok_br
        self.respects_differential = ok_d
        self.complete_at_truncation = tail_zero
        if ok_br and ok_d:
            gr = associated_graded(self.algebra, self).algebra
            gr_ok = all(gr.d.apply(col).is_zero() for col in gr.d.cols.values())
            self.admissible = tail_zero and gr_ok
        else:
            self.admissible = False
        return self


def lower_central_series(g: CurvedLieAlgebra) -> Filtration:
    """F_1 = 𝔤, F_{i+1} = [F_i, 𝔤], computed until stabilisation."""
    stages = [Subspace.full(g.space)]
    while True:
        prev = stages[-1]
        nxt = Subspace(g.space)
        for u in prev.basis_elements():
            for b in g.space.names():
                w = g.bracket(u, g.space.element(b))
                if not w.is_zero():
                    nxt.add(w)
        if nxt.dim == prev.dim:
            stages.append(nxt)
            break
        stages.append(nxt)
        if nxt.dim == 0:
            break
    filt = Filtration(g, stages)
    return filt.check_flags()


def weight_filtration(g: CurvedLieAlgebra) -> Filtration:
    """For weight-graded carriers: F_i = span of basis of weight >= i."""
    if g.weights is None:
        raise ValueError("algebra carries no weight grading")
    top = max(g.weights.values(), default=0)
    stages = []
    for i in range(1, top + 2):
        stages.append(Subspace.spanned_by(
            g.space,
            [g.space.element(n) for n, _ in g.space.basis if g.weights[n] >= i]))
    return Filtration(g, stages).check_flags()


@dataclass
class GrAlgebra:
    """Associated graded object with its weight bookkeeping and projections."""

    algebra: CurvedLieAlgebra
    weights: dict[str, int]
    stages: int
    reps: list[tuple[str, int, int, Element]]
    _project: object = None

    def project(self, x: Element, weight: int) -> Element:
        return self._project(x, weight)

    def weight_piece(self, w: int) -> list[str]:
        return [n for n, ww in self.weights.items() if ww == w]


def associated_graded(g: CurvedLieAlgebra, filt: Filtration) -> GrAlgebra:
    """gr = ⊕ F_i / F_{i+1} with the induced bracket and differential, and
    curvature set to zero (the admissibility check is d² = 0 on gr)."""
    n = len(filt.subspaces)
    reps: list[tuple[str, int, int, Element]] = []  # (name, weight, degree, rep)
    reduced_reps: dict[int, list[tuple[str, Element]]] = {}
    for i in range(1, n):
        Fi, Fi1 = filt.stage(i), filt.stage(i + 1)
        ech = Fi1.copy()
        k = 0
        for e in Fi.basis_elements():
            r = ech.reduce(e)
            if not r.is_zero():
                ech.add(r)
                lead = r.support()[0]
                r = r.scale(1 / r.coefficient(lead))
                name = f"w{i}.{k}:{lead}"
                reps.append((name, i, r.degree(), r))
                reduced_reps.setdefault(i, []).append(
                    (name, filt.stage(i + 1).reduce(r)))
                k += 1
    space = GradedSpace((nm, d) for nm, _, d, _ in reps)
    weights = {nm: w for nm, w, _, _ in reps}

    def project(x: Element, weight: int) -> Element:
        """Class of x ∈ F_weight in gr_weight coordinates, by exact solve
        of x = Σ c_i r_i (mod F_{weight+1})."""
        if weight >= n:
            return space.zero()
        target = filt.stage(weight + 1).reduce(x)
        out: dict[str, Fraction] = {}
        for nm, rbar in reduced_reps.get(weight, []):
            lead = rbar.support()[0]
            c = target.coefficient(lead) / rbar.coefficient(lead)
            if c != 0:
                out[nm] = c
                target = target - rbar.scale(c)
        if not target.is_zero():
            raise ArithmeticError("projection residue escapes the filtration")
        return Element(space, out)

    table = {}
    for nm1, w1, _, r1 in reps:
        for nm2, w2, _, r2 in reps:
            val = g.bracket(r1, r2)
            if val.is_zero():
                continue
            pv = project(val, w1 + w2)
            if not pv.is_zero():
                table[(nm1, nm2)] = pv
    d = LinearMap(space, space, -1, {
        nm: project(g.d.apply(rep), w) for nm, w, _, rep in reps
    })
    gr = CurvedLieAlgebra(space, table, d, space.zero(),
                          weights=weights, label="gr")
    return GrAlgebra(algebra=gr, weights=weights, stages=n - 1, reps=reps,
                     _project=project)
