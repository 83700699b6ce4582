"""The two model functors and the adjunction between them.

One direction sends a unital cdga A with a chosen retraction split to the
completed free graded Lie algebra on the shifted dual of the kernel, with
differential dual to (d₊, m₊) and curvature dual to (d_k, m_k).  The other
direction sends a curved Lie algebra to the symmetric algebra on the shifted
dual of its carrier with a three-part differential (curvature, differential,
bracket).  Both are realised at finite caps: weight for the Lie side, word
length for the commutative side.

Degree bookkeeping (homological): an algebra element a of degree j yields a
Lie generator of degree -j-1, and a Lie element x of degree j yields a
commutative generator of degree -j-1.  These are the unique assignments
that make a degree-0 generator pairing out of the adjunction
Hom(C(g), A) = Hom(L(A), g) and identify MC elements of g⊗A with chain
algebra maps C(g) -> A.  All Koszul signs below are forced from the same
identification.

Word-cap soundness: for a curved input the commutative model's
differential has a word-lowering component, so the top word length is an
unsound band; d² = 0 and the Leibniz rule are asserted strictly below it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .cdga import Cdga, RetractionSplit, split as make_split
from .curved import (
    AxiomFailure,
    CurvedLieAlgebra,
    CurvedMorphism,
    ValidationReport,
    truncation_algebra,
)
from .freelie import FreeLieTruncation, build_truncation
from .graded import (
    ONE,
    ZERO,
    Element,
    GradedSpace,
    LinearMap,
    koszul_sign,
    parity,
)

HALF = Fraction(1, 2)


def _gen_name(name: str) -> str:
    return f"Σ{name}*"


# ---------------------------------------------------------------------------
# Free Lie model of a cdga


@dataclass
class FreeLieModel:
    """Completed free Lie model of a split cdga, truncated at `cap`."""

    split: RetractionSplit
    cap: int
    truncation: FreeLieTruncation = field(init=False)
    algebra: CurvedLieAlgebra = field(init=False)
    gen_of: dict[str, str] = field(init=False)  # A₊ name -> generator name

    def __post_init__(self):
        s = self.split
        plus = s.plus
        gens = GradedSpace(
            (_gen_name(a), -plus.degree(a) - 1) for a in plus.names()
        )
        self.gen_of = {a: _gen_name(a) for a in plus.names()}
        T = build_truncation(gens, self.cap)
        self.truncation = T

        dvals = {g: T.space.zero() for g in gens.names()}
        omega = T.space.zero()
        for b in plus.names():
            sb = koszul_sign([(plus.degree(b), 1)])
            col = s.d_plus.column(b)
            for a, coef in col.coeffs.items():
                dvals[self.gen_of[a]] = dvals[self.gen_of[a]] + \
                    T.space.element(self.gen_of[b]).scale(sb * coef)
            dk = s.d_k.get(b, ZERO)
            if dk != 0:
                omega = omega + T.space.element(self.gen_of[b]).scale(sb * dk)
        for (b, c), val in s.m_plus.items():
            sign = _pair_sign(plus.degree(b), plus.degree(c))
            br = T.bracket(T.space.element(self.gen_of[b]),
                           T.space.element(self.gen_of[c]))
            for a, coef in val.coeffs.items():
                dvals[self.gen_of[a]] = dvals[self.gen_of[a]] + \
                    br.scale(HALF * sign * coef)
        for (b, c), mk in s.m_k.items():
            sign = _pair_sign(plus.degree(b), plus.degree(c))
            br = T.bracket(T.space.element(self.gen_of[b]),
                           T.space.element(self.gen_of[c]))
            omega = omega + br.scale(HALF * sign * mk)

        d = T.extend_derivation(dvals, -1)
        self.algebra = truncation_algebra(T, d, omega, label="L-model")


def _pair_sign(db: int, dc: int) -> Fraction:
    """(-1)^(|b||c| + |b| + 1), the dualisation sign for a product pair."""
    return Fraction(-1) if parity(db * dc + db + 1) else ONE


def free_lie_model(A: Cdga, eps: dict[str, Fraction] | None = None,
                   cap: int = 4, retraction: RetractionSplit | None = None
                   ) -> FreeLieModel:
    s = retraction if retraction is not None else make_split(A, eps)
    return FreeLieModel(s, cap)


# ---------------------------------------------------------------------------
# Chevalley-Eilenberg-type model of a curved Lie algebra


@dataclass
class CEModel:
    """Symmetric-algebra model of a curved Lie algebra, word length <= cap."""

    source: CurvedLieAlgebra
    cap: int
    degree_window: tuple[int, int] | None = None
    algebra: Cdga = field(init=False)
    gen_of: dict[str, str] = field(init=False)  # carrier name -> generator name
    monomials: list[tuple[int, ...]] = field(init=False)

    def __post_init__(self):
        g = self.source
        xs = list(g.space.names())
        gen_names = [_gen_name(x) for x in xs]
        gen_degs = [-g.space.degree(x) - 1 for x in xs]
        self.gen_of = dict(zip(xs, gen_names))

        monos: list[tuple[int, ...]] = [()]
        frontier: list[tuple[int, ...]] = [()]
        for _ in range(self.cap):
            nxt = []
            for m in frontier:
                start = m[-1] if m else 0
                for i in range(start, len(xs)):
                    if m and m[-1] == i and parity(gen_degs[i]):
                        continue  # odd generators square to zero
                    nxt.append(m + (i,))
            monos.extend(nxt)
            frontier = nxt
        if self.degree_window is not None:
            lo, hi = self.degree_window
            monos = [m for m in monos
                     if lo <= sum(gen_degs[i] for i in m) <= hi or not m]
        monos.sort(key=lambda m: (len(m), m))
        self.monomials = monos

        def mono_name(m: tuple[int, ...]) -> str:
            if not m:
                return "1"
            return "·".join(gen_names[i] for i in m)

        names = {m: mono_name(m) for m in monos}
        space = GradedSpace(
            (names[m], sum(gen_degs[i] for i in m)) for m in monos
        )
        mono_set = set(monos)

        def merge(m1: tuple[int, ...], m2: tuple[int, ...]):
            if len(m1) + len(m2) > self.cap:
                return None
            inv = 0
            for u in m1:
                if not parity(gen_degs[u]):
                    continue
                for v in m2:
                    if parity(gen_degs[v]) and v < u:
                        inv += 1
            merged = tuple(sorted(m1 + m2))
            for i in range(len(merged) - 1):
                if merged[i] == merged[i + 1] and parity(gen_degs[merged[i]]):
                    return None
            if merged not in mono_set:
                return None  # pruned by the degree window
            return merged, (Fraction(-1) if inv % 2 else ONE)

        products: dict[tuple[str, str], Element] = {}
        for m1 in monos:
            for m2 in monos:
                got = merge(m1, m2)
                if got is None:
                    continue
                m, sign = got
                products[(names[m1], names[m2])] = space.element(names[m], sign)

        table_lookup = products

        def multiply(x: Element, y: Element) -> Element:
            out = space.zero()
            for a, ca in x.coeffs.items():
                for b, cb in y.coeffs.items():
                    val = table_lookup.get((a, b))
                    if val is not None:
                        out = out + val.scale(ca * cb)
            return out

        # three-part differential on generators:
        # D w_x = (-1)^(|x|+1) [ ω^x·1 + Σ_y ⟨dy⟩_x w_y
        #                       + ½ Σ_{y,z} (-1)^(|z|(1+|y|)) ⟨[y,z]⟩_x w_y w_z ]
        gen_values: list[Element] = []
        for xi, x in enumerate(xs):
            dx = g.space.degree(x)
            outer = koszul_sign([(dx + 1, 1)])
            val = space.zero()
            wx = g.curvature.coefficient(x)
            if wx != 0:
                val = val + space.element("1", wx)
            for yi, y in enumerate(xs):
                coef = g.d.column(y).coefficient(x)
                if coef != 0:
                    val = val + space.element(names[(yi,)], coef)
            for yi, y in enumerate(xs):
                dy = g.space.degree(y)
                for zi, z in enumerate(xs):
                    dz = g.space.degree(z)
                    coef = g.bracket_basis(y, z).coefficient(x)
                    if coef == 0:
                        continue
                    inner = koszul_sign([(dz, 1 + dy)])
                    pair = merge((yi,), (zi,))
                    if pair is None:
                        continue
                    m, s = pair
                    val = val + space.element(names[m], HALF * inner * s * coef)
            gen_values.append(val.scale(outer))

        dcols: dict[str, Element] = {}
        for m in monos:
            if not m:
                continue
            total = space.zero()
            sign = ONE
            for pos, i in enumerate(m):
                prefix = m[:pos]
                suffix = m[pos + 1:]
                part = multiply(space.element(names[prefix]),
                                multiply(gen_values[i],
                                         space.element(names[suffix])))
                total = total + part.scale(sign)
                if parity(gen_degs[i]):
                    sign = -sign
            if not total.is_zero():
                dcols[names[m]] = total
        d = LinearMap(space, space, -1, dcols)
        pweights = {names[m]: len(m) for m in monos}
        self.algebra = Cdga(space, "1", products, d,
                            pweights=pweights, pweight_cap=self.cap,
                            label="CE-model")

    def generator_element(self, x: str) -> Element:
        return self.algebra.space.element(self.gen_of[x])

    def validate_below_band(self) -> ValidationReport:
        """Every axiom strictly below the top word length, where truncation
        cannot interfere; d² is checked on words <= cap - 1."""
        A = self.algebra
        w = A.pweights
        fails: list[AxiomFailure] = []
        names = list(A.space.names())
        for a in names:
            for b in names:
                sign = koszul_sign([(A.space.degree(a), A.space.degree(b))])
                if A.product_basis(a, b) != A.product_basis(b, a).scale(sign):
                    fails.append(AxiomFailure("commutativity", (a, b), ""))
        for a in names:
            for b in names:
                if w[a] + w[b] > self.cap:
                    continue
                lhs = A.d.apply(A.product_basis(a, b))
                rhs = A.multiply(A.d.column(a), A.space.element(b)) + \
                    A.multiply(A.space.element(a), A.d.column(b)).scale(
                        koszul_sign([(1, A.space.degree(a))]))
                if lhs != rhs:
                    fails.append(AxiomFailure("leibniz", (a, b), "below band"))
        for a in names:
            for b in names:
                for c in names:
                    if w[a] + w[b] + w[c] > self.cap:
                        continue
                    lhs = A.multiply(A.product_basis(a, b), A.space.element(c))
                    rhs = A.multiply(A.space.element(a), A.product_basis(b, c))
                    if lhs != rhs:
                        fails.append(AxiomFailure("associativity", (a, b, c), ""))
        for a in names:
            if w[a] <= self.cap - 1:
                if not A.d.apply(A.d.column(a)).is_zero():
                    fails.append(AxiomFailure("d-squared", (a,), "below band"))
        return ValidationReport(ok=not fails, failures=fails, weight_cap=self.cap)


def chevalley_eilenberg(g: CurvedLieAlgebra, cap: int = 4,
                        degree_window: tuple[int, int] | None = None) -> CEModel:
    return CEModel(g, cap, degree_window)


# ---------------------------------------------------------------------------
# Morphisms of cdgas (enough structure for the functor calculus)


@dataclass
class CdgaMorphism:
    source: Cdga
    target: Cdga
    f: LinearMap

    def __post_init__(self):
        if self.f.source != self.source.space or self.f.target != self.target.space:
            raise ValueError("underlying map does not match source/target")
        if self.f.shift != 0:
            raise ValueError("cdga morphisms have degree 0")

    def apply(self, x: Element) -> Element:
        return self.f.apply(x)

    def __eq__(self, other):
        return (
            isinstance(other, CdgaMorphism)
            and self.source.space == other.source.space
            and self.target.space == other.target.space
            and self.f == other.f
        )


def compose_cdga(g: CdgaMorphism, f: CdgaMorphism) -> CdgaMorphism:
    if f.target.space != g.source.space:
        raise ValueError("cdga morphisms are not composable")
    from .graded import compose_maps

    return CdgaMorphism(f.source, g.target, compose_maps(g.f, f.f))


def validate_cdga_morphism(m: CdgaMorphism) -> ValidationReport:
    """Unit, multiplicativity and the chain property, below any word caps."""
    fails: list[AxiomFailure] = []
    A, B = m.source, m.target
    if m.f.column(A.unit) != B.one():
        fails.append(AxiomFailure("unit", (), "1 does not map to 1"))
    wA = A.pweights
    capA = A.pweight_cap

    def sound(*names: str) -> bool:
        if wA is None or capA is None:
            return True
        return sum(wA[n] for n in names) <= capA

    for a in A.space.names():
        for b in A.space.names():
            if not sound(a, b):
                continue
            lhs = m.f.apply(A.product_basis(a, b))
            rhs = B.multiply(m.f.column(a), m.f.column(b))
            if lhs != rhs:
                fails.append(AxiomFailure(
                    "multiplicative", (a, b), f"φ({a}·{b}) != φ({a})φ({b})"))
    for a in A.space.names():
        if wA is not None and capA is not None and wA[a] > capA - 1:
            continue
        lhs = m.f.apply(A.d.column(a))
        rhs = B.d.apply(m.f.column(a))
        if lhs != rhs:
            fails.append(AxiomFailure("chain", (a,), f"φ(d{a}) != d(φ{a})"))
    return ValidationReport(ok=not fails, failures=fails,
                            weight_cap=capA)


def extend_algebra_morphism(model: CEModel, gen_images: dict[str, Element],
                            target: Cdga) -> LinearMap:
    """Multiplicative extension of generator images over the monomial basis."""
    A = model.algebra
    cols: dict[str, Element] = {}
    gen_names = [model.gen_of[x] for x in model.source.space.names()]
    for m in model.monomials:
        if not m:
            cols["1"] = target.one()
            continue
        val = target.one()
        for i in m:
            val = target.multiply(val, gen_images[gen_names[i]])
        if not val.is_zero():
            cols["·".join(gen_names[i] for i in m)] = val
    return LinearMap(A.space, target.space, 0, cols)


# ---------------------------------------------------------------------------
# Functor action on morphisms


def lie_model_of_morphism(psi: CdgaMorphism, model_B: FreeLieModel,
                          model_A: FreeLieModel) -> CurvedMorphism:
    """Contravariant action: ψ: A -> B induces L(ψ): L(B) -> L(A).

    On generators, the Lie part is the transpose of the A₊ -> B₊ component
    of ψ, and the correction is -Σ ε_B(ψ(a₊)) · (generator of a)."""
    A_split, B_split = model_A.split, model_B.split
    if psi.source.space != A_split.algebra.space or \
       psi.target.space != B_split.algebra.space:
        raise ValueError("models do not match the morphism's endpoints")
    TA, TB = model_A.truncation, model_B.truncation
    values = {g: TA.space.zero() for g in TB.generators.names()}
    alpha = TA.space.zero()
    for a in A_split.plus.names():
        image = psi.f.apply(A_split.embed.column(a))
        va = TA.space.element(model_A.gen_of[a])
        for b, coef in image.coeffs.items():
            if b == B_split.algebra.unit:
                continue
            values[model_B.gen_of[b]] = values[model_B.gen_of[b]] + va.scale(coef)
        ek = B_split.eps_value(image)
        if ek != 0:
            alpha = alpha - va.scale(ek)
    f = TB.extend_lie_morphism(values, TA.space, TA.bracket)
    return CurvedMorphism(model_B.algebra, model_A.algebra, f, alpha)


def ce_model_of_morphism(m: CurvedMorphism, model_h: CEModel,
                         model_g: CEModel) -> CdgaMorphism:
    """Contravariant action: (f, α): g -> h induces C(h) -> C(g) with
    generator images Σ ⟨f(x)⟩_u w_x - ⟨α⟩_u · 1."""
    if m.source.space != model_g.source.space or \
       m.target.space != model_h.source.space:
        raise ValueError("models do not match the morphism's endpoints")
    target = model_g.algebra
    images: dict[str, Element] = {}
    for u in m.target.space.names():
        val = target.space.zero()
        for x in m.source.space.names():
            coef = m.f.column(x).coefficient(u)
            if coef != 0:
                val = val + target.space.element(model_g.gen_of[x], coef)
        au = m.alpha.coefficient(u)
        if au != 0:
            val = val - target.one().scale(au)
        images[model_h.gen_of[u]] = val
    fmap = extend_algebra_morphism(model_h, images, target)
    return CdgaMorphism(model_h.algebra, target, fmap)


# ---------------------------------------------------------------------------
# The adjunction


def adjunction_forward(phi: CdgaMorphism, ce: CEModel,
                       flm: FreeLieModel) -> CurvedMorphism:
    """From a cdga map C(g) -> A to the curved map L(A) -> g.

    The Lie part extends v_a -> Σ_x ⟨φ(w_x)⟩_a x and the correction is
    α = -Σ_x ε(φ(w_x)) x."""
    g = ce.source
    A_split = flm.split
    if phi.source.space != ce.algebra.space or \
       phi.target.space != A_split.algebra.space:
        raise ValueError("map endpoints do not match the models")
    T = flm.truncation
    values: dict[str, Element] = {a: g.space.zero()
                                  for a in T.generators.names()}
    alpha = g.space.zero()
    for x in g.space.names():
        image = phi.f.column(ce.gen_of[x])
        for a, coef in image.coeffs.items():
            if a == A_split.algebra.unit:
                continue
            gen = flm.gen_of[a]
            values[gen] = values[gen] + g.space.element(x, coef)
        mu = A_split.eps_value(image)
        if mu != 0:
            alpha = alpha - g.space.element(x, mu)
    f = T.extend_lie_morphism(values, g.space, g.bracket)
    return CurvedMorphism(flm.algebra, g, f, alpha)


def adjunction_backward(m: CurvedMorphism, flm: FreeLieModel,
                        ce: CEModel) -> CdgaMorphism:
    """From a curved map L(A) -> g to the cdga map C(g) -> A.

    Generator images are w_x -> Σ_a ⟨f(v_a)⟩_x (a - ε(a)1) - ⟨α⟩_x · 1."""
    g = ce.source
    A_split = flm.split
    if m.source.space != flm.algebra.space or m.target.space != g.space:
        raise ValueError("map endpoints do not match the models")
    A = A_split.algebra
    images: dict[str, Element] = {}
    for x in g.space.names():
        val = A.space.zero()
        for a in A_split.plus.names():
            coef = m.f.column(flm.gen_of[a]).coefficient(x)
            if coef != 0:
                val = val + A_split.embed.column(a).scale(coef)
        ax = m.alpha.coefficient(x)
        if ax != 0:
            val = val - A.one().scale(ax)
        images[ce.gen_of[x]] = val
    fmap = extend_algebra_morphism(ce, images, A)
    return CdgaMorphism(ce.algebra, A, fmap)


def counit_map(g: CurvedLieAlgebra, weight_cap: int = 3, word_cap: int = 3
               ) -> tuple[CurvedMorphism, CEModel, FreeLieModel]:
    """The adjunction image of the identity of C(g): the map LC(g) -> g
    collapsing weight one and killing higher-word generators."""
    ce = chevalley_eilenberg(g, word_cap)
    flm = free_lie_model(ce.algebra, cap=weight_cap)
    identity = CdgaMorphism(ce.algebra, ce.algebra,
                            LinearMap.identity(ce.algebra.space))
    return adjunction_forward(identity, ce, flm), ce, flm


def unit_map(A: Cdga, eps: dict[str, Fraction] | None = None,
             weight_cap: int = 3, word_cap: int = 3
             ) -> tuple[CdgaMorphism, FreeLieModel, CEModel]:
    """The adjunction image of the identity of L(A): the map CL(A) -> A."""
    flm = free_lie_model(A, eps=eps, cap=weight_cap)
    ce = chevalley_eilenberg(flm.algebra, word_cap)
    identity = CurvedMorphism.identity(flm.algebra)
    return adjunction_backward(identity, flm, ce), flm, ce
