"""Unital commutative dg algebras at a finite stage, and their interactions
with curved Lie algebras.

Everything is stored homologically (a cohomological algebra enters via
A_i = A^{-i}, so the cohomological +1 differential has shift -1 here).
The polynomial path algebra k[z,dz] and the simplex forms are infinite
dimensional; both carry an auxiliary polynomial weight that the
differential preserves and the product adds, so chopping above a weight
cap is an honest dg quotient and every algebra axiom survives truncation
exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .curved import AxiomFailure, CurvedLieAlgebra, ValidationReport
from .graded import (
    ONE,
    ZERO,
    Element,
    GradedSpace,
    LinearMap,
    koszul_sign,
    parity,
)


class Cdga:
    """Unital graded-commutative algebra with a differential, on a basis.

    `products` may list any subset of ordered pairs; the table is completed
    with unit rows and graded commutativity, while supplied entries are kept
    verbatim so that validation can catch inconsistent input.
    """

    def __init__(self, space: GradedSpace, unit: str,
                 products: dict[tuple[str, str], Element],
                 d: LinearMap,
                 pweights: dict[str, int] | None = None,
                 pweight_cap: int | None = None,
                 label: str = ""):
        if unit not in space:
            raise ValueError(f"unit {unit!r} is not a basis name")
        if space.degree(unit) != 0:
            raise ValueError("unit must sit in degree 0")
        if d.source != space or d.target != space:
            raise ValueError("differential must be an endomorphism of the carrier")
        self.space = space
        self.unit = unit
        self.d = d
        self.pweights = pweights
        self.pweight_cap = pweight_cap
        self.label = label
        self.table: dict[tuple[str, str], Element] = {}
        for (a, b), val in products.items():
            if a not in space or b not in space:
                raise KeyError(f"product entry ({a!r},{b!r}) uses unknown names")
            if val.space != space:
                raise ValueError("product values must live in the carrier")
            if not val.is_zero():
                self.table[(a, b)] = val
        for n, _ in space.basis:
            self.table.setdefault((unit, n), space.element(n))
            self.table.setdefault((n, unit), space.element(n))
        for (a, b), val in list(self.table.items()):
            if (b, a) not in self.table:
                sign = koszul_sign([(space.degree(a), space.degree(b))])
                self.table[(b, a)] = val.scale(sign)

    @property
    def dim(self) -> int:
        return self.space.dim

    def one(self) -> Element:
        return self.space.element(self.unit)

    def product_basis(self, a: str, b: str) -> Element:
        return self.table.get((a, b), self.space.zero())

    def multiply(self, x: Element, y: Element) -> Element:
        out = self.space.zero()
        for a, ca in x.coeffs.items():
            for b, cb in y.coeffs.items():
                val = self.table.get((a, b))
                if val is not None:
                    out = out + val.scale(ca * cb)
        return out

    def __repr__(self):
        tag = f" {self.label!r}" if self.label else ""
        return f"Cdga(dim={self.dim}{tag})"


def ground_cdga() -> Cdga:
    space = GradedSpace([("1", 0)])
    return Cdga(space, "1", {}, LinearMap.zero(space, space, -1), label="k")


def validate_cdga(A: Cdga) -> ValidationReport:
    """Unit, commutativity, associativity, Leibniz, d² = 0; witnesses listed."""
    fails: list[AxiomFailure] = []
    space = A.space
    names = list(space.names())

    for (a, b), val in sorted(A.table.items()):
        want = space.degree(a) + space.degree(b)
        for m in val.coeffs:
            if space.degree(m) != want:
                fails.append(AxiomFailure(
                    "product-degree", (a, b, m),
                    f"{a}·{b} has a component in degree {space.degree(m)}"))
    for (a, m) in A.d.degree_violations():
        fails.append(AxiomFailure(
            "differential-degree", (a, m), f"d({a}) hits {m} off shift -1"))

    for n in names:
        if A.product_basis(A.unit, n) != space.element(n) or \
           A.product_basis(n, A.unit) != space.element(n):
            fails.append(AxiomFailure("unit", (n,), f"1·{n} != {n}"))

    for a in names:
        for b in names:
            sign = koszul_sign([(space.degree(a), space.degree(b))])
            if A.product_basis(a, b) != A.product_basis(b, a).scale(sign):
                fails.append(AxiomFailure(
                    "commutativity", (a, b),
                    f"{a}·{b} != (-1)^(|{a}||{b}|) {b}·{a}"))

    for a in names:
        for b in names:
            for c in names:
                lhs = A.multiply(A.product_basis(a, b), space.element(c))
                rhs = A.multiply(space.element(a), A.product_basis(b, c))
                if lhs != rhs:
                    fails.append(AxiomFailure(
                        "associativity", (a, b, c),
                        f"({a}·{b})·{c} != {a}·({b}·{c})"))
    assoc = [f for f in fails if f.axiom == "associativity"]
    if len(assoc) > 5:
        fails = [f for f in fails if f.axiom != "associativity"] + assoc[:5]

    for a in names:
        for b in names:
            lhs = A.d.apply(A.product_basis(a, b))
            rhs = A.multiply(A.d.column(a), space.element(b)) + \
                A.multiply(space.element(a), A.d.column(b)).scale(
                    koszul_sign([(1, space.degree(a))]))
            if lhs != rhs:
                fails.append(AxiomFailure(
                    "leibniz", (a, b), f"d({a}·{b}) breaks the Leibniz rule"))
                break

    for a in names:
        if not A.d.apply(A.d.column(a)).is_zero():
            fails.append(AxiomFailure("d-squared", (a,), f"d²({a}) != 0"))
    if not A.d.column(A.unit).is_zero():
        fails.append(AxiomFailure("unit-closed", (), "d(1) != 0"))

    return ValidationReport(ok=not fails, failures=fails,
                            weight_cap=A.pweight_cap)


# ---------------------------------------------------------------------------
# Retraction splittings A = A₊ ⊕ k


@dataclass
class RetractionSplit:
    """A linear retraction ε: A -> k with ε(1) = 1, and the induced pieces.

    A₊ is the kernel of ε with basis vectors b - ε(b)·1 indexed by the
    non-unit basis names.  d and the product split into A₊- and k-valued
    components; ε is an augmentation exactly when both k-components vanish.
    """

    algebra: Cdga
    eps: dict[str, Fraction]
    plus: GradedSpace = field(init=False)
    embed: LinearMap = field(init=False)
    d_plus: LinearMap = field(init=False)
    d_k: dict[str, Fraction] = field(init=False)
    m_plus: dict[tuple[str, str], Element] = field(init=False)
    m_k: dict[tuple[str, str], Fraction] = field(init=False)
    augmentation: bool = field(init=False)

    def __post_init__(self):
        A = self.algebra
        if self.eps.get(A.unit, ZERO) != 1:
            raise ValueError("a retraction must send the unit to 1")
        for n, c in self.eps.items():
            if c != 0 and A.space.degree(n) != 0:
                raise ValueError("a retraction is a degree-0 functional")
        names = [n for n, _ in A.space.basis if n != A.unit]
        self.plus = GradedSpace((n, A.space.degree(n)) for n in names)
        self.embed = LinearMap(self.plus, A.space, 0, {
            n: A.space.element(n) - A.one().scale(self.eps.get(n, ZERO))
            for n in names
        })

        def eval_eps(x: Element) -> Fraction:
            return sum((self.eps.get(n, ZERO) * c for n, c in x.coeffs.items()),
                       ZERO)

        def plus_part(x: Element) -> Element:
            # non-unit coordinates transfer verbatim along b - ε(b)·1
            return Element(self.plus, {n: c for n, c in x.coeffs.items()
                                       if n != A.unit})

        self.d_k = {}
        dcols = {}
        for n in names:
            image = A.d.apply(self.embed.column(n))
            dcols[n] = plus_part(image)
            dk = eval_eps(image)
            if dk != 0:
                self.d_k[n] = dk
        self.d_plus = LinearMap(self.plus, self.plus, -1, dcols)

        self.m_plus = {}
        self.m_k = {}
        for a in names:
            for b in names:
                prod = A.multiply(self.embed.column(a), self.embed.column(b))
                pp = plus_part(prod)
                if not pp.is_zero():
                    self.m_plus[(a, b)] = pp
                mk = eval_eps(prod)
                if mk != 0:
                    self.m_k[(a, b)] = mk

        self.augmentation = not self.d_k and not self.m_k

    def eps_value(self, x: Element) -> Fraction:
        return sum((self.eps.get(n, ZERO) * c for n, c in x.coeffs.items()), ZERO)

    def reassembles(self) -> bool:
        """d∘ι = ι∘d₊ + 1·d_k and m∘(ι⊗ι) = ι∘m₊ + 1·m_k, checked exactly."""
        A = self.algebra
        for n in self.plus.names():
            lhs = A.d.apply(self.embed.column(n))
            rhs = self.embed.apply(self.d_plus.column(n)) + \
                A.one().scale(self.d_k.get(n, ZERO))
            if lhs != rhs:
                return False
        for a in self.plus.names():
            for b in self.plus.names():
                lhs = A.multiply(self.embed.column(a), self.embed.column(b))
                rhs = A.one().scale(self.m_k.get((a, b), ZERO))
                mp = self.m_plus.get((a, b))
                if mp is not None:
                    rhs = rhs + self.embed.apply(mp)
                if lhs != rhs:
                    return False
        return True


def split(A: Cdga, eps: dict[str, Fraction] | None = None) -> RetractionSplit:
    """Split A along a retraction; default ε kills every non-unit basis vector."""
    if eps is None:
        eps = {A.unit: ONE}
    else:
        eps = {n: Fraction(c) for n, c in eps.items() if c != 0}
        eps.setdefault(A.unit, ZERO)
    return RetractionSplit(A, eps)


# ---------------------------------------------------------------------------
# Tensor with a curved Lie algebra


def tensor_lie_cdga(g: CurvedLieAlgebra, A: Cdga, label: str = "") -> CurvedLieAlgebra:
    """Curved structure on 𝔤⊗A: bracket [x⊗a, y⊗b] = (-1)^(|y||a|) [x,y]⊗ab,
    differential d(x⊗a) = dx⊗a + (-1)^|x| x⊗da, curvature ω⊗1."""
    space = GradedSpace(
        (f"{x}⊗{a}", dx + da)
        for x, dx in g.space.basis for a, da in A.space.basis
    )

    def pure(xe: Element, ae: Element) -> Element:
        out: dict[str, Fraction] = {}
        for x, cx in xe.coeffs.items():
            for a, ca in ae.coeffs.items():
                key = f"{x}⊗{a}"
                out[key] = out.get(key, ZERO) + cx * ca
        return Element(space, out)

    table: dict[tuple[str, str], Element] = {}
    for x, dx in g.space.basis:
        for y, dy in g.space.basis:
            br = g.bracket_basis(x, y)
            if br.is_zero():
                continue
            for a, da in A.space.basis:
                sign = koszul_sign([(dy, da)])
                for b, db in A.space.basis:
                    prod = A.product_basis(a, b)
                    if prod.is_zero():
                        continue
                    table[(f"{x}⊗{a}", f"{y}⊗{b}")] = pure(br, prod).scale(sign)

    dcols: dict[str, Element] = {}
    for x, dx in g.space.basis:
        for a, da in A.space.basis:
            val = pure(g.d.column(x), A.space.element(a)) + \
                pure(g.space.element(x), A.d.column(a)).scale(
                    koszul_sign([(1, dx)]))
            if not val.is_zero():
                dcols[f"{x}⊗{a}"] = val
    d = LinearMap(space, space, -1, dcols)
    curv = pure(g.curvature, A.one())
    return CurvedLieAlgebra(space, table, d, curv,
                            label=label or f"tensor({g.label},{A.label})")


# ---------------------------------------------------------------------------
# The polynomial path algebra A[z, dz]


def polynomial_line(cap: int) -> Cdga:
    """k[z, dz] truncated above polynomial weight `cap`, where z has weight 1
    and dz weight 1 as well; basis z^i (i <= cap) and z^i·dz (i <= cap-1)."""
    if cap < 1:
        raise ValueError("the z-weight cap must be at least 1")
    basis: list[tuple[str, int]] = []
    for i in range(cap + 1):
        basis.append((_zname(i, False), 0))
    for i in range(cap):
        basis.append((_zname(i, True), -1))
    space = GradedSpace(basis)
    products: dict[tuple[str, str], Element] = {}
    for i in range(cap + 1):
        for j in range(cap + 1):
            if i + j <= cap:
                products[(_zname(i, False), _zname(j, False))] = \
                    space.element(_zname(i + j, False))
            if j < cap and i + j + 1 <= cap:
                products[(_zname(i, False), _zname(j, True))] = \
                    space.element(_zname(i + j, True))
                products[(_zname(j, True), _zname(i, False))] = \
                    space.element(_zname(i + j, True))
            # dz·dz = 0
    dcols = {}
    for i in range(1, cap + 1):
        dcols[_zname(i, False)] = space.element(_zname(i - 1, True), i)
    d = LinearMap(space, space, -1, dcols)
    weights = {n: _zweight(n) for n, _ in basis}
    return Cdga(space, "z^0", products, d, pweights=weights, pweight_cap=cap,
                label=f"k[z,dz]<= {cap}")


def _zname(i: int, with_dz: bool) -> str:
    return f"z^{i}dz" if with_dz else f"z^{i}"


def _zweight(name: str) -> int:
    if name.endswith("dz"):
        return int(name[2:-2]) + 1
    return int(name[2:])


def tensor_cdga(A: Cdga, B: Cdga, label: str = "") -> Cdga:
    """A⊗B with (a⊗u)(b⊗v) = (-1)^(|u||b|)(ab)⊗(uv) and the signed
    total differential."""
    space = GradedSpace(
        (f"{a}⊗{u}", da + du)
        for a, da in A.space.basis for u, du in B.space.basis
    )

    def pure(ae: Element, ue: Element) -> Element:
        out: dict[str, Fraction] = {}
        for a, ca in ae.coeffs.items():
            for u, cu in ue.coeffs.items():
                key = f"{a}⊗{u}"
                out[key] = out.get(key, ZERO) + ca * cu
        return Element(space, out)

    products: dict[tuple[str, str], Element] = {}
    for a, da in A.space.basis:
        for u, du in B.space.basis:
            for b, db in A.space.basis:
                ab = A.product_basis(a, b)
                if ab.is_zero():
                    continue
                sign_base = koszul_sign([(du, db)])
                for v, dv in B.space.basis:
                    uv = B.product_basis(u, v)
                    if uv.is_zero():
                        continue
                    products[(f"{a}⊗{u}", f"{b}⊗{v}")] = \
                        pure(ab, uv).scale(sign_base)

    dcols = {}
    for a, da in A.space.basis:
        for u, du in B.space.basis:
            val = pure(A.d.column(a), B.space.element(u)) + \
                pure(A.space.element(a), B.d.column(u)).scale(
                    koszul_sign([(1, da)]))
            if not val.is_zero():
                dcols[f"{a}⊗{u}"] = val
    d = LinearMap(space, space, -1, dcols)

    pweights = None
    cap = None
    if B.pweights is not None:
        pweights = {f"{a}⊗{u}": B.pweights[u]
                    for a, _ in A.space.basis for u, _ in B.space.basis}
        cap = B.pweight_cap
    return Cdga(space, f"{A.unit}⊗{B.unit}", products, d,
                pweights=pweights, pweight_cap=cap,
                label=label or f"{A.label}⊗{B.label}")


@dataclass
class PathAlgebra:
    """A ⊗ k[z,dz] at a finite z-weight cap, with the two endpoint maps."""

    base: Cdga
    cap: int
    algebra: Cdga = field(init=False)

    def __post_init__(self):
        self.algebra = tensor_cdga(self.base, polynomial_line(self.cap),
                                   label=f"{self.base.label}[z,dz]")

    def endpoint_map(self, value: int) -> LinearMap:
        """Evaluation z -> value, dz -> 0, a dg-algebra map back to the base."""
        if value not in (0, 1):
            raise ValueError("endpoints are z = 0 and z = 1")
        cols = {}
        for name, _ in self.algebra.space.basis:
            a, zpart = name.rsplit("⊗", 1)
            if zpart.endswith("dz"):
                continue
            i = int(zpart[2:])
            if value == 0 and i > 0:
                continue
            cols[name] = self.base.space.element(a)
        return LinearMap(self.algebra.space, self.base.space, 0, cols)

    def endpoints(self, x: Element) -> tuple[Element, Element]:
        return self.endpoint_map(0).apply(x), self.endpoint_map(1).apply(x)

    def include_constant(self, a: Element) -> Element:
        return Element(self.algebra.space,
                       {f"{n}⊗z^0": c for n, c in a.coeffs.items()})


def path_algebra(A: Cdga, cap: int) -> PathAlgebra:
    return PathAlgebra(A, cap)


# ---------------------------------------------------------------------------
# Polynomial forms on the n-simplex


def simplex_forms(n: int, cap: int) -> Cdga:
    """Polynomial de Rham forms on the n-simplex, total degree <= cap.

    Coordinates t_1..t_n and dt_1..dt_n after eliminating t_0 = 1 - Σt_i and
    dt_0 = -Σdt_i; a monomial t^e·dt_S has polynomial weight |e| + |S| and
    homological degree -|S|.
    """
    if n < 0:
        raise ValueError("simplex dimension must be non-negative")
    if cap < 1:
        raise ValueError("the polynomial cap must be at least 1")
    if n == 0:
        ground = ground_cdga()
        return Cdga(ground.space, "1", {}, ground.d,
                    pweights={"1": 0}, pweight_cap=cap, label="forms(0)")

    monos: list[tuple[tuple[int, ...], tuple[int, ...]]] = []

    def gen_exponents(total_max: int):
        out = [()]
        for _ in range(n):
            out = [e + (k,) for e in out for k in range(total_max - sum(e) + 1)]
        return out

    for size in range(0, min(n, cap) + 1):
        for S in combinations(range(1, n + 1), size):
            for e in gen_exponents(cap - size):
                if sum(e) + size <= cap:
                    monos.append((e, S))
    monos.sort(key=lambda m: (sum(m[0]) + len(m[1]), m[1], m[0]))

    def mono_name(e: tuple[int, ...], S: tuple[int, ...]) -> str:
        bits = [f"t{i+1}^{k}" if k > 1 else f"t{i+1}"
                for i, k in enumerate(e) if k > 0]
        bits += [f"dt{i}" for i in S]
        return "·".join(bits) if bits else "1"

    names = {(e, S): mono_name(e, S) for e, S in monos}
    space = GradedSpace((names[(e, S)], -len(S)) for e, S in monos)
    index = {names[m]: m for m in monos}

    def merge(m1, m2) -> tuple[tuple, Fraction] | None:
        (e1, S1), (e2, S2) = m1, m2
        if set(S1) & set(S2):
            return None
        e = tuple(a + b for a, b in zip(e1, e2))
        if sum(e) + len(S1) + len(S2) > cap:
            return None
        # sign from interleaving the odd dt's of S2 past those of S1
        inv = sum(1 for i in S1 for j in S2 if j < i)
        S = tuple(sorted(S1 + S2))
        return (e, S), (Fraction(-1) if inv % 2 else ONE)

    products: dict[tuple[str, str], Element] = {}
    for m1 in monos:
        for m2 in monos:
            got = merge(m1, m2)
            if got is None:
                continue
            m, sign = got
            products[(names[m1], names[m2])] = space.element(names[m], sign)

    dcols: dict[str, Element] = {}
    for e, S in monos:
        val = space.zero()
        for i, k in enumerate(e):
            if k == 0:
                continue
            var = i + 1
            if var in S:
                continue
            e2 = tuple(kk - 1 if jj == i else kk for jj, kk in enumerate(e))
            inv = sum(1 for j in S if j < var)
            S2 = tuple(sorted(S + (var,)))
            if sum(e2) + len(S2) <= cap:
                val = val + space.element(names[(e2, S2)],
                                          k * (Fraction(-1) if inv % 2 else ONE))
        if not val.is_zero():
            dcols[names[(e, S)]] = val
    d = LinearMap(space, space, -1, dcols)
    pweights = {names[(e, S)]: sum(e) + len(S) for e, S in monos}
    return Cdga(space, "1", products, d, pweights=pweights, pweight_cap=cap,
                label=f"forms({n})")


def simplex_vertex_evaluation(forms: Cdga, n: int, vertex: int) -> LinearMap:
    """Evaluation of forms at a vertex: t_i -> δ_(i=vertex), dt -> 0."""
    if not 0 <= vertex <= n:
        raise ValueError("vertex out of range")
    ground = ground_cdga()
    cols = {}
    for name, _ in forms.space.basis:
        if "dt" in name:
            continue
        if name == "1":
            cols[name] = ground.one()
            continue
        value = ONE
        for factor in name.split("·"):
            var, _, exp = factor.partition("^")
            i = int(var[1:])
            base = ONE if i == vertex else ZERO
            value *= base
        if value != 0:
            cols[name] = ground.one().scale(value)
    return LinearMap(forms.space, ground.space, 0, cols)
