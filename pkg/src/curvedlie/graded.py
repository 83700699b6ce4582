"""Exact graded linear algebra over the rationals.

Everything downstream builds on four notions defined here: graded vector
spaces with a finite ordered basis, sparse elements, sparse linear maps of a
fixed degree shift, and exact echelon computations (rank, kernel, solving,
incremental subspaces).  Degrees are homological integers; scalars are
`fractions.Fraction` and no floating point appears anywhere.

Determinism contract: basis order is the tie-break for every echelon
computation, so identical inputs give identical outputs on any platform.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator


ZERO = Fraction(0)
ONE = Fraction(1)


def parity(n: int) -> int:
    return n & 1


def koszul_sign(degree_pairs: Iterable[tuple[int, int]]) -> Fraction:
    """Sign (-1)^sum(|u||v|) for a list of transposed pairs of degrees."""
    total = sum(a * b for a, b in degree_pairs)
    return Fraction(-1) if parity(total) else ONE


class GradedSpace:
    """Finite ordered basis of named vectors with integer (homological) degrees."""

    def __init__(self, basis: Iterable[tuple[str, int]]):
        items = tuple((str(n), int(d)) for n, d in basis)
        names = [n for n, _ in items]
        if len(set(names)) != len(names):
            dup = sorted({n for n in names if names.count(n) > 1})
            raise ValueError(f"duplicate basis names: {dup}")
        self.basis = items
        self._degree = {n: d for n, d in items}
        self._index = {n: i for i, (n, _) in enumerate(items)}

    @property
    def dim(self) -> int:
        return len(self.basis)

    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.basis)

    def degree(self, name: str) -> int:
        return self._degree[name]

    def index(self, name: str) -> int:
        return self._index[name]

    def __contains__(self, name: str) -> bool:
        return name in self._degree

    def degrees(self) -> list[int]:
        return sorted({d for _, d in self.basis})

    def names_in_degree(self, d: int) -> list[str]:
        return [n for n, deg in self.basis if deg == d]

    def __eq__(self, other) -> bool:
        return isinstance(other, GradedSpace) and self.basis == other.basis

    def __hash__(self):
        return hash(self.basis)

    def __repr__(self):
        inner = ", ".join(f"{n}:{d}" for n, d in self.basis)
        return f"GradedSpace({inner})"

    def zero(self) -> "Element":
        return Element(self, {})

    def element(self, name: str, coeff=ONE) -> "Element":
        if name not in self._degree:
            raise KeyError(f"no basis vector named {name!r}")
        return Element(self, {name: Fraction(coeff)})

    def from_coeffs(self, coeffs: dict[str, Fraction]) -> "Element":
        return Element(self, coeffs)


def suspend(V: GradedSpace) -> GradedSpace:
    """Shift every degree up by one; names gain a suspension marker."""
    return GradedSpace((f"Σ{n}", d + 1) for n, d in V.basis)


def _dual_name(name: str) -> str:
    return name[:-1] if name.endswith("*") else name + "*"


def dualize(V: GradedSpace) -> GradedSpace:
    """Degreewise linear dual: degrees negate, names toggle a trailing star.

    Toggling makes the double dual literally equal to the original space,
    which stands in for the canonical isomorphism V** = V.
    """
    return GradedSpace((_dual_name(n), -d) for n, d in V.basis)


def tensor_spaces(V: GradedSpace, W: GradedSpace) -> GradedSpace:
    return GradedSpace(
        (f"{n}⊗{m}", d + e) for n, d in V.basis for m, e in W.basis
    )


class Element:
    """Sparse vector in a GradedSpace: a map basis name -> nonzero Fraction."""

    __slots__ = ("space", "coeffs")

    def __init__(self, space: GradedSpace, coeffs: dict[str, Fraction]):
        self.space = space
        clean = {}
        for name, c in coeffs.items():
            c = Fraction(c)
            if c != 0:
                if name not in space:
                    raise KeyError(f"{name!r} is not a basis name of {space!r}")
                clean[name] = c
        self.coeffs = clean

    def is_zero(self) -> bool:
        return not self.coeffs

    def coefficient(self, name: str) -> Fraction:
        return self.coeffs.get(name, ZERO)

    def support(self) -> list[str]:
        return sorted(self.coeffs, key=self.space.index)

    def is_homogeneous(self) -> bool:
        degs = {self.space.degree(n) for n in self.coeffs}
        return len(degs) <= 1

    def degree(self) -> int | None:
        """Degree of a homogeneous element (None for zero)."""
        degs = {self.space.degree(n) for n in self.coeffs}
        if not degs:
            return None
        if len(degs) > 1:
            raise ValueError(f"element is not homogeneous: degrees {sorted(degs)}")
        return degs.pop()

    def homogeneous_components(self) -> dict[int, "Element"]:
        parts: dict[int, dict[str, Fraction]] = {}
        for n, c in self.coeffs.items():
            parts.setdefault(self.space.degree(n), {})[n] = c
        return {d: Element(self.space, cs) for d, cs in sorted(parts.items())}

    def __add__(self, other: "Element") -> "Element":
        if self.space != other.space:
            raise ValueError("elements live in different spaces")
        out = dict(self.coeffs)
        for n, c in other.coeffs.items():
            out[n] = out.get(n, ZERO) + c
        return Element(self.space, out)

    def __sub__(self, other: "Element") -> "Element":
        return self + (-other)

    def __neg__(self) -> "Element":
        return Element(self.space, {n: -c for n, c in self.coeffs.items()})

    def scale(self, c) -> "Element":
        c = Fraction(c)
        if c == 0:
            return Element(self.space, {})
        return Element(self.space, {n: c * v for n, v in self.coeffs.items()})

    __rmul__ = scale
    __mul__ = scale

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Element)
            and self.space == other.space
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.space, frozenset(self.coeffs.items())))

    def __repr__(self):
        if not self.coeffs:
            return "0"
        bits = []
        for n in self.support():
            c = self.coeffs[n]
            bits.append(f"{c}·{n}" if c != 1 else n)
        return " + ".join(bits)


def tensor_elements(x: Element, y: Element, target: GradedSpace | None = None) -> Element:
    if target is None:
        target = tensor_spaces(x.space, y.space)
    coeffs = {}
    for n, c in x.coeffs.items():
        for m, d in y.coeffs.items():
            coeffs[f"{n}⊗{m}"] = coeffs.get(f"{n}⊗{m}", ZERO) + c * d
    return Element(target, coeffs)


class LinearMap:
    """Sparse linear map of fixed degree shift, stored column-by-column.

    Degree compatibility of the entries is not enforced at construction (a
    loaded description may be wrong on purpose); `degree_violations` lists
    offending entries and the validators report them.
    """

    def __init__(self, source: GradedSpace, target: GradedSpace, shift: int,
                 cols: dict[str, Element] | None = None):
        self.source = source
        self.target = target
        self.shift = int(shift)
        self.cols: dict[str, Element] = {}
        for name, val in (cols or {}).items():
            if name not in source:
                raise KeyError(f"{name!r} not a basis name of the source")
            if val.space != target:
                raise ValueError(f"column {name!r} does not live in the target space")
            if not val.is_zero():
                self.cols[name] = val

    @classmethod
    def zero(cls, source: GradedSpace, target: GradedSpace, shift: int) -> "LinearMap":
        return cls(source, target, shift, {})

    @classmethod
    def identity(cls, space: GradedSpace) -> "LinearMap":
        return cls(space, space, 0, {n: space.element(n) for n, _ in space.basis})

    def column(self, name: str) -> Element:
        return self.cols.get(name, Element(self.target, {}))

    def apply(self, x: Element) -> Element:
        if x.space != self.source:
            raise ValueError("element does not live in the source space")
        out = Element(self.target, {})
        for n, c in x.coeffs.items():
            col = self.cols.get(n)
            if col is not None:
                out = out + col.scale(c)
        return out

    __call__ = apply

    def degree_violations(self) -> list[tuple[str, str]]:
        bad = []
        for n, col in self.cols.items():
            want = self.source.degree(n) + self.shift
            for m in col.coeffs:
                if self.target.degree(m) != want:
                    bad.append((n, m))
        return sorted(bad)

    def __add__(self, other: "LinearMap") -> "LinearMap":
        if (self.source, self.target, self.shift) != (other.source, other.target, other.shift):
            raise ValueError("maps are not addable: source/target/shift differ")
        cols = dict(self.cols)
        for n, col in other.cols.items():
            cols[n] = cols.get(n, Element(self.target, {})) + col
        return LinearMap(self.source, self.target, self.shift, cols)

    def __sub__(self, other: "LinearMap") -> "LinearMap":
        return self + other.scale(-1)

    def scale(self, c) -> "LinearMap":
        return LinearMap(self.source, self.target, self.shift,
                         {n: col.scale(c) for n, col in self.cols.items()})

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, LinearMap)
            and self.source == other.source
            and self.target == other.target
            and self.shift == other.shift
            and self.cols == other.cols
        )

    def __repr__(self):
        return f"LinearMap(shift={self.shift}, {len(self.cols)} nonzero columns)"


def compose_maps(g: LinearMap, f: LinearMap) -> LinearMap:
    """g after f.  Rejects shape mismatches with a diagnostic."""
    if f.target != g.source:
        raise ValueError(
            f"cannot compose: intermediate spaces differ "
            f"({f.target!r} vs {g.source!r})"
        )
    cols = {n: g.apply(col) for n, col in f.cols.items()}
    return LinearMap(f.source, g.target, f.shift + g.shift, cols)


def tensor_maps(f: LinearMap, g: LinearMap,
                source: GradedSpace | None = None,
                target: GradedSpace | None = None) -> LinearMap:
    """f⊗g with the Koszul sign (-1)^(|g|·|x|) on x⊗y."""
    if source is None:
        source = tensor_spaces(f.source, g.source)
    if target is None:
        target = tensor_spaces(f.target, g.target)
    cols = {}
    for n, dn in f.source.basis:
        fn = f.column(n)
        for m, _ in g.source.basis:
            gm = g.column(m)
            if fn.is_zero() or gm.is_zero():
                continue
            sign = koszul_sign([(g.shift, dn)])
            cols[f"{n}⊗{m}"] = tensor_elements(fn, gm, target).scale(sign)
    return LinearMap(source, target, f.shift + g.shift, cols)


# ---------------------------------------------------------------------------
# Exact echelon machinery


def rref(rows: list[list[Fraction]], width: int) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form with first-nonzero-column pivoting."""
    work = [list(map(Fraction, r)) for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(width):
        pick = None
        for i in range(r, len(work)):
            if work[i][c] != 0:
                pick = i
                break
        if pick is None:
            continue
        work[r], work[pick] = work[pick], work[r]
        pv = work[r][c]
        if pv != 1:
            work[r] = [x / pv for x in work[r]]
        for i in range(len(work)):
            if i != r and work[i][c] != 0:
                fct = work[i][c]
                work[i] = [a - fct * b for a, b in zip(work[i], work[r])]
        pivots.append(c)
        r += 1
        if r == len(work):
            break
    return work[:r], pivots


def rank(rows: list[list[Fraction]], width: int) -> int:
    return len(rref(rows, width)[0])


def nullspace(rows: list[list[Fraction]], width: int) -> list[list[Fraction]]:
    """Basis of {v : M v = 0}, rows of M given; deterministic order."""
    red, pivots = rref(rows, width)
    pivot_set = set(pivots)
    free = [c for c in range(width) if c not in pivot_set]
    basis = []
    for fc in free:
        v = [ZERO] * width
        v[fc] = ONE
        for row, pc in zip(red, pivots):
            v[pc] = -row[fc]
        basis.append(v)
    return basis


class _Echelon:
    """Incremental reduced echelon over one degree; rows kept pivot-sorted."""

    def __init__(self, width: int):
        self.width = width
        self.rows: list[list[Fraction]] = []
        self.pivots: list[int] = []

    def reduce(self, vec: list[Fraction]) -> list[Fraction]:
        v = list(vec)
        for row, p in zip(self.rows, self.pivots):
            if v[p] != 0:
                f = v[p]
                v = [a - f * b for a, b in zip(v, row)]
        return v

    def reduce_with_combo(self, vec: list[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
        """Residual plus the coefficients over the stored rows used to reduce."""
        v = list(vec)
        combo = [ZERO] * len(self.rows)
        for i, (row, p) in enumerate(zip(self.rows, self.pivots)):
            if v[p] != 0:
                f = v[p]
                combo[i] = f
                v = [a - f * b for a, b in zip(v, row)]
        return v, combo

    def insert(self, vec: list[Fraction]) -> bool:
        """Add a vector; returns True if the span grew."""
        v = self.reduce(vec)
        p = next((i for i, x in enumerate(v) if x != 0), None)
        if p is None:
            return False
        pv = v[p]
        v = [x / pv for x in v]
        for i, row in enumerate(self.rows):
            if row[p] != 0:
                f = row[p]
                self.rows[i] = [a - f * b for a, b in zip(row, v)]
        pos = next((i for i, q in enumerate(self.pivots) if q > p), len(self.pivots))
        self.rows.insert(pos, v)
        self.pivots.insert(pos, p)
        return True

    def contains(self, vec: list[Fraction]) -> bool:
        return all(x == 0 for x in self.reduce(vec))

    @property
    def dim(self) -> int:
        return len(self.rows)


class Subspace:
    """Homogeneous subspace of a GradedSpace, one echelon per degree."""

    def __init__(self, space: GradedSpace):
        self.space = space
        self._by_degree: dict[int, _Echelon] = {}

    @classmethod
    def full(cls, space: GradedSpace) -> "Subspace":
        sub = cls(space)
        for n, _ in space.basis:
            sub.add(space.element(n))
        return sub

    @classmethod
    def spanned_by(cls, space: GradedSpace, elements: Iterable[Element]) -> "Subspace":
        sub = cls(space)
        for e in elements:
            sub.add(e)
        return sub

    def _coords(self, elt: Element, degree: int) -> list[Fraction]:
        names = self.space.names_in_degree(degree)
        return [elt.coefficient(n) for n in names]

    def _echelon(self, degree: int) -> _Echelon:
        if degree not in self._by_degree:
            self._by_degree[degree] = _Echelon(len(self.space.names_in_degree(degree)))
        return self._by_degree[degree]

    def add(self, elt: Element) -> bool:
        if elt.space != self.space:
            raise ValueError("element lives in a different space")
        grew = False
        for d, part in elt.homogeneous_components().items():
            grew |= self._echelon(d).insert(self._coords(part, d))
        return grew

    def contains(self, elt: Element) -> bool:
        for d, part in elt.homogeneous_components().items():
            if d not in self._by_degree:
                return False
            if not self._by_degree[d].contains(self._coords(part, d)):
                return False
        return True

    def reduce(self, elt: Element) -> Element:
        """Residual of an element after eliminating against the subspace."""
        out = self.space.zero()
        for d, part in elt.homogeneous_components().items():
            names = self.space.names_in_degree(d)
            vec = self._coords(part, d)
            if d in self._by_degree:
                vec = self._by_degree[d].reduce(vec)
            out = out + Element(self.space, dict(zip(names, vec)))
        return out

    @property
    def dim(self) -> int:
        return sum(e.dim for e in self._by_degree.values())

    def dim_in_degree(self, d: int) -> int:
        return self._by_degree[d].dim if d in self._by_degree else 0

    def basis_elements(self) -> list[Element]:
        out = []
        for d in sorted(self._by_degree):
            names = self.space.names_in_degree(d)
            for row in self._by_degree[d].rows:
                out.append(Element(self.space, dict(zip(names, row))))
        return out

    def is_subspace_of(self, other: "Subspace") -> bool:
        return all(other.contains(e) for e in self.basis_elements())

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Subspace)
            and self.space == other.space
            and self.dim == other.dim
            and self.is_subspace_of(other)
        )

    def copy(self) -> "Subspace":
        return Subspace.spanned_by(self.space, self.basis_elements())


def kernel(f: LinearMap) -> tuple[GradedSpace, LinearMap]:
    """Kernel per degree by exact elimination; returns (space, embedding)."""
    gens: list[tuple[str, int, Element]] = []
    for d in f.source.degrees():
        src_names = f.source.names_in_degree(d)
        if not src_names:
            continue
        tgt_names = f.target.names_in_degree(d + f.shift)
        rows = []
        for m in tgt_names:
            rows.append([f.column(n).coefficient(m) for n in src_names])
        for k, vec in enumerate(nullspace(rows, len(src_names))):
            elt = Element(f.source, dict(zip(src_names, vec)))
            gens.append((f"ker{len(gens)}", d, elt))
    space = GradedSpace((n, d) for n, d, _ in gens)
    embed = LinearMap(space, f.source, 0, {n: e for n, _, e in gens})
    return space, embed


def image_subspace(f: LinearMap) -> Subspace:
    sub = Subspace(f.target)
    for _, col in sorted(f.cols.items(), key=lambda kv: f.source.index(kv[0])):
        sub.add(col)
    return sub


def invert_linear_map(f: LinearMap) -> LinearMap:
    """Exact inverse of a degree-0 map; names the degree where rank drops."""
    if f.shift != 0:
        raise ValueError("only degree-0 maps can be inverted")
    degrees = sorted(set(f.source.degrees()) | set(f.target.degrees()))
    cols: dict[str, Element] = {}
    for d in degrees:
        src = f.source.names_in_degree(d)
        tgt = f.target.names_in_degree(d)
        if len(src) != len(tgt):
            raise ValueError(f"not an isomorphism: dimensions differ in degree {d}")
        if not src:
            continue
        n = len(src)
        aug = []
        for i, m in enumerate(tgt):
            row = [f.column(s).coefficient(m) for s in src]
            row += [ONE if j == i else ZERO for j in range(n)]
            aug.append(row)
        red, pivots = rref(aug, 2 * n)
        if pivots[: n] != list(range(n)) or len(pivots) < n:
            raise ValueError(f"not an isomorphism: rank drops in degree {d}")
        for j, m in enumerate(tgt):
            coeffs = {src[i]: red[i][n + j] for i in range(n)}
            cols[m] = Element(f.source, coeffs)
    return LinearMap(f.target, f.source, 0, cols)
