"""JSON descriptions of algebras, morphisms and elements.

Scalars travel as strings "p/q" (or "p" when the denominator is one).
Curved Lie algebras use homological degrees in the file; cdga files use
cohomological degrees and are negated on ingestion.  Omitted bracket or
differential entries are zero and the antisymmetric completion of a bracket
table is automatic.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .cdga import Cdga
from .curved import CurvedLieAlgebra, CurvedMorphism
from .graded import Element, GradedSpace, LinearMap


class InputError(ValueError):
    """Malformed description; the message carries the field diagnostics."""


def scalar_to_str(c: Fraction) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def parse_scalar(s: str) -> Fraction:
    try:
        return Fraction(str(s).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad rational {s!r}: {exc}") from exc


def element_to_json(e: Element) -> list:
    return [[n, scalar_to_str(e.coeffs[n])] for n in e.support()]


def element_from_json(space: GradedSpace, data, where: str = "element") -> Element:
    if not isinstance(data, list):
        raise InputError(f"{where}: expected a list of [name, coeff] pairs")
    coeffs = {}
    for item in data:
        if not isinstance(item, (list, tuple)) or len(item) != 2:
            raise InputError(f"{where}: entry {item!r} is not a [name, coeff] pair")
        name, c = item
        if name not in space:
            raise InputError(f"{where}: unknown basis name {name!r}")
        coeffs[name] = coeffs.get(name, Fraction(0)) + parse_scalar(c)
    return Element(space, coeffs)


def parse_element_arg(space: GradedSpace, text: str) -> Element:
    """Compact command-line form "name:coeff,name:coeff" with rationals p/q."""
    coeffs = {}
    if text.strip():
        for chunk in text.split(","):
            name, sep, c = chunk.rpartition(":")
            if not sep:
                raise InputError(f"bad element token {chunk!r}: expected name:coeff")
            name = name.strip()
            if name not in space:
                raise InputError(f"unknown basis name {name!r}")
            coeffs[name] = coeffs.get(name, Fraction(0)) + parse_scalar(c)
    return Element(space, coeffs)


# -- curved Lie algebras -------------------------------------------------------


def curved_to_json(g: CurvedLieAlgebra) -> dict:
    index = g.space.index
    brackets = []
    for (a, b) in sorted(g.table, key=lambda p: (index(p[0]), index(p[1]))):
        if index(a) > index(b):
            continue  # the completion restores the other orientation
        brackets.append({"left": a, "right": b,
                         "value": element_to_json(g.table[(a, b)])})
    data = {
        "kind": "curved_lie",
        "basis": [{"name": n, "degree": d} for n, d in g.space.basis],
        "brackets": brackets,
        "differential": [
            {"on": n, "value": element_to_json(g.d.column(n))}
            for n in g.space.names() if not g.d.column(n).is_zero()
        ],
        "curvature": element_to_json(g.curvature),
    }
    if g.weight_cap is not None:
        data["weight_cap"] = g.weight_cap
    return data


def curved_from_json(data: dict) -> CurvedLieAlgebra:
    if data.get("kind") != "curved_lie":
        raise InputError('expected "kind": "curved_lie"')
    try:
        basis = [(b["name"], int(b["degree"])) for b in data["basis"]]
    except (KeyError, TypeError) as exc:
        raise InputError(f"bad basis entry: {exc}") from exc
    space = GradedSpace(basis)
    brackets = {}
    for entry in data.get("brackets", []):
        try:
            left, right = entry["left"], entry["right"]
        except (KeyError, TypeError) as exc:
            raise InputError(f"bad bracket entry {entry!r}") from exc
        for n in (left, right):
            if n not in space:
                raise InputError(f"bracket uses unknown name {n!r}")
        brackets[(left, right)] = element_from_json(
            space, entry.get("value", []), f"bracket [{left},{right}]")
    cols = {}
    for entry in data.get("differential", []):
        try:
            on = entry["on"]
        except (KeyError, TypeError) as exc:
            raise InputError(f"bad differential entry {entry!r}") from exc
        if on not in space:
            raise InputError(f"differential on unknown name {on!r}")
        cols[on] = element_from_json(space, entry.get("value", []), f"d({on})")
    d = LinearMap(space, space, -1, cols)
    curvature = element_from_json(space, data.get("curvature", []), "curvature")
    return CurvedLieAlgebra(space, brackets, d, curvature,
                            weight_cap=data.get("weight_cap"))


# -- cdgas ---------------------------------------------------------------------


def cdga_to_json(A: Cdga) -> dict:
    index = A.space.index
    products = []
    for (a, b) in sorted(A.table, key=lambda p: (index(p[0]), index(p[1]))):
        if A.unit in (a, b) or index(a) > index(b):
            continue
        products.append({"left": a, "right": b,
                         "value": element_to_json(A.table[(a, b)])})
    return {
        "kind": "cdga",
        "basis": [{"name": n, "degree": -d} for n, d in A.space.basis],
        "unit": A.unit,
        "products": products,
        "differential": [
            {"on": n, "value": element_to_json(A.d.column(n))}
            for n in A.space.names() if not A.d.column(n).is_zero()
        ],
    }


def cdga_from_json(data: dict) -> Cdga:
    if data.get("kind") != "cdga":
        raise InputError('expected "kind": "cdga"')
    try:
        basis = [(b["name"], -int(b["degree"])) for b in data["basis"]]
    except (KeyError, TypeError) as exc:
        raise InputError(f"bad basis entry: {exc}") from exc
    space = GradedSpace(basis)
    unit = data.get("unit")
    if unit not in space:
        raise InputError(f"unit {unit!r} is not a basis name")
    products = {}
    for entry in data.get("products", []):
        try:
            left, right = entry["left"], entry["right"]
        except (KeyError, TypeError) as exc:
            raise InputError(f"bad product entry {entry!r}") from exc
        for n in (left, right):
            if n not in space:
                raise InputError(f"product uses unknown name {n!r}")
        products[(left, right)] = element_from_json(
            space, entry.get("value", []), f"product {left}·{right}")
    cols = {}
    for entry in data.get("differential", []):
        on = entry.get("on")
        if on not in space:
            raise InputError(f"differential on unknown name {on!r}")
        cols[on] = element_from_json(space, entry.get("value", []), f"d({on})")
    d = LinearMap(space, space, -1, cols)
    return Cdga(space, unit, products, d)


# -- curved morphisms -------------------------------------------------------------


def morphism_to_json(m: CurvedMorphism) -> dict:
    return {
        "kind": "curved_morphism",
        "source": curved_to_json(m.source),
        "target": curved_to_json(m.target),
        "map": [
            {"on": n, "value": element_to_json(m.f.column(n))}
            for n in m.source.space.names() if not m.f.column(n).is_zero()
        ],
        "alpha": element_to_json(m.alpha),
    }


def morphism_from_json(data: dict) -> CurvedMorphism:
    if data.get("kind") != "curved_morphism":
        raise InputError('expected "kind": "curved_morphism"')
    source = curved_from_json(data["source"])
    target = curved_from_json(data["target"])
    cols = {}
    for entry in data.get("map", []):
        on = entry.get("on")
        if on not in source.space:
            raise InputError(f"map on unknown source name {on!r}")
        cols[on] = element_from_json(target.space, entry.get("value", []),
                                     f"f({on})")
    f = LinearMap(source.space, target.space, 0, cols)
    alpha = element_from_json(target.space, data.get("alpha", []), "alpha")
    return CurvedMorphism(source, target, f, alpha)


def load_any(data: dict):
    kind = data.get("kind")
    if kind == "curved_lie":
        return curved_from_json(data)
    if kind == "cdga":
        return cdga_from_json(data)
    if kind == "curved_morphism":
        return morphism_from_json(data)
    raise InputError(f"unknown kind {kind!r}")


def load_file(path: str):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(
            f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: "
            f"{exc.msg}") from exc
    if not isinstance(data, dict):
        raise InputError(f"{path}: top level must be an object")
    try:
        return load_any(data)
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from exc


def dumps(data: dict) -> str:
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False)
