"""Command-line surface: ingest JSON descriptions, run checks, emit reports.

Exit codes: 0 for success or a true verdict, 1 for a false verdict, 2 for
input errors.  Given the same inputs and seed the output is byte-identical.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from . import serialize
from .cdga import Cdga, tensor_lie_cdga, validate_cdga
from .curved import (
    INITIAL,
    CurvedLieAlgebra,
    associated_graded,
    coequaliser,
    coproduct,
    equaliser,
    lower_central_series,
    product,
    twist,
    validate_algebra,
    validate_morphism,
)
from .functors import (
    CdgaMorphism,
    adjunction_backward,
    adjunction_forward,
    chevalley_eilenberg,
    counit_map,
    extend_algebra_morphism,
    free_lie_model,
    unit_map,
    validate_cdga_morphism,
)
from .fuzz import (
    random_candidate_algebra,
    random_valid_algebra,
    rng_from_seed,
)
from .homotopy import (
    filtered_qiso_check,
    homology,
    mc_check,
    mc_hom_bijection_check,
    mc_homotopy_check,
    mc_residual,
    mc_solve_linear,
    path_context,
    twist_flatness,
)
from .serialize import InputError


@dataclass
class JobConfig:
    subcommand: str
    inputs: list[str] = field(default_factory=list)
    weight_cap: int = 4
    word_cap: int = 3
    poly_cap: int = 3
    window: tuple[int, int] = (-6, 2)
    fmt: str = "text"
    seed: int = 0
    emit: str | None = None

    def __post_init__(self):
        if self.weight_cap < 1 or self.word_cap < 1 or self.poly_cap < 1:
            raise InputError("caps must be positive")
        if self.window[0] > self.window[1]:
            raise InputError("degree window is empty")


def _env_default(name: str, fallback: int) -> int:
    raw = os.environ.get(name)
    if raw is None:
        return fallback
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"environment variable {name} is not an integer: {raw!r}")


def _emit(cfg: JobConfig, data: dict, out) -> None:
    text = serialize.dumps(data)
    if cfg.emit:
        with open(cfg.emit, "w") as fh:
            fh.write(text + "\n")
    else:
        out.write(text + "\n")


def _report(cfg: JobConfig, payload: dict, lines: list[str], out) -> None:
    if cfg.fmt == "json":
        out.write(serialize.dumps(payload) + "\n")
    else:
        for line in lines:
            out.write(line + "\n")


def _load_curved(path: str) -> CurvedLieAlgebra:
    obj = serialize.load_file(path)
    if not isinstance(obj, CurvedLieAlgebra):
        raise InputError(f"{path}: expected a curved Lie algebra description")
    return obj


def _load_cdga(path: str) -> Cdga:
    obj = serialize.load_file(path)
    if not isinstance(obj, Cdga):
        raise InputError(f"{path}: expected a cdga description")
    return obj


def _load_morphism(path: str):
    obj = serialize.load_file(path)
    from .curved import CurvedMorphism

    if not isinstance(obj, CurvedMorphism):
        raise InputError(f"{path}: expected a curved morphism description")
    return obj


# -- subcommand bodies -----------------------------------------------------------


def cmd_validate(cfg: JobConfig, out) -> int:
    obj = serialize.load_file(cfg.inputs[0])
    if isinstance(obj, CurvedLieAlgebra):
        report = validate_algebra(obj)
    elif isinstance(obj, Cdga):
        report = validate_cdga(obj)
    else:
        report = validate_morphism(obj)
    lines = ["all axioms hold" if report.ok else "axiom failures:"]
    lines += [f"  {f.axiom} at {f.witness}: {f.detail}" for f in report.failures]
    _report(cfg, report.to_json(), lines, out)
    return 0 if report.ok else 1


def cmd_twist(cfg: JobConfig, out, xi_text: str) -> int:
    g = _load_curved(cfg.inputs[0])
    xi = serialize.parse_element_arg(g.space, xi_text)
    twisted, _ = twist(g, xi)
    _emit(cfg, serialize.curved_to_json(twisted), out)
    return 0


def cmd_product(cfg: JobConfig, out) -> int:
    gs = [_load_curved(p) for p in cfg.inputs]
    prod, _ = product(gs)
    _emit(cfg, serialize.curved_to_json(prod), out)
    return 0


def cmd_equalise(cfg: JobConfig, out) -> int:
    m1 = _load_morphism(cfg.inputs[0])
    m2 = _load_morphism(cfg.inputs[1])
    eq, _ = equaliser(m1, m2)
    if eq is INITIAL:
        _report(cfg, {"verdict": "initial-object"},
                ["equaliser is the formal initial object"], out)
        return 0
    _emit(cfg, serialize.curved_to_json(eq), out)
    return 0


def cmd_coproduct(cfg: JobConfig, out) -> int:
    g = _load_curved(cfg.inputs[0])
    h = _load_curved(cfg.inputs[1])
    co, _, _, _ = coproduct(g, h, cfg.weight_cap)
    _emit(cfg, serialize.curved_to_json(co), out)
    return 0


def cmd_coequalise(cfg: JobConfig, out) -> int:
    m1 = _load_morphism(cfg.inputs[0])
    m2 = _load_morphism(cfg.inputs[1])
    q, _ = coequaliser(m1, m2)
    _emit(cfg, serialize.curved_to_json(q), out)
    return 0


def cmd_lcs(cfg: JobConfig, out) -> int:
    g = _load_curved(cfg.inputs[0])
    filt = lower_central_series(g)
    dims = [s.dim for s in filt.subspaces]
    payload = {
        "dims": dims,
        "respects_bracket": filt.respects_bracket,
        "respects_differential": filt.respects_differential,
        "complete": filt.complete_at_truncation,
        "admissible": filt.admissible,
    }
    lines = [f"lower central series dims: {dims}",
             f"admissible: {filt.admissible}"]
    _report(cfg, payload, lines, out)
    return 0


def cmd_gr(cfg: JobConfig, out) -> int:
    g = _load_curved(cfg.inputs[0])
    gr = associated_graded(g, lower_central_series(g))
    _emit(cfg, serialize.curved_to_json(gr.algebra), out)
    return 0


def cmd_homology(cfg: JobConfig, out) -> int:
    obj = serialize.load_file(cfg.inputs[0])
    if isinstance(obj, (CurvedLieAlgebra, Cdga)):
        space, d = obj.space, obj.d
    else:
        raise InputError("homology expects an algebra description")
    rep = homology(space, d, cfg.window)
    lines = [f"betti[{k}] = {v}" for k, v in sorted(rep.betti.items())]
    _report(cfg, rep.to_json(), lines, out)
    return 0


def cmd_functor_L(cfg: JobConfig, out, eps_text: str | None) -> int:
    A = _load_cdga(cfg.inputs[0])
    eps = None
    if eps_text:
        eps = {}
        for chunk in eps_text.split(","):
            name, sep, c = chunk.rpartition(":")
            if not sep or name.strip() not in A.space:
                raise InputError(f"bad retraction token {chunk!r}")
            eps[name.strip()] = serialize.parse_scalar(c)
        eps.setdefault(A.unit, Fraction(1))
    M = free_lie_model(A, eps=eps, cap=cfg.weight_cap)
    _emit(cfg, serialize.curved_to_json(M.algebra), out)
    return 0


def cmd_functor_C(cfg: JobConfig, out) -> int:
    g = _load_curved(cfg.inputs[0])
    M = chevalley_eilenberg(g, cfg.word_cap)
    _emit(cfg, serialize.cdga_to_json(M.algebra), out)
    return 0


def cmd_adjunction(cfg: JobConfig, out) -> int:
    g = _load_curved(cfg.inputs[0])
    A = _load_cdga(cfg.inputs[1])
    ce = chevalley_eilenberg(g, cfg.word_cap)
    flm = free_lie_model(A, cap=cfg.weight_cap)
    rng = rng_from_seed(cfg.seed)
    trips = 0
    ok = True
    for _ in range(5):
        images = {}
        for x in g.space.names():
            gen = ce.gen_of[x]
            deg = ce.algebra.space.degree(gen)
            val = A.space.zero()
            for n, dn in A.space.basis:
                if dn == deg and rng.random() < 0.7:
                    val = val + A.space.element(
                        n, Fraction(rng.randint(-3, 3)))
            images[gen] = val
        phi = CdgaMorphism(ce.algebra, A,
                           extend_algebra_morphism(ce, images, A))
        m = adjunction_forward(phi, ce, flm)
        phi_back = adjunction_backward(m, flm, ce)
        round_ok = all(phi_back.f.column(gen) == phi.f.column(gen)
                       for gen in images)
        m_back = adjunction_forward(phi_back, ce, flm)
        round_ok &= m_back.f == m.f and m_back.alpha == m.alpha
        ok &= round_ok
        trips += 1
    payload = {"verdict": "round-trips-exact" if ok else "round-trip-failure",
               "samples": trips,
               "caps": {"weight": cfg.weight_cap, "word": cfg.word_cap}}
    _report(cfg, payload, [f"adjunction round trips exact: {ok} "
                           f"({trips} samples)"], out)
    return 0 if ok else 1


def cmd_unit(cfg: JobConfig, out) -> int:
    A = _load_cdga(cfg.inputs[0])
    unit, flm, ce = unit_map(A, weight_cap=cfg.weight_cap,
                             word_cap=cfg.word_cap)
    rep = validate_cdga_morphism(unit)
    payload = {"verdict": "unit-map-valid" if rep.ok else "unit-map-invalid",
               "caps": {"weight": cfg.weight_cap, "word": cfg.word_cap}}
    _report(cfg, payload, [f"unit map valid below caps: {rep.ok}"], out)
    return 0 if rep.ok else 1


def cmd_counit(cfg: JobConfig, out) -> int:
    g = _load_curved(cfg.inputs[0])
    counit, ce, flm = counit_map(g, weight_cap=cfg.weight_cap,
                                 word_cap=cfg.word_cap)
    rep = validate_morphism(counit)
    payload = {"verdict": "counit-valid" if rep.ok else "counit-invalid",
               "caps": {"weight": cfg.weight_cap, "word": cfg.word_cap}}
    _report(cfg, payload, [f"counit valid within caps: {rep.ok}"], out)
    return 0 if rep.ok else 1


def cmd_mc_check(cfg: JobConfig, out, xi_text: str) -> int:
    g = _load_curved(cfg.inputs[0])
    xi = serialize.parse_element_arg(g.space, xi_text)
    residual = mc_residual(g, xi)
    flat = twist_flatness(g, xi)
    ok = residual.is_zero()
    payload = {"verdict": "maurer-cartan" if ok else "not-maurer-cartan",
               "residual": serialize.element_to_json(residual),
               "twist_flatness_agrees": flat.agree}
    _report(cfg, payload,
            [f"MC residual: {residual!r}", f"verdict: {ok}"], out)
    return 0 if ok else 1


def cmd_mc_solve(cfg: JobConfig, out) -> int:
    g = _load_curved(cfg.inputs[0])
    res = mc_solve_linear(g)
    payload = res.to_json()
    lines = [f"solver: {res.kind}"]
    if res.kind == "affine":
        lines.append(f"particular: {res.particular!r}")
        lines.append(f"free parameters: {len(res.kernel)}")
        payload["particular"] = serialize.element_to_json(res.particular)
        payload["kernel"] = [serialize.element_to_json(k) for k in res.kernel]
    if res.kind == "refusal":
        lines.append(f"obstructing bracket pair: {res.obstruction}")
    _report(cfg, payload, lines, out)
    return 0 if res.kind == "affine" else 1


def cmd_mc_homotopy(cfg: JobConfig, out, xi_text: str, eta_text: str,
                    witness_text: str) -> int:
    g = _load_curved(cfg.inputs[0])
    A = _load_cdga(cfg.inputs[1])
    base = tensor_lie_cdga(g, A)
    ctx, _ = path_context(g, A, cfg.poly_cap)
    xi = serialize.parse_element_arg(base.space, xi_text)
    eta = serialize.parse_element_arg(base.space, eta_text)
    witness = serialize.parse_element_arg(ctx.space, witness_text)
    rep = mc_homotopy_check(g, A, xi, eta, witness, z_cap=cfg.poly_cap)
    lines = [f"witness is MC: {rep.witness_is_mc}",
             f"endpoints match: {rep.endpoints_match}",
             f"verdict: {rep.verdict} (z-cap {rep.z_cap})"]
    _report(cfg, rep.to_json(), lines, out)
    return 0 if rep.verdict else 1


def cmd_mc_bijection(cfg: JobConfig, out) -> int:
    g = _load_curved(cfg.inputs[0])
    A = _load_cdga(cfg.inputs[1])
    rep = mc_hom_bijection_check(g, A, word_cap=cfg.word_cap)
    lines = [f"solution sets match: {rep.sets_match}",
             f"equivalence samples: {rep.equivalence_checked}",
             f"verdict: {rep.verdict}"]
    _report(cfg, rep.to_json(), lines, out)
    return 0 if rep.verdict else 1


def cmd_fqiso(cfg: JobConfig, out) -> int:
    m = _load_morphism(cfg.inputs[0])
    f_src = lower_central_series(m.source)
    f_tgt = lower_central_series(m.target)
    rep = filtered_qiso_check(m, f_src, f_tgt, cfg.window)
    lines = [f"filtered quasi-isomorphism: {rep.verdict}"]
    for w in sorted(rep.betti_source):
        lines.append(
            f"  weight {w}: source {rep.betti_source[w]} "
            f"target {rep.betti_target.get(w, {})}")
    _report(cfg, rep.to_json(), lines, out)
    return 0 if rep.verdict else 1


def cmd_fuzz(cfg: JobConfig, out, count: int) -> int:
    rng = rng_from_seed(cfg.seed)
    results = []
    ok = True
    for k in range(count):
        g = random_valid_algebra(rng)
        rep = validate_algebra(g)
        xi = None
        from .fuzz import random_element

        xi = random_element(rng, g.space, -1)
        flat = twist_flatness(g, xi)
        cand = random_candidate_algebra(rng)
        cand_rep = validate_algebra(cand)
        results.append({
            "instance": k,
            "valid_family_ok": rep.ok,
            "twist_flatness_agrees": flat.agree,
            "candidate_axioms_failing": sorted(cand_rep.failed_axioms()),
        })
        ok &= rep.ok and flat.agree
    payload = {"seed": cfg.seed, "count": count, "verdict": ok,
               "results": results}
    lines = [f"fuzz[{r['instance']}]: valid={r['valid_family_ok']} "
             f"twist-agrees={r['twist_flatness_agrees']} "
             f"candidate-fails={r['candidate_axioms_failing']}"
             for r in results]
    lines.append(f"verdict: {ok}")
    _report(cfg, payload, lines, out)
    return 0 if ok else 1


# -- wiring -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curvedlie",
        description="exact computations with curved Lie algebras",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, inputs, needs_caps=True):
        if inputs:
            p.add_argument("inputs", nargs=inputs, metavar="FILE")
        p.add_argument("--format", dest="fmt", choices=["text", "json"],
                       default="text")
        p.add_argument("--emit", default=None, help="write the result to a file")
        if needs_caps:
            p.add_argument("--weight", type=int,
                           default=_env_default("CURVEDLIE_WEIGHT_CAP", 4))
            p.add_argument("--words", type=int,
                           default=_env_default("CURVEDLIE_WORD_CAP", 3))
            p.add_argument("--poly", type=int,
                           default=_env_default("CURVEDLIE_POLY_CAP", 3))
        p.add_argument("--window", type=int, nargs=2, default=(-6, 2),
                       metavar=("LO", "HI"))
        p.add_argument("--seed", type=int, default=0)

    specs = {
        "validate": 1, "twist": 1, "product": "+", "equalise": 2,
        "coproduct": 2, "coequalise": 2, "lcs": 1, "gr": 1, "homology": 1,
        "functor-L": 1, "functor-C": 1, "adjunction": 2, "unit": 1,
        "counit": 1, "mc-check": 1, "mc-solve": 1, "mc-homotopy": 2,
        "mc-bijection": 2, "fqiso": 1, "fuzz": 0,
    }
    for name, count in specs.items():
        p = sub.add_parser(name)
        common(p, count)
        if name == "twist" or name == "mc-check":
            p.add_argument("--xi", required=True,
                           help='element as "name:coeff,name:coeff"')
        if name == "functor-L":
            p.add_argument("--eps", default=None,
                           help='retraction values as "name:coeff,..."')
        if name == "mc-homotopy":
            p.add_argument("--xi", required=True)
            p.add_argument("--eta", required=True)
            p.add_argument("--witness", required=True)
        if name == "fuzz":
            p.add_argument("--count", type=int, default=10)
    return parser


def run(argv: list[str], out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        cfg = JobConfig(
            subcommand=ns.subcommand,
            inputs=list(getattr(ns, "inputs", []) or []),
            weight_cap=getattr(ns, "weight", 4),
            word_cap=getattr(ns, "words", 3),
            poly_cap=getattr(ns, "poly", 3),
            window=tuple(ns.window),
            fmt=ns.fmt,
            seed=ns.seed,
            emit=ns.emit,
        )
        if cfg.subcommand == "validate":
            return cmd_validate(cfg, out)
        if cfg.subcommand == "twist":
            return cmd_twist(cfg, out, ns.xi)
        if cfg.subcommand == "product":
            return cmd_product(cfg, out)
        if cfg.subcommand == "equalise":
            return cmd_equalise(cfg, out)
        if cfg.subcommand == "coproduct":
            return cmd_coproduct(cfg, out)
        if cfg.subcommand == "coequalise":
            return cmd_coequalise(cfg, out)
        if cfg.subcommand == "lcs":
            return cmd_lcs(cfg, out)
        if cfg.subcommand == "gr":
            return cmd_gr(cfg, out)
        if cfg.subcommand == "homology":
            return cmd_homology(cfg, out)
        if cfg.subcommand == "functor-L":
            return cmd_functor_L(cfg, out, ns.eps)
        if cfg.subcommand == "functor-C":
            return cmd_functor_C(cfg, out)
        if cfg.subcommand == "adjunction":
            return cmd_adjunction(cfg, out)
        if cfg.subcommand == "unit":
            return cmd_unit(cfg, out)
        if cfg.subcommand == "counit":
            return cmd_counit(cfg, out)
        if cfg.subcommand == "mc-check":
            return cmd_mc_check(cfg, out, ns.xi)
        if cfg.subcommand == "mc-solve":
            return cmd_mc_solve(cfg, out)
        if cfg.subcommand == "mc-homotopy":
            return cmd_mc_homotopy(cfg, out, ns.xi, ns.eta, ns.witness)
        if cfg.subcommand == "mc-bijection":
            return cmd_mc_bijection(cfg, out)
        if cfg.subcommand == "fqiso":
            return cmd_fqiso(cfg, out)
        if cfg.subcommand == "fuzz":
            return cmd_fuzz(cfg, out, ns.count)
        raise InputError(f"unknown subcommand {cfg.subcommand!r}")
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))
