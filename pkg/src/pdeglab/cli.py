"""Command-line experiment runner.  Every run writes one JSON report; tables are rendered from it."""
from __future__ import annotations

import argparse
import json
import os
import sys
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import agreement, hadamard, orpoly, probpoly, projection
from .boolfn import (BooleanFunction, block_sensitivity, bitstring, is_truly_n_variate, or_function,
                     parse_bitstring, parse_function, sensitivity)
from .dtree import DecisionTree, decision_tree_depth
from .polynomial import exact_degree, mobius_interpolate

SCHEMA_VERSION = "1.0.0"
EXACT_SCAN_CAP = 20


class UsageError(Exception):
    pass


class SchemaMismatch(ValueError):
    pass


def report_schema_version() -> str:
    return SCHEMA_VERSION


def load_report(path: str | Path) -> dict:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if data.get("schema") != SCHEMA_VERSION:
        raise SchemaMismatch(f"report schema {data.get('schema')!r}, expected {SCHEMA_VERSION}")
    return data


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _function(text: str) -> BooleanFunction:
    try:
        return parse_function(text)
    except (ValueError, OSError) as exc:
        raise UsageError(f"cannot read function {text!r}: {exc}") from exc


def _scan_inputs(scan: str, n: int, seed: int, exhaustive_cap: int = EXACT_SCAN_CAP) -> list[int]:
    if scan == "exhaustive":
        if n > exhaustive_cap:
            raise UsageError(f"exhaustive scan over {n} variables exceeds cap {exhaustive_cap}")
        return list(range(1 << n))
    if scan.startswith("random:"):
        k = int(scan.split(":", 1)[1])
        rng = probpoly.rng_for(seed)
        return [int(sum(int(b) << i for i, b in enumerate(rng.integers(0, 2, n)))) for _ in range(k)]
    raise UsageError(f"unknown scan mode {scan!r}")


# --- subcommands --------------------------------------------------------------------------

def cmd_orpoly(args) -> dict:
    pp = orpoly.or_prob_poly(args.n, args.eps)
    xs = _scan_inputs(args.scan, args.n, args.seed)
    rep = probpoly.error_scan(pp, or_function(args.n), xs, trials=args.trials, seed_0=args.seed,
                              confidence=args.confidence, jobs=args.jobs)
    family = orpoly.ScaledSubsetFamily.generate(args.n, pp.info["p"], args.seed)
    zero_exact = all(pp.sample(s).at_cube(0) == 0 for s in range(args.seed, args.seed + min(args.trials, 1000)))
    ok = rep.within(args.eps) and zero_exact
    return {
        "result": {"p": pp.info["p"], "scales": pp.info["scales"], "subsets": len(family),
                   "subset_sizes": family.sizes(), "degree_bound": pp.degree_bound,
                   "zero_input_exact": zero_exact, "errors": rep.to_json()},
        "verification": {"passed": ok, "bound": float(args.eps)},
    }


def cmd_orredn(args) -> dict:
    f = _function(args.function)
    norm = orpoly.normalize_sensitive(f)
    if args.mode == "family":
        p = orpoly.repetitions(Fraction(1, 10))
        counts = orpoly.family_disagreements(norm.g, p, args.seed, args.trials)
        radius = probpoly.hoeffding_radius(args.trials, args.confidence)
        records = [{"input": bitstring(a, norm.s), "estimate": int(c) / args.trials, "trials": args.trials,
                    "radius": radius} for a, c in enumerate(counts)]
        worst = max(r["estimate"] for r in records)
        ok = worst <= 0.1 + radius
        result = {"p": p, "ell": p * orpoly.num_scales(norm.s), "normalization": norm.to_json(),
                  "errors": {"records": records, "summary": {"max_error": worst, "seed_0": args.seed}}}
        return {"result": result, "verification": {"passed": ok, "bound": 0.1}}
    if f.arity > EXACT_SCAN_CAP:
        raise UsageError("pipeline mode needs an explicit polynomial for f")
    pp = orpoly.or_from_function(f, probpoly.lift_exact(mobius_interpolate(f)), Fraction(0))
    rep = probpoly.error_scan(pp, or_function(pp.arity), trials=args.trials, seed_0=args.seed,
                              confidence=args.confidence, jobs=args.jobs)
    ok = rep.within(Fraction(1, 3))
    info = dict(pp.info)
    return {"result": {**info, "degree_bound": pp.degree_bound, "errors": rep.to_json()},
            "verification": {"passed": ok, "bound": 1 / 3}}


def cmd_ubd(args) -> dict:
    if args.r is None and args.c is None:
        raise UsageError("one of --r or --c is required")
    r = args.r if args.r is not None else hadamard.choose_params(args.t, args.c, args.eps_q).r
    inst = hadamard.UbdInstance(args.t, r)
    q = hadamard.build_Q(inst, args.eps_q)
    pp = hadamard.assemble_P(inst, q)
    witnesses = hadamard.influence_witnesses(inst)
    if args.scan == "structured":
        xs = hadamard.structured_inputs(inst, args.seed)
    elif args.scan.startswith("random:"):
        xs = hadamard.random_inputs(inst, int(args.scan.split(":", 1)[1]), args.seed)
    else:
        xs = _scan_inputs(args.scan, inst.n, args.seed)
    truth = np.array([hadamard.ubd_eval(inst, a) for a in xs], dtype=np.int64)
    counts = probpoly.mismatch_counts(pp, truth, probpoly.mask_array(xs, inst.n), args.seed, args.trials, args.jobs)
    radius = probpoly.hoeffding_radius(args.trials, args.confidence)
    records = [{"input": bitstring(a, inst.n), "estimate": int(c) / args.trials, "trials": args.trials,
                "radius": radius} for a, c in zip(xs, counts)]
    worst = max((rec["estimate"] for rec in records), default=0.0)
    ok = worst <= float(args.eps_q) + radius
    return {
        "result": {"t": inst.t, "r": inst.r, "n": inst.n, "q_degree": q.degree_bound,
                   "degree_bound": pp.degree_bound,
                   "witnesses": [{"variable": v, "input": bitstring(a, inst.n)} for v, a in witnesses.items()],
                   "errors": {"records": records,
                              "summary": {"max_error": worst, "degree_bound": pp.degree_bound, "seed_0": args.seed}}},
        "verification": {"passed": ok and len(witnesses) == inst.n, "bound": float(args.eps_q)},
    }


def cmd_lbd(args) -> dict:
    f = _function(args.function)
    tree = None
    if args.tree:
        tree = DecisionTree.from_json(json.loads(Path(args.tree).read_text(encoding="utf-8")))
    cert = projection.extract_pseudoaddressing(f, args.seed, tree=tree)
    payload = cert.to_json()
    if args.emit_cert:
        Path(args.emit_cert).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    verified = projection.verify_certificate(cert) if args.verify else None
    result = {"r": cert.r, "t": cert.t, "depth": cert.source_depth, "independent": len(cert.independent),
              "attempts": cert.attempts, "verified": verified, "certificate": payload}
    return {"result": result, "verification": {"passed": verified is not False}}


def _read_points(spec: str) -> tuple[int, list[int]]:
    if spec.startswith("all:"):
        m = int(spec.split(":", 1)[1])
        return m, list(range(1 << m))
    lines = [ln.strip() for ln in Path(spec).read_text(encoding="utf-8").splitlines() if ln.strip()]
    if not lines:
        raise UsageError("points file is empty")
    m = len(lines[0])
    if any(len(ln) != m for ln in lines):
        raise UsageError("points must all have the same length")
    return m, [parse_bitstring(ln) for ln in lines]


def cmd_oracle(args) -> dict:
    m, points = _read_points(args.points)
    if args.mode.startswith("fraction:"):
        what = args.mode.split(":", 1)[1]
        trials = None if what == "exact" else int(what)
        est = agreement.bad_fraction(m, points, args.degree, trials, args.seed, args.confidence)
        return {"result": {"m": m, "M": len(points), "fraction": est.to_json()}, "verification": {"passed": True}}
    if args.function is None:
        raise UsageError(f"--function is required for mode {args.mode}")
    f = _function(args.function)
    if f.arity != m:
        raise UsageError(f"function has arity {f.arity}, points have length {m}")
    inst = agreement.AgreementInstance.of(f, points, args.degree)
    if args.mode == "max-agreement":
        found = agreement.max_agreement(inst)
        ok = agreement.witness_matches(inst, found)
        return {"result": {"m": m, "M": inst.size, **found.to_json(m)}, "verification": {"passed": ok}}
    if args.mode == "bad":
        bad = agreement.is_bad(inst)
        return {"result": {"m": m, "M": inst.size, "threshold": inst.threshold, "bad": bad,
                           "certifies_pdeg_above": None if bad else args.degree},
                "verification": {"passed": True}}
    raise UsageError(f"unknown oracle mode {args.mode!r}")


def cmd_measure(args) -> dict:
    f = _function(args.function)
    s, witness = sensitivity(f)
    result = {"arity": f.arity, "degree": exact_degree(f), "sensitivity": s,
              "sensitivity_witness": bitstring(witness, f.arity), "block_sensitivity": block_sensitivity(f),
              "decision_tree_depth": decision_tree_depth(f), "truly_n_variate": is_truly_n_variate(f)}
    return {"result": result, "verification": {"passed": True}}


COMMANDS = {"orpoly": cmd_orpoly, "orredn": cmd_orredn, "ubd": cmd_ubd, "lbd": cmd_lbd,
            "oracle": cmd_oracle, "measure": cmd_measure}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pdeglab", description="Probabilistic-degree experiments.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, required=True)
    common.add_argument("--out", help="write the JSON report here")
    common.add_argument("--format", choices=("json", "table"), default="json", help="stdout rendering")
    common.add_argument("--jobs", type=int, default=None, help="worker processes (default: $PDEGLAB_JOBS or 1)")
    common.add_argument("--confidence", type=_fraction, default=probpoly.DEFAULT_CONFIDENCE)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("orpoly", parents=[common], help="scaled-subset OR polynomial")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eps", type=_fraction, default=Fraction(1, 10))
    p.add_argument("--scan", default="exhaustive")
    p.add_argument("--trials", type=int, default=10_000)

    p = sub.add_parser("orredn", parents=[common], help="reduction from a sensitive function to OR")
    p.add_argument("--function", required=True)
    p.add_argument("--mode", choices=("family", "pipeline"), default="family")
    p.add_argument("--trials", type=int, default=2_000)

    p = sub.add_parser("ubd", parents=[common], help="Hadamard-addressing upper-bound construction")
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--r", type=int)
    p.add_argument("--c", type=_fraction)
    p.add_argument("--eps-q", type=_fraction, default=Fraction(1, 3))
    p.add_argument("--scan", default="structured")
    p.add_argument("--trials", type=int, default=2_000)

    p = sub.add_parser("lbd", parents=[common], help="pseudo-addressing projection certificate")
    p.add_argument("--function", required=True)
    p.add_argument("--tree", help="decision tree JSON to use instead of a minimum-depth tree")
    p.add_argument("--emit-cert")
    p.add_argument("--verify", action="store_true")

    p = sub.add_parser("oracle", parents=[common], help="exact agreement oracle")
    p.add_argument("--points", required=True, help="file of bit strings, or all:<m>")
    p.add_argument("--function")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--mode", default="max-agreement", help="max-agreement | bad | fraction:<trials> | fraction:exact")

    p = sub.add_parser("measure", parents=[common], help="exact complexity measures of a function")
    p.add_argument("--function", required=True)
    return parser


def _config(args) -> dict:
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in ("out", "format", "jobs"):
            continue
        out[k] = str(v) if isinstance(v, Fraction) else v
    return out


def render_table(report: dict) -> str:
    lines = [f"{report['command']}  (schema {report['schema']})"]
    for k, v in report["config"].items():
        lines.append(f"  {k:<14} {v}")
    lines.append("")
    res = report["result"]
    for k, v in res.items():
        if isinstance(v, (dict, list)):
            continue
        lines.append(f"  {k:<22} {v}")
    errors = res.get("errors")
    if isinstance(errors, dict) and errors.get("records"):
        lines.append("")
        lines.append(f"  {'input':<28} {'estimate':>10} {'radius':>10}")
        for rec in errors["records"]:
            radius = rec.get("radius")
            lines.append(f"  {rec['input']:<28} {rec['estimate']:>10.5f} "
                         f"{'-' if radius is None else format(radius, '.5f'):>10}")
    lines.append("")
    lines.append(f"  verification: {'PASS' if report['verification']['passed'] else 'FAIL'}")
    return "\n".join(lines)


def run(argv: list[str] | None = None) -> tuple[int, dict | None]:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        body = COMMANDS[args.command](args)
    except (UsageError, ValueError) as exc:
        print(f"pdeglab: error: {exc}", file=sys.stderr)
        return 2, None
    report = {"schema": SCHEMA_VERSION, "command": args.command, "config": _config(args), **body,
              "timestamp": os.environ.get("PDEGLAB_TIMESTAMP") or datetime.now(timezone.utc).isoformat()}
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    sys.stdout.write(render_table(json.loads(text)) + "\n" if args.format == "table" else text)
    return (0 if report["verification"]["passed"] else 1), report


def main(argv: list[str] | None = None) -> int:
    try:
        code, _ = run(argv)
    except SystemExit as exc:   # argparse reports usage errors with status 2
        return int(exc.code or 0)
    return code


if __name__ == "__main__":
    sys.exit(main())
