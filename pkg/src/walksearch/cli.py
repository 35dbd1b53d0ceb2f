"""Command-line front end: one subcommand per library entry point."""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import classical_walk as cw
from . import electric
from . import fast_forward as ff
from . import harness
from . import quantum_core as qc
from . import search as srch
from .errors import WalksearchError
from .graph_core import build_chain


def _emit(payload: dict, args) -> None:
    if getattr(args, "format", "json") == "csv":
        flat = _flatten(payload)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(flat.keys())
        writer.writerow([repr(v) if isinstance(v, float) else v for v in flat.values()])
        text = buf.getvalue()
    else:
        text = json.dumps(payload, indent=2, default=str) + "\n"
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _flatten(payload: dict, prefix: str = "") -> dict:
    flat: dict = {}
    for key, value in payload.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(_flatten(value, prefix=f"{name}."))
        elif isinstance(value, (list, tuple)):
            flat[name] = json.dumps(value)
        else:
            flat[name] = value
    return flat


def _load(args) -> tuple:
    instance = harness.load_instance(args.instance, strict=not args.lenient)
    g = instance.graph()
    sigma = instance.sigma()
    marked = sorted(instance.marked())
    return instance, g, sigma, marked


def _outcome_payload(name: str, out: srch.SearchOutcome) -> dict:
    cfg = out.config
    return {
        "algorithm": name,
        "success_probability": out.success_probability,
        "pre_amplification_probability": out.pre_amplification_probability,
        "flag_probability": out.flag_probability,
        "found": out.found,
        "counters": dict(out.counters),
        "details": dict(out.details),
        "config": {
            "T": cfg.T, "r_S": cfg.r_S, "eps_ff": cfg.eps_ff,
            "aa_rounds": cfg.aa_rounds, "seed": cfg.seed,
            "success_threshold": cfg.success_threshold,
        },
    }


def _search_config(args) -> srch.SearchConfig:
    return srch.SearchConfig(
        T=args.T,
        r_S=args.rS,
        eps_ff=args.eps_ff,
        aa_rounds=args.aa_rounds,
        seed=args.seed,
    )


def cmd_resistance(args) -> int:
    instance, g, sigma, marked = _load(args)
    r, flow = electric.effective_resistance(g, sigma, marked)
    payload = {
        "instance": instance.name,
        "R": r,
        "C": g.total_weight * r,
        "total_weight": g.total_weight,
        "flow_energy": flow.energy(),
    }
    _emit(payload, args)
    return 0


def cmd_hitting(args) -> int:
    instance, g, sigma, marked = _load(args)
    c = build_chain(g)
    payload = {
        "instance": instance.name,
        "hitting_time_from_sigma": cw.exact_hitting_time(c, marked, sigma),
        "hitting_time_from_stationary": cw.exact_hitting_time(c, marked),
    }
    _emit(payload, args)
    return 0


def cmd_simulate(args) -> int:
    instance, g, sigma, marked = _load(args)
    c = build_chain(g)
    path = cw.simulate(c, sigma, args.T, args.seed)
    names = [instance.vertices[i] for i in path]
    first_hit = next((i for i, v in enumerate(path) if v in set(marked)), None)
    _emit({"instance": instance.name, "trajectory": names, "first_marked_index": first_hit}, args)
    return 0


def cmd_qwalk_verify(args) -> int:
    instance, g, sigma, marked = _load(args)
    c = build_chain(g)
    d = qc.discriminant(c)
    w = qc.szegedy_walk(c)
    tol = args.tolerance
    rows = {"szegedy": qc.verify_block_encoding(w, d.matrix, tol)}
    for s in (0.0, 0.25, 0.5, 0.9):
        if marked:
            target = qc.discriminant(cw.interpolate_absorbing(c, marked, s)).matrix if s else d.matrix
            rows[f"interpolated_s={s}"] = qc.verify_block_encoding(
                qc.interpolated_walk_unitary(w, marked, s), target, tol
            )
    C = instance.C if instance.C is not None else 2.0
    if sigma.support:
        lam = qc.lambda_unitary(sigma, c.pi, C)
        mod = electric.build_modified_graph(g, sigma, marked, C)
        dm = qc.discriminant(build_chain(mod.graph))
        target = qc.embed_modified_discriminant(dm, mod.base_size, mod.support)
        rows["gadget"] = qc.verify_block_encoding(qc.modified_walk_unitary(w, lam), target, tol)
    verdict = "pass" if all(v <= tol for v in rows.values()) else "fail"
    _emit({"instance": instance.name, "tolerance": tol, "deviations": rows, "verdict": verdict}, args)
    return 0 if verdict == "pass" else 1


def cmd_fastforward(args) -> int:
    instance, g, sigma, marked = _load(args)
    c = build_chain(g)
    d = qc.discriminant(c)
    w = qc.szegedy_walk(c)
    u = ff.fast_forward_unitary(w, args.t, args.eps)
    blk = u.block()
    dev = float(np.linalg.norm(blk - np.linalg.matrix_power(d.matrix, args.t), 2))
    payload = {
        "instance": instance.name,
        "t": args.t,
        "eps": args.eps,
        "block_deviation": dev,
        "bound": 2 * args.eps,
        "walk_calls": u.counters["walk"],
        "degree": u.counters["degree"],
        "verdict": "pass" if dev <= 2 * args.eps else "fail",
    }
    _emit(payload, args)
    return 0 if dev <= 2 * args.eps else 1


def cmd_search_ff(args) -> int:
    instance, g, sigma, marked = _load(args)
    c = build_chain(g)
    cfg = _search_config(args)
    if args.sweep_doubling:
        out, history = srch.doubling_sweep(c, sigma, marked, cfg, C=instance.C)
        payload = _outcome_payload("fastforward", out)
        payload["sweep"] = {str(T): p for T, p in history.items()}
    else:
        out = srch.search_fastforward(c, sigma, marked, cfg, C=instance.C)
        payload = _outcome_payload("fastforward", out)
    payload["found_name"] = instance.vertices[out.found] if out.found is not None else None
    _emit(payload, args)
    return 0


def cmd_search_simple(args) -> int:
    instance, g, sigma, marked = _load(args)
    c = build_chain(g)
    out = srch.search_simple(c, sigma, marked, _search_config(args), C=instance.C)
    payload = _outcome_payload("simple", out)
    payload["single_shot_probability"] = out.pre_amplification_probability
    payload["found_name"] = instance.vertices[out.found] if out.found is not None else None
    _emit(payload, args)
    return 0


def cmd_search_tstep(args) -> int:
    instance, g, sigma, marked = _load(args)
    c = build_chain(g)
    out = srch.search_tstep(c, sigma, marked, args.t_inner, _search_config(args), C=instance.C)
    payload = _outcome_payload("tstep", out)
    payload["found_name"] = instance.vertices[out.found] if out.found is not None else None
    _emit(payload, args)
    return 0


def cmd_suite(args) -> int:
    report = harness.run_suite(args.name, args.seed)
    text = (
        harness.report_to_csv(report, include_timing=args.timing)
        if args.format == "csv"
        else harness.report_to_json(report, include_timing=args.timing)
    )
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="walksearch",
        description="Quantum walk search on electric networks, evaluated exactly.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, instance=True):
        if instance:
            p.add_argument("instance", help="instance JSON file")
            p.add_argument("--lenient", action="store_true", help="warn on unknown fields instead of failing")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tolerance", type=float, default=1e-10)
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--out", default=None, help="write output here instead of stdout")

    def search_flags(p):
        p.add_argument("--T", type=int, default=64)
        p.add_argument("--rS", type=float, default=None)
        p.add_argument("--eps-ff", dest="eps_ff", type=float, default=None)
        p.add_argument("--aa-rounds", dest="aa_rounds", type=int, default=None)
        p.add_argument("--t-inner", dest="t_inner", type=int, default=1)
        p.add_argument("--sweep-doubling", action="store_true")

    p = sub.add_parser("resistance", help="effective resistance and its commute quantity")
    common(p)
    p.set_defaults(fn=cmd_resistance)

    p = sub.add_parser("hitting", help="exact hitting times by first-step analysis")
    common(p)
    p.set_defaults(fn=cmd_hitting)

    p = sub.add_parser("simulate", help="one seeded random-walk trajectory")
    common(p)
    p.add_argument("--T", type=int, default=32)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("qwalk-verify", help="check every walk unitary against its block target")
    common(p)
    p.set_defaults(fn=cmd_qwalk_verify)

    p = sub.add_parser("fastforward", help="fast-forward a walk power and report the deviation")
    common(p)
    p.add_argument("--t", type=int, default=8)
    p.add_argument("--eps", type=float, default=1e-2)
    p.set_defaults(fn=cmd_fastforward)

    p = sub.add_parser("search-ff", help="fast-forwarding search")
    common(p)
    search_flags(p)
    p.set_defaults(fn=cmd_search_ff)

    p = sub.add_parser("search-simple", help="simpler interpolated-walk search")
    common(p)
    search_flags(p)
    p.set_defaults(fn=cmd_search_simple)

    p = sub.add_parser("search-tstep", help="search against the t-step chain")
    common(p)
    search_flags(p)
    p.set_defaults(fn=cmd_search_tstep)

    p = sub.add_parser("suite", help="run an invariant suite and emit its report")
    p.add_argument("name", choices=harness.suite_names())
    common(p, instance=False)
    p.add_argument("--timing", action="store_true", help="include wall times (breaks byte-reproducibility)")
    p.set_defaults(fn=cmd_suite)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except WalksearchError as e:
        sys.stderr.write(f"error: {e}\n")
        return 2
    except FileNotFoundError as e:
        sys.stderr.write(f"error: {e}\n")
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
