"""Command-line front end.

Loads schedules/vectors from JSON, dispatches the library computations and
writes deterministic CSV/JSON artifacts (fixed key order, floats at 17
significant digits, atomic replace).  Exit codes: 0 success, 1 failed
mathematical assertion or infeasible request (with a JSON diagnostic on
stderr), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass
from typing import Optional

from . import acceptance
from .approx import ApproxParams, optimality_experiment
from .democracy import (
    cghm_construct,
    condition71_check,
    demfun_table,
    doubling_scan,
    h_function_from_json,
    prefix_norm_conjecture_check,
)
from .errors import GreedyLabError
from .greedy import error_sequence, gamma, sigma_exact, DEFAULT_TIE_BUDGET
from .approx import DEFAULT_TERM_BUDGET
from .spaces import SpaceSpec, space_from_json, space_norm
from .vectors import CompressedVector


@dataclass
class RunConfig:
    seed: int
    budget_ties: int
    budget_terms: int
    out: Optional[str]


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def write_text(path: Optional[str], text: str) -> None:
    """Write atomically (temp file + rename); None writes to stdout."""
    if path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-greedylab-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit_report(report: dict | list, fmt: str, path: Optional[str]) -> None:
    if fmt == "json":
        write_text(path, json.dumps(report, sort_keys=True, indent=2) + "\n")
    elif fmt == "csv":
        rows = report if isinstance(report, list) else report["rows"]
        if not rows:
            write_text(path, "")
            return
        header = list(rows[0].keys())
        lines = [",".join(header)]
        for row in rows:
            lines.append(",".join(str(row[h]) for h in header))
        write_text(path, "\n".join(lines) + "\n")
    else:
        raise ValueError(f"unknown format {fmt!r}")


def _load_json(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _load_space(path: str) -> SpaceSpec:
    return space_from_json(_load_json(path))


def _load_schedule_space(path: str) -> SpaceSpec:
    spec = _load_space(path)
    if spec.schedule is None:
        raise ValueError(f"{path} does not describe a block schedule")
    return spec


def _norm_json(nv) -> dict:
    return {
        "float": float(nv),
        "power_exact": None if nv.power_exact is None else str(nv.power_exact),
        "p": nv.p,
    }


def _parse_int_list(text: str) -> list[int]:
    """Accept '1,2,5' and '1..4' range syntax."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def _parse_float_list(text: str) -> list[float]:
    return [math.inf if p.strip() in ("inf", "Inf") else float(p) for p in text.split(",")]


# ---------------------------------------------------------------------------
# Subcommands


def cmd_norm(args, cfg: RunConfig) -> int:
    spec = _load_space(args.space)
    x = CompressedVector.load(args.vector)
    emit_report(_norm_json(space_norm(x, spec)), "json", cfg.out)
    return 0


def cmd_sigma(args, cfg: RunConfig) -> int:
    spec = _load_space(args.space)
    x = CompressedVector.load(args.vector)
    nv = sigma_exact(x, args.N, spec)
    emit_report({"N": args.N, "sigma": _norm_json(nv)}, "json", cfg.out)
    return 0


def cmd_gamma(args, cfg: RunConfig) -> int:
    spec = _load_space(args.space)
    x = CompressedVector.load(args.vector)
    out = gamma(x, args.N, spec, tie_budget=cfg.budget_ties)
    emit_report(
        {
            "N": args.N,
            "gamma": _norm_json(out.residual_max),
            "gamma_min": _norm_json(out.residual_min),
            "witness_max": [list(t) for t in out.witness_max],
            "witness_min": [list(t) for t in out.witness_min],
        },
        "json",
        cfg.out,
    )
    return 0


def cmd_errors(args, cfg: RunConfig) -> int:
    spec = _load_space(args.space)
    x = CompressedVector.load(args.vector)
    sig = error_sequence(x, spec, "sigma", tie_budget=cfg.budget_ties)
    gam = error_sequence(x, spec, "gamma", tie_budget=cfg.budget_ties)
    last = sig.support_size if args.max_k is None else min(args.max_k, sig.support_size)
    rows = []
    for k in range(last + 1):
        rows.append(
            {
                "k": k,
                "sigma_sq": str(sig.power(k)),
                "gamma_sq": str(gam.power(k)),
                "sigma_float": fmt_float(sig.value(k)),
                "gamma_float": fmt_float(gam.value(k)),
            }
        )
    emit_report(rows, "csv", cfg.out)
    return 0


def cmd_demfun(args, cfg: RunConfig) -> int:
    spec = _load_space(args.space)
    table = demfun_table(spec, args.max_N)
    rows = []
    for n in range(args.max_N + 1):
        rows.append(
            {
                "N": n,
                "hl_sq": table.hl_power(n),
                "hr_sq": table.hr_power(n),
                "hl_float": fmt_float(table.hl(n)),
                "hr_float": fmt_float(table.hr(n)),
            }
        )
    emit_report(rows, "csv", cfg.out)
    return 0


def cmd_doubling_scan(args, cfg: RunConfig) -> int:
    spec = _load_schedule_space(args.space)
    report = doubling_scan(spec.schedule, _parse_int_list(args.k))
    rows = []
    for r in report.rows:
        rows.append(
            {
                "k": r.k,
                "n_k": r.n_k,
                "n_k1": r.n_k1,
                "a_k1": r.a_k1,
                "hl_n_sq": r.hl_n_power,
                "hl_2n_sq": r.hl_2n_power,
                "ratio_sq": str(r.ratio_sq),
                "bound_sq": str(r.bound_sq),
                "ratio_float": fmt_float(math.sqrt(float(r.ratio_sq))),
                "bound_float": fmt_float(math.sqrt(float(r.bound_sq))),
                "bound_holds": r.bound_holds,
                "upper_equality": r.upper_equality,
            }
        )
    emit_report(rows, "csv", cfg.out)
    if not all(r.bound_holds and r.upper_holds for r in report.rows):
        _diag("doubling-scan: a guaranteed bound failed", rows=rows)
        return 1
    return 0


def cmd_prefix_check(args, cfg: RunConfig) -> int:
    spec = _load_schedule_space(args.space)
    report = prefix_norm_conjecture_check(spec.schedule, range(1, args.max_N + 1))
    rows = [
        {"N": n, "prefix_sq": pre, "hl_sq": hl, "equal": pre == hl}
        for n, pre, hl in report.rows
    ]
    emit_report(rows, "csv", cfg.out)
    if report.counterexamples:
        sys.stderr.write(
            "prefix-check: counterexamples at N = "
            + ", ".join(str(n) for n in report.counterexamples)
            + "\n"
        )
    return 0


def cmd_cghm(args, cfg: RunConfig) -> int:
    h_l = h_function_from_json(_load_json(args.hl))
    h_r = h_function_from_json(_load_json(args.hr))
    seqs = cghm_construct(
        h_r, h_l, args.c_doubling, args.alpha, args.count, args.probe_limit
    )
    emit_report(
        {
            "w": list(seqs.w),
            "r": list(seqs.r_of_mu),
            "k": list(seqs.k),
            "n": list(seqs.n),
            "c_doubling": seqs.c_doubling,
            "alpha": seqs.alpha,
            "exhausted": seqs.exhausted,
            "exhausted_reason": seqs.exhausted_reason,
            "checks": list(seqs.checks),
        },
        "json",
        cfg.out,
    )
    if seqs.checks and not seqs.all_checks_pass():
        _diag("cghm: a verification check failed")
        return 1
    return 0


def cmd_check71(args, cfg: RunConfig) -> int:
    h_l = h_function_from_json(_load_json(args.hl))
    h_r = h_function_from_json(_load_json(args.hr))
    obj = _load_json(args.pairs)
    if isinstance(obj, dict) and "k" in obj and "n" in obj:
        pairs = list(zip(obj["k"], obj["n"]))
    elif isinstance(obj, dict):
        pairs = [tuple(p) for p in obj["pairs"]]
    else:
        pairs = [tuple(p) for p in obj]
    report = condition71_check(h_r, h_l, pairs, args.C, args.alpha)
    emit_report({"rows": list(report.rows), "all_pass": report.all_pass}, "json", cfg.out)
    return 0 if report.all_pass else 1


def cmd_xs_experiment(args, cfg: RunConfig) -> int:
    spec = _load_schedule_space(args.schedule)
    params = [
        ApproxParams(alpha, q)
        for alpha in _parse_float_list(args.alpha)
        for q in _parse_float_list(args.q)
    ]
    report = optimality_experiment(
        spec.schedule,
        _parse_int_list(args.s),
        params,
        term_budget=cfg.budget_terms,
        mode=args.mode,
    )
    emit_report(report.to_json(), "json", cfg.out)
    return 0


def cmd_verify(args, cfg: RunConfig) -> int:
    only = _parse_int_list(args.only) if args.only else None
    results = acceptance.run_all(only=only, stream=sys.stdout)
    return 0 if all(r.passed for r in results) else 1


def _diag(message: str, **extra) -> None:
    sys.stderr.write(json.dumps({"error": message, **extra}, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------


def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    """Shared flags, accepted both before and after the subcommand.

    The subcommand copies use SUPPRESS defaults so they never clobber a
    value parsed at the top level (argparse applies subparser defaults to
    a fresh namespace); fresh parser instances per call keep the action
    objects unshared.
    """
    holder = argparse.ArgumentParser(add_help=False)
    d = argparse.SUPPRESS if suppress else None
    holder.add_argument(
        "--seed",
        type=int,
        default=argparse.SUPPRESS if suppress else 0,
        help="seed for randomized checks",
    )
    holder.add_argument(
        "--budget-ties",
        type=int,
        default=argparse.SUPPRESS if suppress else DEFAULT_TIE_BUDGET,
    )
    holder.add_argument(
        "--budget-terms",
        type=int,
        default=argparse.SUPPRESS if suppress else DEFAULT_TERM_BUDGET,
    )
    holder.add_argument("--out", default=d, help="output path (default stdout)")
    return holder


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags(suppress=True)
    parser = argparse.ArgumentParser(
        prog="greedylab",
        description="Greedy-approximation quantities for block sequence spaces.",
        parents=[_global_flags(suppress=False)],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("norm", help="space norm of a vector", parents=[common])
    sp.add_argument("--space", required=True)
    sp.add_argument("--vector", required=True)
    sp.set_defaults(func=cmd_norm)

    sp = sub.add_parser("sigma", help="best N-term error", parents=[common])
    sp.add_argument("--space", required=True)
    sp.add_argument("--vector", required=True)
    sp.add_argument("--N", type=int, required=True)
    sp.set_defaults(func=cmd_sigma)

    sp = sub.add_parser("gamma", help="worst-case greedy error", parents=[common])
    sp.add_argument("--space", required=True)
    sp.add_argument("--vector", required=True)
    sp.add_argument("--N", type=int, required=True)
    sp.set_defaults(func=cmd_gamma)

    sp = sub.add_parser("errors", help="full sigma/gamma table as CSV", parents=[common])
    sp.add_argument("--space", required=True)
    sp.add_argument("--vector", required=True)
    sp.add_argument("--max-k", type=int, default=None)
    sp.set_defaults(func=cmd_errors)

    sp = sub.add_parser("demfun", help="democracy-function table as CSV", parents=[common])
    sp.add_argument("--space", required=True)
    sp.add_argument("--max-N", type=int, required=True)
    sp.set_defaults(func=cmd_demfun)

    sp = sub.add_parser("doubling-scan", help="h_l doubling ratios per block", parents=[common])
    sp.add_argument("--space", required=True)
    sp.add_argument("--k", required=True, help="block indices, e.g. 1..3 or 1,2")
    sp.set_defaults(func=cmd_doubling_scan)

    sp = sub.add_parser("prefix-check", help="h_l vs first-N-unit-vectors norm", parents=[common])
    sp.add_argument("--space", required=True)
    sp.add_argument("--max-N", type=int, required=True)
    sp.set_defaults(func=cmd_prefix_check)

    sp = sub.add_parser("cghm", help="construct 7.1 witness sequences", parents=[common])
    sp.add_argument("--hl", required=True)
    sp.add_argument("--hr", required=True)
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--c-doubling", type=float, default=2.0)
    sp.add_argument("--count", type=int, default=5)
    sp.add_argument("--probe-limit", type=int, default=2**63)
    sp.set_defaults(func=cmd_cghm)

    sp = sub.add_parser("check71", help="check the 7.1 condition on pairs", parents=[common])
    sp.add_argument("--hl", required=True)
    sp.add_argument("--hr", required=True)
    sp.add_argument("--pairs", required=True)
    sp.add_argument("--C", type=float, default=1.0)
    sp.add_argument("--alpha", type=float, required=True)
    sp.set_defaults(func=cmd_check71)

    sp = sub.add_parser("xs-experiment", help="optimality-ratio experiment", parents=[common])
    sp.add_argument("--schedule", required=True)
    sp.add_argument("--s", required=True, help="comma list, e.g. 2,3,4")
    sp.add_argument("--alpha", required=True, help="comma list of alphas")
    sp.add_argument("--q", required=True, help="comma list, inf allowed")
    sp.add_argument("--mode", choices=("exact", "bounds"), default="exact")
    sp.set_defaults(func=cmd_xs_experiment)

    sp = sub.add_parser("verify", help="run the acceptance suite", parents=[common])
    sp.add_argument("--only", default=None, help="criteria subset, e.g. 1,3,7")
    sp.set_defaults(func=cmd_verify)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.budget_ties <= 0 or args.budget_terms <= 0:
        parser.error("budgets must be positive")  # exits 2
    cfg = RunConfig(
        seed=args.seed,
        budget_ties=args.budget_ties,
        budget_terms=args.budget_terms,
        out=args.out,
    )
    try:
        return args.func(args, cfg)
    except (GreedyLabError, ValueError, OSError, KeyError) as exc:
        _diag(f"{type(exc).__name__}: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
