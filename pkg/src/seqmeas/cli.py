"""Command-line front end.

Subcommands: ``analytic`` (exact outcome distributions), ``sample``
(seeded Born-rule Monte Carlo with an analytic side-by-side), ``discriminate``
(simulated hypothesis test between two scenario files), and ``paper-check``
(built-in reference checks).

Exit codes: 0 ok, 1 check failure, 2 parse error, 3 invariant violation,
4 indistinguishable predictions.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from .discriminate import HypothesisTestReport, run_discrimination
from .errors import IndistinguishableError, InvariantError, ScenarioParseError
from .measurement import OutcomeDistribution, marginal, run_chain_analytic, sample_chain
from .scenario_io import format_float, format_label, format_sequence, label_to_json, load_scenario
from .selfcheck import run_all


def _print_table(headers: list[str], rows: list[list[str]]) -> None:
    widths = [
        max(len(h), *(len(r[i]) for r in rows)) if rows else len(h)
        for i, h in enumerate(headers)
    ]
    print("  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip())
    for row in rows:
        print("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())


def _print_csv(headers: list[str], rows: list[list[str]]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(headers)
    writer.writerows(rows)
    sys.stdout.write(buf.getvalue())


def _emit(fmt: str, headers: list[str], rows: list[list[str]], payload: dict) -> None:
    if fmt == "json":
        print(json.dumps(payload, indent=2))
    elif fmt == "csv":
        _print_csv(headers, rows)
    else:
        _print_table(headers, rows)


def _state_to_json(state):
    if state is None:
        return None
    return [[float(z.real), float(z.imag)] for z in state.amps]


def _log_odds_to_json(value: float):
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return value


def cmd_analytic(args) -> int:
    scn = load_scenario(args.file)
    dist = run_chain_analytic(scn)
    if args.marginal is not None:
        marg = marginal(dist, args.marginal)
        headers = ["outcome", "probability"]
        rows = [[format_label(k), format_float(p)] for k, p in marg.items()]
        payload = {
            "command": "analytic",
            "marginal": args.marginal,
            "entries": [
                {"outcome": label_to_json(k), "probability": p} for k, p in marg.items()
            ],
        }
    else:
        headers = ["outcome", "probability"]
        rows = [[format_sequence(seq), format_float(p)] for seq, (p, _) in dist]
        payload = {
            "command": "analytic",
            "marginal": None,
            "entries": [
                {
                    "outcome": [label_to_json(l) for l in seq],
                    "probability": p,
                    "final_state": _state_to_json(final),
                }
                for seq, (p, final) in dist
            ],
        }
    _emit(args.format, headers, rows, payload)
    return 0


def cmd_sample(args) -> int:
    scn = load_scenario(args.file)
    if args.n < 1:
        raise InvariantError(f"--n must be positive, got {args.n}")
    dist = run_chain_analytic(scn)
    counts = sample_chain(scn, args.seed, args.n)
    headers = ["outcome", "count", "empirical", "analytic", "band"]
    rows = []
    entries = []
    all_ok = True
    for seq, (p, _) in dist:
        count = counts.get(seq, 0)
        emp = count / args.n
        sigma = math.sqrt(p * (1.0 - p) / args.n)
        ok = abs(emp - p) <= 4.0 * sigma
        all_ok = all_ok and ok
        rows.append(
            [
                format_sequence(seq),
                str(count),
                format_float(emp),
                format_float(p),
                "PASS" if ok else "FAIL",
            ]
        )
        entries.append(
            {
                "outcome": [label_to_json(l) for l in seq],
                "count": count,
                "empirical": emp,
                "analytic": p,
                "within_4_sigma": ok,
            }
        )
    payload = {
        "command": "sample",
        "seed": args.seed,
        "n": args.n,
        "all_within_4_sigma": all_ok,
        "entries": entries,
    }
    _emit(args.format, headers, rows, payload)
    if args.format == "table":
        print(f"4-sigma band: {'PASS' if all_ok else 'FAIL'}")
    return 0


def cmd_discriminate(args) -> int:
    scn_a = load_scenario(args.file_a)
    scn_b = load_scenario(args.file_b)
    report = run_discrimination(
        scn_a, scn_b, truth=args.truth, seed=args.seed, alpha=args.alpha
    )
    headers = ["tv_distance", "n_required", "log_odds", "decision"]
    rows = [
        [
            format_float(report.tv_distance),
            str(report.n_required),
            format_float(report.log_odds),
            report.decision.value,
        ]
    ]
    payload = {
        "command": "discriminate",
        "truth": args.truth,
        "alpha": args.alpha,
        "seed": args.seed,
        "tv_distance": report.tv_distance,
        "n_required": report.n_required,
        "log_odds": _log_odds_to_json(report.log_odds),
        "decision": report.decision.value,
    }
    _emit(args.format, headers, rows, payload)
    return 0


def cmd_paper_check(args) -> int:
    results = run_all(seed=args.seed)
    width = max(len(r.name) for r in results)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name.ljust(width)}  {r.detail}")
    passed = sum(r.passed for r in results)
    print(f"{passed}/{len(results)} checks passed")
    return 0 if passed == len(results) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seqmeas",
        description=(
            "Sequential projective-measurement simulator: exact statistics "
            "under rival collapse rules and the samples needed to tell them apart."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analytic", help="exact outcome distribution of a scenario file")
    p.add_argument("file", help="scenario JSON file")
    p.add_argument("--marginal", type=int, default=None, metavar="INDEX",
                   help="marginalize onto one labeled step (negative counts from the end)")
    p.add_argument("--format", choices=("table", "json", "csv"), default="table")
    p.set_defaults(func=cmd_analytic)

    p = sub.add_parser("sample", help="seeded Monte Carlo with analytic comparison")
    p.add_argument("file", help="scenario JSON file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, required=True, help="number of trials")
    p.add_argument("--format", choices=("table", "json", "csv"), default="table")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser(
        "discriminate",
        help="simulate the experiment that separates two scenario hypotheses",
    )
    p.add_argument("file_a", help="scenario JSON for hypothesis A")
    p.add_argument("file_b", help="scenario JSON for hypothesis B")
    p.add_argument("--truth", choices=("A", "B"), required=True,
                   help="which scenario generates the simulated data")
    p.add_argument("--alpha", type=float, default=1e-6, help="decision error level")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("table", "json", "csv"), default="table")
    p.set_defaults(func=cmd_discriminate)

    p = sub.add_parser("paper-check", help="run the built-in reference checks")
    p.add_argument("--seed", type=int, default=2026)
    p.set_defaults(func=cmd_paper_check)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ScenarioParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except IndistinguishableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except InvariantError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
