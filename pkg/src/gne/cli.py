"""Command line entry point: ``gne run | compare | ranks``."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

from gne.benchmarks import FUNCTIONS, NOISE_MODES, make_objective
from gne.harness import (
    ALGORITHMS,
    ExperimentPlan,
    run_experiment,
    summarize_csv,
    write_json,
)
from gne.spectral import FilterSpec

EXIT_OK, EXIT_USAGE, EXIT_PARTIAL = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}\n\n{self.format_help()}")


@dataclass
class RanksRequest:
    csv_path: str
    out: str | None = None


def parse_filter(text: str):
    """``"default"`` or ``"cheb:c0,c1,..."``; returns ``None`` for the default schedule."""
    if text == "default":
        return None
    if not text.startswith("cheb:"):
        raise argparse.ArgumentTypeError("filter must be 'default' or 'cheb:c0,c1,...'")
    try:
        coeffs = [float(c) for c in text[5:].split(",") if c.strip()]
        return FilterSpec(tuple(coeffs))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad filter {text!r}: {exc}") from exc


def _add_common(p):
    p.add_argument("--fn", default="all", help="function name or 'all'")
    p.add_argument("--dim", type=int, default=30)
    p.add_argument("--pop", type=int, default=30)
    p.add_argument("--iters", type=int, default=500)
    p.add_argument("--runs", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--shift", type=float, default=0.0)
    p.add_argument("--filter", type=parse_filter, default=None)
    p.add_argument("--sigma0", type=float)
    p.add_argument("--sigmaT", type=float)
    p.add_argument("--elite-frac", type=float)
    p.add_argument("--elite-prob", type=float)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="output path prefix (suffix .csv/.json is added)")
    p.add_argument("--format", choices=("csv", "json", "both"), default="both")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gne", description="Graph Neural Evolution benchmark harness")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="one algorithm on one function (or all)")
    run.add_argument("--algo", choices=sorted(ALGORITHMS), default="gne")
    run.add_argument("--noise", choices=NOISE_MODES, default="none")
    _add_common(run)

    cmp_ = sub.add_parser("compare", help="all algorithms x functions x noise conditions")
    cmp_.add_argument("--algo", choices=sorted(ALGORITHMS), action="append",
                      help="repeatable; default gne, de and ga")
    cmp_.add_argument("--noise", choices=NOISE_MODES, action="append",
                      help="repeatable; default both conditions")
    _add_common(cmp_)

    ranks = sub.add_parser("ranks", help="recompute Friedman ranks from a results CSV")
    ranks.add_argument("csv_path")
    ranks.add_argument("--out", help="write the recomputed summary JSON here")
    return parser


def _gne_overrides(args) -> dict:
    over = {}
    if args.filter is not None:
        over["filter"] = args.filter
    for flag, name in (("sigma0", "sigma_initial"), ("sigmaT", "sigma_final"),
                       ("elite_frac", "elite_fraction"), ("elite_prob", "elite_resample_prob")):
        value = getattr(args, flag)
        if value is not None:
            over[name] = value
    return over


def _output_paths(args):
    if not args.out:
        return None, None
    base = Path(args.out)
    if base.suffix in (".csv", ".json"):
        base = base.with_suffix("")
    csv_path = str(base.with_suffix(".csv")) if args.format in ("csv", "both") else None
    json_path = str(base.with_suffix(".json")) if args.format in ("json", "both") else None
    return csv_path, json_path


def cli_parse(argv) -> ExperimentPlan | RanksRequest:
    """Turn command-line arguments into an :class:`ExperimentPlan` or a :class:`RanksRequest`.

    Raises :class:`UsageError` on bad input.
    """
    args = build_parser().parse_args(argv)
    if args.command == "ranks":
        return RanksRequest(args.csv_path, args.out)

    if args.fn == "all":
        names = list(FUNCTIONS)
    elif args.fn in FUNCTIONS:
        names = [args.fn]
    else:
        raise UsageError(f"unknown function {args.fn!r}; choose from {', '.join(FUNCTIONS)} or all")
    if args.runs < 1 or args.pop < 1 or args.iters < 1 or args.dim < 1:
        raise UsageError("--runs, --pop, --iters and --dim must be positive")

    if args.command == "run":
        algos, noises = [args.algo], [args.noise]
    else:
        algos = args.algo or ["gne", "de", "ga"]
        noises = args.noise or list(NOISE_MODES)
    objectives = [make_objective(n, args.dim, noise=z, shift=args.shift)
                  for z in noises for n in names]
    common = {"pop_size": args.pop, "max_iters": args.iters}
    overrides = {a: dict(common) for a in algos}
    if "gne" in overrides:
        overrides["gne"].update(_gne_overrides(args))
    csv_path, json_path = _output_paths(args)
    try:
        return ExperimentPlan(algos, objectives, runs_per_cell=args.runs, base_seed=args.seed,
                              overrides=overrides, csv_path=csv_path, json_path=json_path,
                              workers=args.workers)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _print_summary(summary, out=None):
    out = sys.stdout if out is None else out
    for cond, by_fn in summary["results"].items():
        print(f"[{cond}]", file=out)
        for fn, by_algo in by_fn.items():
            cells = []
            for algo, st in sorted(by_algo.items()):
                s = f"{algo}={st['mean']:.3e}±{st['std']:.2e}"
                if "true" in st and cond.startswith("uniform01"):
                    s += f" (true {st['true']['mean']:.3e})"
                cells.append(s)
            print(f"  {fn:12s} " + "  ".join(cells), file=out)
        fr = summary.get("friedman", {}).get(cond)
        if fr:
            ranks = "  ".join(f"{a}={r:.2f}" for a, r in fr["mean_ranks"].items())
            print(f"  friedman mean ranks: {ranks}  chi2={fr['statistic']:.3f}", file=out)


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    argv = sys.argv[1:] if argv is None else argv
    try:
        req = cli_parse(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE

    if isinstance(req, RanksRequest):
        try:
            summary = summarize_csv(req.csv_path)
        except (OSError, ValueError, KeyError) as exc:
            print(f"gne: cannot read {req.csv_path}: {exc}", file=sys.stderr)
            return EXIT_USAGE
        _print_summary(summary)
        if req.out:
            write_json(summary, req.out)
        return EXIT_OK

    result = run_experiment(req)
    _print_summary(result.summary)
    for path in (req.csv_path, req.json_path):
        if path:
            print(f"wrote {path}")
    if result.failures:
        print(f"{len(result.failures)} run(s) failed", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
