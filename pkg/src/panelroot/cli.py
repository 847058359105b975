"""Command-line interface: ``panelroot {limits,simulate,test,experiment,diagnostics,verify}``.

Exit codes: 0 success, 2 validation failure, 3 numeric failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from . import __version__
from ._backend import BACKEND
from .dgp import write_panel_csv, read_panel_csv
from .errors import NumericalError, PanelRootError, ValidationError
from .harness import (
    ExperimentConfig,
    ReplicationError,
    TABLE_COLUMNS,
    read_config_file,
    run_convergence_diagnostics,
    run_experiment,
    simulate_panel,
)
from .limitlaw import DEFAULT_N, DEFAULT_SAMPLES, default_moments, estimate_moments, load_moments
from .randomness import RngStream
from .urtest import run_test

log = logging.getLogger("panelroot")

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERIC = 0, 2, 3


def _u64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 1 << 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _moments(path):
    return load_moments(path) if path else default_moments()


def cmd_limits(args) -> int:
    def progress(i, total):
        if i % 20 == 0 or i == total:
            log.info("limit chunks %d/%d", i, total)

    table = estimate_moments(args.K, args.N, args.samples, RngStream(args.seed), args.workers, progress)
    if args.out:
        table.save(args.out)
    print(json.dumps(table.to_json(), indent=2))
    return EXIT_OK


def cmd_simulate(args) -> int:
    rng = RngStream(args.seed, args.rep)
    X = simulate_panel(args.n, args.T, rng, args.rho, args.burn_in)
    write_panel_csv(args.out or sys.stdout, X)
    return EXIT_OK


def cmd_test(args) -> int:
    panel = read_panel_csv(args.input)
    result = run_test(panel.values, _moments(args.limits))
    if args.json:
        print(json.dumps(result.to_dict(), indent=2))
    else:
        print(f"statistic  {result.statistic:.6f}")
        print(f"threshold  {result.threshold:.6f}  (log n, n={result.n})")
        print(f"decision   {'reject H0' if result.reject else 'do not reject H0'}")
    return EXIT_OK


def _experiment_config(args) -> ExperimentConfig:
    base = read_config_file(args.config) if args.config else {}
    overrides = {
        "n": args.n,
        "T": args.T,
        "reps": args.reps,
        "seed": args.seed,
        "rho_h1": args.rho,
        "limits_path": args.limits,
        "output_path": args.out,
        "workers": args.workers,
        "K": getattr(args, "K", None),
    }
    return ExperimentConfig(**base).with_overrides(**overrides)


def cmd_experiment(args) -> int:
    config = _experiment_config(args)
    moments = None
    if args.recompute_limits:
        moments = estimate_moments(1, DEFAULT_N, args.limit_samples, RngStream(config.seed), config.workers)
    row = run_experiment(config, moments)
    if args.json:
        print(json.dumps(dict(zip(TABLE_COLUMNS, row.as_list())), indent=2))
    else:
        print(",".join(TABLE_COLUMNS))
        print(",".join(repr(v) if isinstance(v, float) else str(v) for v in row.as_list()))
    return EXIT_OK


def cmd_diagnostics(args) -> int:
    config = _experiment_config(args)
    grid = [tuple(int(x) for x in item.split("x")) for item in args.grid]
    report = run_convergence_diagnostics(config, grid)
    summaries = [row.summary() for row in report["rows"]]
    if args.json:
        print(json.dumps({"rows": summaries, "ordered": report["ordered"]}, indent=2))
    else:
        print("n,T,k,target_m_k,median_lambda_over_n,median_lambda_over_trace,median_alignment,median_alpha_kk_sq")
        for s in summaries:
            print(
                f"{s['n']},{s['T']},{s['k']},{s['target_m_k']:.5f},{s['median_lambda_over_n']:.5f},"
                f"{s['median_lambda_over_trace']:.5f},{s['median_alignment']:.5f},{s['median_alpha_kk_sq']:.5f}"
            )
        print(f"strictly ordered in every replication: {report['ordered']}")
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verification import run_all

    checks = run_all()
    if args.json:
        print(json.dumps([c.__dict__ for c in checks], indent=2))
    else:
        for c in checks:
            print(c.line())
    return EXIT_OK if all(c.passed for c in checks) else EXIT_NUMERIC


def _experiment_flags(p: argparse.ArgumentParser, with_out: bool = True) -> None:
    p.add_argument("--config", help="flat key=value config file; flags override it")
    p.add_argument("--n", type=int)
    p.add_argument("--T", type=int)
    p.add_argument("--reps", type=int)
    p.add_argument("--seed", type=_u64)
    p.add_argument("--rho", type=float, help="H1 autoregressive coefficient")
    p.add_argument("--limits", help="limit-moment JSON table (default: packaged table)")
    p.add_argument("--workers", type=int)
    p.add_argument("--json", action="store_true")
    if with_out:
        p.add_argument("--out", help="CSV report path (a .json sidecar is written next to it)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="panelroot", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__} ({BACKEND} kernels)")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("limits", help="Monte Carlo table of limit-variable moments")
    p.add_argument("--K", type=int, default=5)
    p.add_argument("--N", type=int, default=DEFAULT_N)
    p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    p.add_argument("--seed", type=_u64, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_limits)

    p = sub.add_parser("simulate", help="write one simulated panel as CSV")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--T", type=int, default=100)
    p.add_argument("--rho", type=float, default=1.0, help="1 for the unit-root null")
    p.add_argument("--seed", type=_u64, default=0)
    p.add_argument("--rep", type=_u64, default=0, help="stream id")
    p.add_argument("--burn-in", type=int, default=1000)
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("test", help="run the unit-root test on a panel CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--limits")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("experiment", help="one row of the size/power table")
    _experiment_flags(p)
    p.add_argument("--recompute-limits", action="store_true", help="estimate m1 and s11 inline")
    p.add_argument("--limit-samples", type=int, default=DEFAULT_SAMPLES)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("diagnostics", help="eigenvalue/eigenvector convergence under H0")
    _experiment_flags(p, with_out=False)
    p.add_argument("--K", type=int)
    p.add_argument("--grid", nargs="+", default=["100x100", "200x200"], help="n x T pairs, e.g. 200x200")
    p.set_defaults(func=cmd_diagnostics, out=None)

    p = sub.add_parser("verify", help="basis, eigensolver and limit-law self-checks")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ReplicationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION if isinstance(exc.cause, ValidationError) else EXIT_NUMERIC
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (NumericalError, PanelRootError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
