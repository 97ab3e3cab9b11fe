from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Sequence

from proca.config import RunConfig, settings
from proca.convergence import MIN_LEVELS, ConvergenceStudy, run_convergence
from proca.errors import ProcaError
from proca.geometry import MediumSpec, classify_symbol
from proca.modes import dispersion_longitudinal, dispersion_transverse
from proca.workflow import run_simulation_workflow


def parse_args(argv: Sequence[str] | None = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        description="Constrained Proca evolution in dielectric media."
    )
    verbs = parser.add_subparsers(dest="verb", required=True)

    run = verbs.add_parser("run", help="Run one simulation from a key = value config file.")
    run.add_argument("config", type=Path, help="Path to the run config.")

    converge = verbs.add_parser("converge", help="Run a resolution ladder and fit convergence orders.")
    converge.add_argument("config", type=Path, help="Path to the base run config.")
    converge.add_argument(
        "--levels",
        type=int,
        default=MIN_LEVELS,
        help=f"Number of ladder levels, each doubling the points (at least {MIN_LEVELS}).",
    )
    converge.add_argument(
        "--fresh",
        action="store_true",
        help="Drop stored summaries for every level and recompute them.",
    )

    modes = verbs.add_parser("modes", help="Print the plane-wave dispersion table.")
    modes.add_argument("--n", type=float, required=True, help="Refractive index.")
    modes.add_argument(
        "--lambda",
        dest="lam",
        type=float,
        default=None,
        help="Mass-metric parameter; omit for the Gordon choice 1 - n^2.",
    )
    modes.add_argument("--mu", type=float, required=True, help="Proca mass.")
    modes.add_argument("--k", type=float, nargs="+", required=True, help="Wavenumbers |k|.")

    classify = verbs.add_parser("classify", help="Classify the principal symbol of the mass-metric wave operator.")
    classify.add_argument("--lambda", dest="lam", type=float, required=True)
    return parser.parse_args(argv)


def _configure_logging() -> None:
    logging.basicConfig(
        level=getattr(logging, settings.log_level, logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def run_command(args: argparse.Namespace) -> None:
    config = RunConfig.load(args.config)
    result = run_simulation_workflow(config)
    summary = result.summary
    print(f"=== Run {result.state['digest'][:12]} ({summary['engine']}) ===")
    print(f"steps: {summary['steps']}  dt: {summary['dt']:.6g}  t: {summary['t_final']:.6g}")
    for name, value in summary["sup"].items():
        print(f"sup {name}: {value:.6e}")
    if dispersion := summary.get("dispersion"):
        if "measured" in dispersion:
            print(
                f"omega measured {dispersion['measured']:.8g} vs {dispersion['expected']:.8g} "
                f"(relative error {dispersion['relative_error']:.3e})"
            )
        else:
            print(f"dispersion check skipped: {dispersion['skipped']}")
    print(f"\nOutputs written to: {config.output.directory}")


def converge_command(args: argparse.Namespace) -> None:
    study = ConvergenceStudy(RunConfig.load(args.config), levels=args.levels)
    report = run_convergence(study, fresh=args.fresh)
    print("quantity, order, fit residual")
    for item in report.estimates:
        order = "below floor" if item.order is None else f"{item.order:.3f}"
        residual = "" if item.residual is None else f"{item.residual:.2e}"
        print(f"{item.quantity}, {order}, {residual}")
    print(f"\nOrder table saved to: {report.table_path}")


def modes_command(args: argparse.Namespace) -> None:
    medium = MediumSpec(args.n, args.mu, args.lam)
    symbol = classify_symbol(medium.effective_lambda)
    print(f"lambda = {medium.effective_lambda:.6g}: {symbol.kind.value}")
    print("k, omega_transverse, omega_longitudinal")
    for k in args.k:
        transverse = dispersion_transverse(k, medium)
        longitudinal = f"{dispersion_longitudinal(k, medium):.10g}" if symbol.is_hyperbolic else symbol.kind.value
        print(f"{k:.6g}, {transverse:.10g}, {longitudinal}")


def classify_command(args: argparse.Namespace) -> None:
    symbol = classify_symbol(args.lam)
    if symbol.is_hyperbolic:
        print(f"{symbol.kind.value} (characteristic speed {symbol.speed:.10g})")
    else:
        print(symbol.kind.value)


COMMANDS = {
    "run": run_command,
    "converge": converge_command,
    "modes": modes_command,
    "classify": classify_command,
}


def main(argv: Sequence[str] | None = None) -> None:
    args = parse_args(argv)
    _configure_logging()
    try:
        COMMANDS[args.verb](args)
    except ProcaError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        raise SystemExit(exc.exit_code) from exc


if __name__ == "__main__":
    main()
