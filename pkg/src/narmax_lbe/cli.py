"""Command-line interface.

    narmax-lbe run --case sine
    narmax-lbe run --model my_model.yaml --n 500 --per-orbit --out series.csv
    narmax-lbe export --case duffing --out duffing.yaml

Exit codes: 0 success, 2 validation error, 3 fit error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .cases import CASES, duffing_ueda_case, get_case
from .expr import POW_MODES, ExpressionSyntaxError, UnsupportedFormError
from .lbe import InsufficientPointsError, WindowTooSmallError
from .modelfile import ModelFileError, load_model, save_model
from .runner import analyze, format_report, series_csv
from .simulate import EquivalenceError

EXIT_OK, EXIT_VALIDATION, EXIT_FIT, EXIT_IO = 0, 2, 3, 4


def _model_from_args(args):
    if args.model:
        return load_model(args.model)
    if args.case == "duffing" and (args.amplitude is not None or args.initial):
        initial = [float(v) for v in args.initial] if args.initial else None
        return duffing_ueda_case(amplitude=args.amplitude, initial=initial).model
    if args.amplitude is not None:
        raise ValueError("--amplitude only applies to --case duffing")
    model = get_case(args.case).model
    if args.initial:
        model = replace(
            model,
            initial=tuple(float(v) for v in args.initial),
            assumptions=model.assumptions
            + (f"initial lags overridden to {args.initial}",),
        )
    return model


def cmd_run(args) -> int:
    try:
        model = _model_from_args(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ModelFileError, ExpressionSyntaxError, EquivalenceError,
            UnsupportedFormError, ValueError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    try:
        result = analyze(
            model,
            n_steps=args.n,
            pow_mode=args.pow_mode,
            fit_start=args.fit_start,
            fit_end=args.fit_end,
            sat_fraction=args.sat_fraction,
            floor=args.floor,
            n_jobs=args.jobs,
        )
    except (WindowTooSmallError, InsufficientPointsError) as exc:
        print(f"fit error: {exc}", file=sys.stderr)
        return EXIT_FIT
    except (EquivalenceError, ValueError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    out = Path(args.out or f"{model.name}_lbe.csv")
    try:
        out.write_text(series_csv(result.series, result.ensemble, args.per_orbit))
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    result.report.csv_path = str(out)
    print(format_report(result.report))
    return EXIT_OK


def cmd_export(args) -> int:
    model = get_case(args.case).model
    out = Path(args.out or f"{args.case}.yaml")
    try:
        save_model(model, out)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"wrote {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="narmax-lbe",
        description="Lower bound error and Lyapunov exponent of NARMAX free-run "
        "simulations from equivalent expression orderings.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate a model and fit the error growth")
    src = run.add_mutually_exclusive_group(required=True)
    src.add_argument("--case", choices=sorted(CASES))
    src.add_argument("--model", help="YAML model file")
    run.add_argument("--n", type=int, help="number of steps N")
    run.add_argument("--pow-mode", choices=POW_MODES)
    run.add_argument("--fit-start", type=int)
    run.add_argument("--fit-end", type=int)
    run.add_argument("--sat-fraction", type=float, default=0.01)
    run.add_argument("--floor", type=float, default=0.0)
    run.add_argument("--amplitude", type=float, help="Duffing drive amplitude A")
    run.add_argument("--initial", nargs="+", help="initial lags, oldest first")
    run.add_argument("--jobs", type=int, help="threads for the ensemble")
    run.add_argument("--out", help="CSV output path")
    run.add_argument("--per-orbit", action="store_true",
                     help="add one column per pseudo-orbit to the CSV")
    run.set_defaults(func=cmd_run)

    exp = sub.add_parser("export", help="write a built-in case as a model file")
    exp.add_argument("--case", choices=sorted(CASES), required=True)
    exp.add_argument("--out", help="output path (default <case>.yaml)")
    exp.set_defaults(func=cmd_export)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
