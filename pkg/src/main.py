"""
Command-line entry point.

    python -m src fit     --input x.csv [--target z.csv] --out model.fwfm
    python -m src predict --model model.fwfm --input x.csv [--out preds.csv]
    python -m src modes   --model model.fwfm [--out modes.csv]
    python -m src bench   --config experiment.json [--out dir] [--seed n]
    python -m src timing  --model model.fwfm --input x.csv
    python -m src emit    --input report_dir [--figure id] [--out dir]

Unset filter flags fall back to the settings (environment / .env). Tables go
to --out or stdout as CSV; logs go to stderr. Failures print one JSON line
{"error": code, "message": text} to stderr and exit 1.
"""
from pathlib import Path
from typing import Optional, Sequence
import argparse
import json
import logging
import sys

import numpy as np
import pandas as pd

from .baselines import load_baseline
from .bench import (
    emit_all,
    emit_plot_data,
    load_experiment_spec,
    load_report,
    run_experiment,
    timing_probe,
    write_report,
)
from .config import FigureId, configure_from_settings, get_settings
from .datagen import embed_windows, load_csv
from .exceptions import FwfError, InvalidInputError
from .featuremap import FeatureMapSpec
from .fwf import extract_modes, fit, load_model, predict_series, read_envelope, save_model, save_modes_csv
from .fwf.storage import FWF_VARIANT

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fwf",
        description="Functional Wiener Filter toolkit: fit, evaluate and benchmark.",
    )
    verbs = parser.add_subparsers(dest="verb", required=True)

    def filter_flags(sub: argparse.ArgumentParser) -> None:
        sub.add_argument("--lags", type=int, help="Window length L")
        sub.add_argument("--dims", type=int, help="Feature dimensions per sample D")
        sub.add_argument("--sigma", type=float, help="Kernel size")
        sub.add_argument("--epsilon", type=float, help="Relative eigenvalue cutoff")
        sub.add_argument("--horizon", type=int, help="Prediction horizon")

    fit_cmd = verbs.add_parser("fit", help="Fit an FWF on a CSV series")
    fit_cmd.add_argument("--input", required=True, help="CSV with the input series")
    fit_cmd.add_argument("--target", help="CSV with the desired series (defaults to the input)")
    fit_cmd.add_argument("--column", default="0", help="Column index or header name")
    filter_flags(fit_cmd)
    fit_cmd.add_argument("--out", required=True, help="Model file to write")

    predict_cmd = verbs.add_parser("predict", help="Run a fitted FWF along a CSV series")
    predict_cmd.add_argument("--model", required=True)
    predict_cmd.add_argument("--input", required=True)
    predict_cmd.add_argument("--column", default="0")
    predict_cmd.add_argument("--out", help="CSV to write (stdout if omitted)")

    modes_cmd = verbs.add_parser("modes", help="Export the per-lag modes of a fitted FWF")
    modes_cmd.add_argument("--model", required=True)
    modes_cmd.add_argument("--grid-min", type=float, help="Defaults to the training support")
    modes_cmd.add_argument("--grid-max", type=float, help="Defaults to the training support")
    modes_cmd.add_argument("--grid-points", type=int, default=201)
    modes_cmd.add_argument("--out", help="CSV to write (stdout if omitted)")

    bench_cmd = verbs.add_parser("bench", help="Run an experiment config")
    bench_cmd.add_argument("--config", required=True, help="Experiment JSON file")
    bench_cmd.add_argument("--seed", type=int, help="Override the task seed")
    bench_cmd.add_argument("--out", help="Override the output directory")

    timing_cmd = verbs.add_parser("timing", help="Measure per-sample latency of a model file")
    timing_cmd.add_argument("--model", required=True)
    timing_cmd.add_argument("--input", required=True)
    timing_cmd.add_argument("--column", default="0")
    timing_cmd.add_argument("--repeats", type=int)
    timing_cmd.add_argument("--warmup", type=int)
    timing_cmd.add_argument("--out", help="CSV to write (stdout if omitted)")

    emit_cmd = verbs.add_parser("emit", help="Write figure tables from a saved report")
    emit_cmd.add_argument("--input", required=True, help="Directory holding report.json")
    emit_cmd.add_argument("--figure", choices=[figure.value for figure in FigureId])
    emit_cmd.add_argument("--out", help="Output directory (defaults to the report directory)")
    return parser


def _column(value: str):
    return int(value) if value.lstrip("-").isdigit() else value


def _write_table(table: pd.DataFrame, out: Optional[str]) -> None:
    if out:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        table.to_csv(path, index=False)
        logger.info(f"Wrote {len(table)} rows to {path}")
    else:
        table.to_csv(sys.stdout, index=False)


def _load_any_model(path: str):
    header, _, _ = read_envelope(path)
    return load_model(path) if header.variant == FWF_VARIANT else load_baseline(path)


def cmd_fit(args, settings) -> int:
    x = load_csv(args.input, _column(args.column))
    z = load_csv(args.target, _column(args.column)) if args.target else x
    spec = FeatureMapSpec(
        sigma=args.sigma if args.sigma is not None else settings.default_sigma,
        dims=args.dims if args.dims is not None else settings.default_dims,
    )
    model = fit(
        x,
        z,
        lags=args.lags if args.lags is not None else settings.default_lags,
        spec=spec,
        epsilon=args.epsilon if args.epsilon is not None else settings.default_epsilon,
        horizon=args.horizon if args.horizon is not None else settings.default_horizon,
    )
    save_model(model, args.out)
    dataset = embed_windows(x, z, model.lags, model.horizon)
    train_mse = float(np.mean((dataset.targets - predict_series(model, x)[:dataset.sample_count]) ** 2))
    _write_table(pd.DataFrame([{
        "dims": model.dims,
        "lags": model.lags,
        "sigma": model.sigma,
        "horizon": model.horizon,
        "effective_rank": model.effective_rank,
        "theoretical_mmse": model.theoretical_mmse,
        "train_mse": train_mse,
    }]), None)
    return 0


def cmd_predict(args, settings) -> int:
    model = load_model(args.model)
    x = load_csv(args.input, _column(args.column))
    predictions = predict_series(model, x)
    first = model.lags - 1 + model.horizon
    _write_table(pd.DataFrame({"index": np.arange(first, first + predictions.size), "prediction": predictions}), args.out)
    return 0


def cmd_modes(args, settings) -> int:
    model = load_model(args.model)
    low = args.grid_min if args.grid_min is not None else model.support[0]
    high = args.grid_max if args.grid_max is not None else model.support[1]
    if not low < high or args.grid_points < 2:
        raise InvalidInputError(f"mode grid [{low}, {high}] with {args.grid_points} points is empty")
    modes = extract_modes(model, np.linspace(low, high, args.grid_points))
    if args.out:
        save_modes_csv(modes, args.out)
    else:
        _write_table(modes.to_frame(), None)
    return 0


def cmd_bench(args, settings) -> int:
    spec = load_experiment_spec(args.config).with_settings(settings)
    if args.seed is not None:
        spec = spec.model_copy(update={"task": spec.task.model_copy(update={"seed": args.seed})})
    out_dir = Path(args.out or spec.output_dir)
    report = run_experiment(spec)
    write_report(report, out_dir)
    emit_all(report, out_dir)
    _write_table(report.selected, None)
    return 0


def cmd_timing(args, settings) -> int:
    model = _load_any_model(args.model)
    x = load_csv(args.input, _column(args.column))
    dataset = embed_windows(x, x, model.lags, 0)
    stats = timing_probe(
        model,
        dataset.windows,
        repeats=args.repeats if args.repeats is not None else settings.timing_repeats,
        warmup=args.warmup if args.warmup is not None else settings.timing_warmup,
    )
    _write_table(pd.DataFrame([{
        "median_ns": stats.median_ns,
        "iqr_ns": stats.iqr_ns,
        "repeats": stats.repeats,
        "samples_per_repeat": stats.samples_per_repeat,
        "feature_dimension": stats.feature_dimension,
    }]), args.out)
    return 0


def cmd_emit(args, settings) -> int:
    report = load_report(args.input)
    out_dir = args.out or args.input
    if args.figure:
        emit_plot_data(report, args.figure, out_dir)
    else:
        emit_all(report, out_dir)
    return 0


COMMANDS = {
    "fit": cmd_fit,
    "predict": cmd_predict,
    "modes": cmd_modes,
    "bench": cmd_bench,
    "timing": cmd_timing,
    "emit": cmd_emit,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one CLI verb and return its exit code."""
    args = build_parser().parse_args(argv)
    settings = get_settings()
    configure_from_settings(settings)
    try:
        return COMMANDS[args.verb](args, settings)
    except FwfError as e:
        logger.debug(f"{args.verb} failed", exc_info=True)
        print(json.dumps(e.to_dict()), file=sys.stderr)
        return 1
    except (OSError, ValueError) as e:
        # Unreadable output paths, numpy shape errors and the like
        logger.debug(f"{args.verb} failed", exc_info=True)
        error = InvalidInputError(f"{type(e).__name__}: {e}")
        print(json.dumps(error.to_dict()), file=sys.stderr)
        return 1
