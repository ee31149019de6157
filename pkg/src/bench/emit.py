"""
Figure-reproduction tables and report files.

Every figure has a fixed CSV schema:

    mse_vs_samples  method,N,mse_mean,mse_var          (lowest noise level)
    mse_vs_noise    method,noise_std,N,mse_mean,mse_var (largest N)
    mmse_sweep      D,L,train_mse,theoretical_mse,test_mse
    dims_sweep      D,train_mse,test_mse
    modes           tau,x,f
    predictions     method,N,index,target,prediction

report.json holds everything deterministic; wall-clock numbers only go to
timings.csv and probes.csv.
"""
from pathlib import Path
from typing import Any, Dict, List, Optional, Union
import json
import logging

import numpy as np
import pandas as pd

from ..config.constants import ERROR_MISSING_AXIS, FigureId
from ..exceptions import InvalidInputError, MissingAxisError
from .models import (
    CELL_COLUMNS,
    DIMS_SWEEP_COLUMNS,
    MMSE_SWEEP_COLUMNS,
    MODE_COLUMNS,
    PREDICTION_COLUMNS,
    PROBE_COLUMNS,
    SUMMARY_COLUMNS,
    TIMING_COLUMNS,
    ExperimentReport,
    ExperimentSpec,
)

logger = logging.getLogger(__name__)

FIGURE_COLUMNS: Dict[FigureId, List[str]] = {
    FigureId.MSE_VS_SAMPLES: ["method", "N", "mse_mean", "mse_var"],
    FigureId.MSE_VS_NOISE: ["method", "noise_std", "N", "mse_mean", "mse_var"],
    FigureId.MMSE_SWEEP: ["D", "L", "train_mse", "theoretical_mse", "test_mse"],
    FigureId.DIMS_SWEEP: ["D", "train_mse", "test_mse"],
    FigureId.MODES: ["tau", "x", "f"],
    FigureId.PREDICTIONS: ["method", "N", "index", "target", "prediction"],
}

_SECTION_TABLES = {
    FigureId.MMSE_SWEEP: "mmse_sweep",
    FigureId.DIMS_SWEEP: "dims_sweep",
    FigureId.MODES: "modes",
    FigureId.PREDICTIONS: "predictions",
}

_SELECTED_NEEDS = ["method", "N", "noise_std", "test_mse_mean", "test_mse_var"]


def _require(table: Optional[pd.DataFrame], columns: List[str], figure: FigureId) -> pd.DataFrame:
    if table is None:
        raise MissingAxisError(ERROR_MISSING_AXIS.format(column=columns[0], figure=figure.value), columns[0])
    for column in columns:
        if column not in table.columns:
            raise MissingAxisError(ERROR_MISSING_AXIS.format(column=column, figure=figure.value), column)
    return table


def figure_table(report: ExperimentReport, figure_id: Union[FigureId, str]) -> pd.DataFrame:
    """
    The tidy table behind one figure.

    Raises:
        MissingAxisError: The report lacks a column (or a whole section) the
            figure needs
    """
    figure = FigureId(figure_id)
    columns = FIGURE_COLUMNS[figure]

    if figure in (FigureId.MSE_VS_SAMPLES, FigureId.MSE_VS_NOISE):
        selected = _require(report.selected, _SELECTED_NEEDS, figure)
        renamed = selected.rename(columns={"test_mse_mean": "mse_mean", "test_mse_var": "mse_var"})
        if renamed.empty:
            return pd.DataFrame({column: [] for column in columns})
        if figure == FigureId.MSE_VS_SAMPLES:
            rows = renamed[renamed["noise_std"] == renamed["noise_std"].min()]
        else:
            rows = renamed[renamed["N"] == renamed["N"].max()]
        return rows[columns].reset_index(drop=True)

    source = getattr(report, _SECTION_TABLES[figure])
    return _require(source, columns, figure)[columns].reset_index(drop=True)


def emit_plot_data(
    report: ExperimentReport,
    figure_id: Union[FigureId, str],
    out_dir: Union[str, Path],
) -> Path:
    """Write ``<figure_id>.csv``; an empty report yields a header-only file."""
    figure = FigureId(figure_id)
    table = figure_table(report, figure)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{figure.value}.csv"
    table.to_csv(path, index=False)
    logger.info(f"Wrote {len(table)} rows for figure {figure.value} to {path}")
    return path


def available_figures(report: ExperimentReport) -> List[FigureId]:
    """Figures whose source tables exist in the report."""
    figures = [FigureId.MSE_VS_SAMPLES, FigureId.MSE_VS_NOISE]
    figures += [figure for figure, name in _SECTION_TABLES.items() if getattr(report, name) is not None]
    return figures


def emit_all(report: ExperimentReport, out_dir: Union[str, Path]) -> List[Path]:
    return [emit_plot_data(report, figure, out_dir) for figure in available_figures(report)]


# ============================================================================
# REPORT FILES
# ============================================================================

def _records(table: Optional[pd.DataFrame]) -> Optional[List[Dict[str, Any]]]:
    if table is None:
        return None
    # JSON has no NaN or infinity; a diverged cell keeps its inf MSE in cells.csv only
    finite = table.replace([np.inf, -np.inf], np.nan)
    cleaned = finite.astype(object).where(finite.notna(), None)
    return cleaned.to_dict(orient="records")


def _json_default(value):
    if isinstance(value, np.generic):
        return value.item()
    raise TypeError(f"cannot serialize {type(value).__name__}")


def report_document(report: ExperimentReport) -> Dict[str, Any]:
    """The deterministic part of a report as plain JSON-ready data."""
    return {
        "spec_hash": report.spec_hash,
        "spec": report.spec.model_dump(mode="json"),
        "horizon": report.spec.horizon,
        "failed_methods": list(report.failed_methods),
        "cells": _records(report.cells),
        "summary": _records(report.summary),
        "selected": _records(report.selected),
        "mmse_sweep": _records(report.mmse_sweep),
        "dims_sweep": _records(report.dims_sweep),
        "modes": _records(report.modes),
        "predictions": _records(report.predictions),
    }


def write_report(report: ExperimentReport, out_dir: Union[str, Path]) -> List[Path]:
    """
    Write report.json and cells.csv (deterministic) plus timings.csv and,
    when probed, probes.csv (wall-clock).
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    document = json.dumps(report_document(report), indent=2, allow_nan=False, default=_json_default)
    paths = [out_dir / "report.json", out_dir / "cells.csv", out_dir / "timings.csv"]
    paths[0].write_text(document + "\n", encoding="utf-8")
    report.cells.to_csv(paths[1], index=False)
    report.timings.to_csv(paths[2], index=False)
    if report.probes is not None:
        paths.append(out_dir / "probes.csv")
        report.probes.to_csv(paths[-1], index=False)
    logger.info(f"Report {report.spec_hash[:12]} written to {out_dir}")
    return paths


def _frame(records: Optional[List[Dict[str, Any]]], columns: List[str]) -> Optional[pd.DataFrame]:
    if records is None:
        return None
    return pd.DataFrame.from_records(records, columns=columns)


def load_report(out_dir: Union[str, Path]) -> ExperimentReport:
    """Rebuild a report from the files written by write_report."""
    out_dir = Path(out_dir)
    path = out_dir / "report.json"
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise InvalidInputError(f"cannot read report {path}: {e}")

    report = ExperimentReport(
        spec=ExperimentSpec.model_validate(document["spec"]),
        spec_hash=document["spec_hash"],
        cells=_frame(document["cells"], CELL_COLUMNS),
        summary=_frame(document["summary"], SUMMARY_COLUMNS),
        selected=_frame(document["selected"], SUMMARY_COLUMNS),
        failed_methods=list(document["failed_methods"]),
        mmse_sweep=_frame(document.get("mmse_sweep"), MMSE_SWEEP_COLUMNS),
        dims_sweep=_frame(document.get("dims_sweep"), DIMS_SWEEP_COLUMNS),
        modes=_frame(document.get("modes"), MODE_COLUMNS),
        predictions=_frame(document.get("predictions"), PREDICTION_COLUMNS),
    )
    timings = out_dir / "timings.csv"
    if timings.exists():
        report.timings = pd.read_csv(timings, float_precision="round_trip")[TIMING_COLUMNS]
    probes = out_dir / "probes.csv"
    if probes.exists():
        report.probes = pd.read_csv(probes, float_precision="round_trip")[PROBE_COLUMNS]
    return report
