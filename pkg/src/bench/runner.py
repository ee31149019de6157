"""
Experiment orchestration.

Every (method, configuration, N, noise, fold) cell is independent: it cuts
its fold from the shared series, fits, and scores train and test MSE. Cells
run through joblib and come back in submission order, so the report is a
deterministic ordered reduction. Timing probes run afterwards, one at a time.
"""
from dataclasses import dataclass
from pathlib import Path
from time import perf_counter
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union
import logging

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from pydantic import ValidationError

from ..config.constants import ERROR_FILTER_DIVERGED, FILTER_DIVERGENCE_RATIO, MethodName, NormalizationMode
from ..config.settings import get_settings
from ..datagen.generators import add_noise, generate_series
from ..datagen.io import normalize
from ..datagen.models import FoldPlan
from ..datagen.windowing import fold_datasets, kfold_splits
from ..exceptions import ConfigError, FilterDivergedError, FwfError
from ..featuremap.models import FeatureMapSpec, WindowedDataset
from ..fwf import FwfModel, extract_modes
from ..fwf.filter import fit_dataset
from .methods import fit_method, mse, predict_windows
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
    MethodSpec,
    empty_frame,
)
from .timing import timing_probe

logger = logging.getLogger(__name__)

_RECOVERABLE = (FwfError, np.linalg.LinAlgError)


def load_experiment_spec(path: Union[str, Path]) -> ExperimentSpec:
    """
    Read and validate an experiment JSON file.

    Raises:
        ConfigError: Unreadable file, invalid JSON or schema violation
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read experiment file {path}: {e}")
    try:
        return ExperimentSpec.model_validate_json(text)
    except ValidationError as e:
        first = e.errors()[0]
        location = ".".join(str(part) for part in first["loc"])
        raise ConfigError(f"{path}: {location}: {first['msg']} ({e.error_count()} error(s))")


# ============================================================================
# SHARED DATA
# ============================================================================

@dataclass(frozen=True)
class FoldJob:
    """One cell of the benchmark grid."""

    method: MethodName
    config_id: int
    params: Dict[str, Any]
    sample_size: int
    noise_std: float
    fold: int


def prepare_inputs(spec: ExperimentSpec) -> Tuple[Dict[float, np.ndarray], np.ndarray]:
    """
    Generate the task once and derive one noisy input per noise level.

    Noise goes on the input only; every method sees the same realization.
    """
    x, z = generate_series(spec.task)
    seed = spec.effective_noise_seed
    inputs = {std: add_noise(x, std, seed) for std in spec.noise_levels}
    return inputs, z


def fold_data(
    x: np.ndarray,
    z: np.ndarray,
    plan: FoldPlan,
    fold: int,
    lags: int,
    horizon: int,
    normalization: NormalizationMode,
) -> Tuple[WindowedDataset, WindowedDataset]:
    """Normalize with the fold's training statistics, then window."""
    if NormalizationMode(normalization) != NormalizationMode.NONE:
        train_range = plan.train_ranges[fold]
        x, _ = normalize(x, train_range, normalization)
        z, _ = normalize(z, train_range, normalization)
    return fold_datasets(x, z, plan, fold, lags, horizon)


def _base_record(job: FoldJob, spec_hash: str, seed: int) -> Dict[str, Any]:
    params = job.params
    return {
        "method": MethodName(job.method).value,
        "config_id": job.config_id,
        "N": job.sample_size,
        "noise_std": job.noise_std,
        "fold": job.fold,
        "sigma": params.get("sigma", np.nan),
        "dims": params.get("dims", np.nan),
        "lags": params["lags"],
        "step_size": params.get("step_size", np.nan),
        "ridge": params.get("ridge", np.nan),
        "epsilon": params.get("epsilon", np.nan),
        "train_mse": np.nan,
        "test_mse": np.nan,
        "theoretical_mmse": np.nan,
        "effective_rank": np.nan,
        "status": "ok",
        "error": "",
        "seed": seed,
        "spec_hash": spec_hash,
    }


def check_converged(train_mse: float, test_mse: float, train_targets: np.ndarray) -> None:
    """
    Reject a fit whose error blew up, e.g. KLMS with a step size past its
    stability bound. A zero target power only rejects non-finite errors.
    """
    power = float(np.mean(np.square(train_targets)))
    for split, value in (("train", train_mse), ("test", test_mse)):
        if not np.isfinite(value) or (power > 0.0 and value > FILTER_DIVERGENCE_RATIO * power):
            raise FilterDivergedError(
                ERROR_FILTER_DIVERGED.format(split=split, mse=value, ratio=FILTER_DIVERGENCE_RATIO, power=power)
            )


def run_cell(
    job: FoldJob,
    x: np.ndarray,
    z: np.ndarray,
    plan: FoldPlan,
    horizon: int,
    normalization: NormalizationMode,
    spec_hash: str = "",
    seed: int = 0,
) -> Tuple[Dict[str, Any], Dict[str, Any]]:
    """
    Fit and score one cell.

    Returns:
        Tuple of (deterministic record, wall-clock record). Failures are
        recorded in the first one instead of raised.
    """
    record = _base_record(job, spec_hash, seed)
    timing = {
        "method": record["method"],
        "config_id": job.config_id,
        "N": job.sample_size,
        "noise_std": job.noise_std,
        "fold": job.fold,
        "fit_seconds": np.nan,
        "eval_seconds_per_sample": np.nan,
    }
    try:
        train, test = fold_data(x, z, plan, job.fold, job.params["lags"], horizon, normalization)
        started = perf_counter()
        model = fit_method(job.method, train, job.params)
        timing["fit_seconds"] = perf_counter() - started

        record["train_mse"] = mse(model, train)
        started = perf_counter()
        predictions = predict_windows(model, test.windows)
        timing["eval_seconds_per_sample"] = (perf_counter() - started) / test.sample_count
        record["test_mse"] = float(np.mean((test.targets - predictions) ** 2))
        check_converged(record["train_mse"], record["test_mse"], train.targets)

        if isinstance(model, FwfModel):
            record["theoretical_mmse"] = model.theoretical_mmse
        if hasattr(model, "effective_rank"):
            record["effective_rank"] = model.effective_rank
    except _RECOVERABLE as e:
        code = getattr(e, "code", "linalg")
        record["status"] = "failed"
        record["error"] = f"{code}: {e}"
        logger.warning(
            f"Cell failed: {record['method']} config {job.config_id}, N={job.sample_size}, "
            f"noise={job.noise_std}, fold={job.fold}: {e}"
        )
    return record, timing


# ============================================================================
# AGGREGATION
# ============================================================================

def summarize_cells(cells: pd.DataFrame) -> pd.DataFrame:
    """Aggregate folds into one row per (method, configuration, N, noise)."""
    if cells.empty:
        return empty_frame(SUMMARY_COLUMNS)
    rows = []
    for _, group in cells.groupby(["method", "config_id", "N", "noise_std"], sort=False):
        first = group.iloc[0]
        ok = group[group["status"] == "ok"]
        rows.append({
            "method": first["method"],
            "config_id": int(first["config_id"]),
            "N": int(first["N"]),
            "noise_std": float(first["noise_std"]),
            "sigma": first["sigma"],
            "dims": first["dims"],
            "lags": first["lags"],
            "step_size": first["step_size"],
            "ridge": first["ridge"],
            "epsilon": first["epsilon"],
            "train_mse_mean": float(ok["train_mse"].mean()) if len(ok) else np.nan,
            "test_mse_mean": float(ok["test_mse"].mean()) if len(ok) else np.nan,
            "test_mse_var": float(np.var(ok["test_mse"].to_numpy())) if len(ok) else np.nan,
            "theoretical_mmse_mean": float(ok["theoretical_mmse"].mean()) if len(ok) else np.nan,
            "folds_ok": int(len(ok)),
            "folds_failed": int(len(group) - len(ok)),
        })
    return pd.DataFrame(rows, columns=SUMMARY_COLUMNS)


def _selection_key(row: pd.Series) -> Tuple[float, float, int]:
    sigma = row["sigma"] if np.isfinite(row["sigma"]) else 0.0
    # Lowest mean test MSE; ties go to the larger (smoother) kernel size
    return float(row["test_mse_mean"]), -float(sigma), int(row["config_id"])


def select_best(summary: pd.DataFrame, keys: Sequence[str] = ("method", "N", "noise_std")) -> pd.DataFrame:
    """Best configuration per group among those with at least one finished fold."""
    if summary.empty:
        return empty_frame(SUMMARY_COLUMNS)
    rows = []
    for _, group in summary.groupby(list(keys), sort=False):
        usable = group[(group["folds_ok"] > 0) & np.isfinite(group["test_mse_mean"])]
        if usable.empty:
            continue
        best = min((row for _, row in usable.iterrows()), key=_selection_key)
        rows.append(best)
    if not rows:
        return empty_frame(SUMMARY_COLUMNS)
    return pd.DataFrame(rows, columns=SUMMARY_COLUMNS).reset_index(drop=True)


def _plan(n_samples: int, spec: ExperimentSpec, sample_size: int) -> FoldPlan:
    return kfold_splits(n_samples, spec.folds, spec.test_len, train_len=sample_size)


def _failed_records(jobs: List[FoldJob], error: FwfError, spec_hash: str, seed: int):
    records, timings = [], []
    for job in jobs:
        record = _base_record(job, spec_hash, seed)
        record["status"] = "failed"
        record["error"] = f"{error.code}: {error.message}"
        records.append(record)
        timings.append({
            "method": record["method"], "config_id": job.config_id, "N": job.sample_size,
            "noise_std": job.noise_std, "fold": job.fold,
            "fit_seconds": np.nan, "eval_seconds_per_sample": np.nan,
        })
    return records, timings


def _jobs_for(spec: ExperimentSpec, method: MethodSpec, sample_size: int, noise_std: float) -> List[FoldJob]:
    return [
        FoldJob(method.name, config_id, params, sample_size, noise_std, fold)
        for config_id, params in enumerate(method.configurations())
        for fold in range(spec.folds)
    ]


# ============================================================================
# GRID SEARCH
# ============================================================================

def grid_search_sigma(
    method: MethodSpec,
    series: Tuple[np.ndarray, np.ndarray],
    sigma_grid: Sequence[float],
    fold_plan: FoldPlan,
    horizon: int = 0,
    normalization: NormalizationMode = NormalizationMode.NONE,
    n_jobs: int = 1,
) -> Tuple[Optional[float], pd.DataFrame]:
    """
    Mean test MSE across the plan's folds for every kernel size.

    Other hyperparameters take the first value of the method's grids.

    Returns:
        Tuple of (best sigma, table with one row per sigma). Ties go to the
        larger sigma; best is None when every sigma failed.
    """
    if not sigma_grid:
        raise ConfigError("sigma grid must not be empty")
    x, z = series
    base = method.model_copy(update={"sigmas": [float(sigma_grid[0])]}).configurations()[0]
    jobs = [
        FoldJob(method.name, index, {**base, "sigma": float(sigma)}, -1, 0.0, fold)
        for index, sigma in enumerate(sigma_grid)
        for fold in range(len(fold_plan))
    ]
    results = Parallel(n_jobs=n_jobs)(
        delayed(run_cell)(job, x, z, fold_plan, horizon, normalization) for job in jobs
    )
    cells = pd.DataFrame([record for record, _ in results], columns=CELL_COLUMNS)
    summary = summarize_cells(cells)
    table = summary[["config_id", "sigma", "train_mse_mean", "test_mse_mean", "test_mse_var",
                     "theoretical_mmse_mean", "folds_ok"]].drop(columns="config_id")
    best = select_best(summary, keys=("method",))
    if best.empty:
        logger.warning(f"Every sigma failed for {MethodName(method.name).value}")
        return None, table.reset_index(drop=True)
    return float(best.iloc[0]["sigma"]), table.reset_index(drop=True)


# ============================================================================
# OPTIONAL SECTIONS
# ============================================================================

def _fwf_fold_scores(x, z, plan, fold, spec: ExperimentSpec, sigma, dims, lags, epsilon):
    try:
        train, test = fold_data(x, z, plan, fold, lags, spec.horizon, spec.task.normalization)
        model = fit_dataset(train, FeatureMapSpec(sigma=sigma, dims=dims), epsilon=epsilon)
        return mse(model, train), model.theoretical_mmse, mse(model, test), model.effective_rank
    except _RECOVERABLE as e:
        logger.warning(f"Sweep point D={dims}, L={lags}, fold={fold} failed: {e}")
        return np.nan, np.nan, np.nan, np.nan


def _fwf_sweep(x, z, spec: ExperimentSpec, sample_size, points, sigma, epsilon):
    try:
        plan = _plan(x.size, spec, sample_size)
    except FwfError as e:
        logger.warning(f"Sweep skipped: {e}")
        return [(np.nan, np.nan, np.nan, np.nan) for _ in points]
    tasks = [(dims, lags, fold) for dims, lags in points for fold in range(spec.folds)]
    scores = Parallel(n_jobs=spec.n_jobs)(
        delayed(_fwf_fold_scores)(x, z, plan, fold, spec, sigma, dims, lags, epsilon)
        for dims, lags, fold in tasks
    )
    means = []
    for index in range(len(points)):
        block = pd.DataFrame(scores[index * spec.folds:(index + 1) * spec.folds], dtype=float)
        means.append(tuple(block.mean(axis=0, skipna=True)))
    return means


def run_mmse_sweep(x, z, spec: ExperimentSpec) -> pd.DataFrame:
    """Train, theoretical and test MSE over the D x L grid, one row per point."""
    sweep = spec.mmse_sweep
    points = [(dims, lags) for dims in sweep.dims for lags in sweep.lags]
    means = _fwf_sweep(x, z, spec, sweep.sample_size, points, sweep.sigma, sweep.epsilon)
    rows = [
        {"D": dims, "L": lags, "train_mse": m[0], "theoretical_mse": m[1], "test_mse": m[2], "effective_rank": m[3]}
        for (dims, lags), m in zip(points, means)
    ]
    return pd.DataFrame(rows, columns=MMSE_SWEEP_COLUMNS)


def run_dims_sweep(x, z, spec: ExperimentSpec) -> pd.DataFrame:
    """Train and test MSE as D grows at fixed sigma and L."""
    sweep = spec.dims_sweep
    points = [(dims, sweep.lags) for dims in sweep.dims]
    means = _fwf_sweep(x, z, spec, sweep.sample_size, points, sweep.sigma, sweep.epsilon)
    rows = [{"D": dims, "train_mse": m[0], "test_mse": m[2]} for (dims, _), m in zip(points, means)]
    return pd.DataFrame(rows, columns=DIMS_SWEEP_COLUMNS)


def run_mode_extraction(x, z, spec: ExperimentSpec) -> pd.DataFrame:
    """Modes of one FWF fit on the first fold's training slice."""
    section = spec.mode_extraction
    plan = _plan(x.size, spec, section.sample_size)
    train, _ = fold_data(x, z, plan, 0, section.lags, spec.horizon, spec.task.normalization)
    model = fit_dataset(train, FeatureMapSpec(sigma=section.sigma, dims=section.dims), epsilon=section.epsilon)
    grid = np.linspace(section.grid_min, section.grid_max, section.grid_points)
    frame = extract_modes(model, grid).to_frame()
    return frame.rename(columns={"f_tau_x": "f"})[MODE_COLUMNS]


def _method_spec(spec: ExperimentSpec, name: str) -> MethodSpec:
    return next(method for method in spec.methods if MethodName(method.name).value == name)


def _selected_params(spec: ExperimentSpec, row: pd.Series) -> Dict[str, Any]:
    return _method_spec(spec, row["method"]).configurations()[int(row["config_id"])]


def run_predictions(inputs, z, spec: ExperimentSpec, selected: pd.DataFrame) -> pd.DataFrame:
    """Test-set predictions of every selected configuration at the first noise level."""
    fold = spec.predictions.fold
    noise = spec.noise_levels[0]
    rows = []
    for _, row in selected[selected["noise_std"] == noise].iterrows():
        params = _selected_params(spec, row)
        try:
            plan = _plan(inputs[noise].size, spec, int(row["N"]))
            if fold >= len(plan):
                raise ConfigError(f"predictions fold {fold} outside {len(plan)} folds")
            train, test = fold_data(inputs[noise], z, plan, fold, params["lags"], spec.horizon,
                                    spec.task.normalization)
            model = fit_method(row["method"], train, params)
        except _RECOVERABLE as e:
            logger.warning(f"Predictions skipped for {row['method']} N={row['N']}: {e}")
            continue
        start = plan.test_ranges[fold][0]
        predictions = predict_windows(model, test.windows)
        for offset, (target, prediction) in enumerate(zip(test.targets, predictions)):
            rows.append({
                "method": row["method"], "N": int(row["N"]), "index": start + offset,
                "target": float(target), "prediction": float(prediction),
            })
    return pd.DataFrame(rows, columns=PREDICTION_COLUMNS)


def run_timing_probes(inputs, z, spec: ExperimentSpec, selected: pd.DataFrame) -> pd.DataFrame:
    """Latency of every selected configuration, probed one model at a time."""
    noise = spec.noise_levels[0]
    rows = []
    for _, row in selected[selected["noise_std"] == noise].iterrows():
        params = _selected_params(spec, row)
        try:
            plan = _plan(inputs[noise].size, spec, int(row["N"]))
            train, test = fold_data(inputs[noise], z, plan, 0, params["lags"], spec.horizon,
                                    spec.task.normalization)
            model = fit_method(row["method"], train, params)
        except _RECOVERABLE as e:
            logger.warning(f"Timing skipped for {row['method']} N={row['N']}: {e}")
            continue
        stats = timing_probe(model, test.windows, spec.timing.repeats, spec.timing.warmup)
        rows.append({
            "method": row["method"], "N": int(row["N"]), "lags": params["lags"],
            "dims": params.get("dims", np.nan), "median_ns": stats.median_ns, "iqr_ns": stats.iqr_ns,
            "repeats": stats.repeats, "feature_dimension": stats.feature_dimension,
        })
    return pd.DataFrame(rows, columns=PROBE_COLUMNS)


# ============================================================================
# ENTRY POINT
# ============================================================================

def run_experiment(spec: ExperimentSpec) -> ExperimentReport:
    """
    Run every cell of the experiment grid plus the configured sections.

    Failed cells are recorded and the run continues; methods with no
    finished cell at all are listed in ``failed_methods``.
    Run options left unset in ``spec`` come from the settings
    (see ``ExperimentSpec.with_settings``).
    """
    spec = spec.with_settings(get_settings())
    spec_hash = spec.spec_hash()
    seed = spec.task.seed
    inputs, z = prepare_inputs(spec)
    n_samples = z.size
    logger.info(
        f"Experiment {spec_hash[:12]}: task={spec.task.kind.value}, {n_samples} samples, "
        f"methods={[m.name.value for m in spec.methods]}, N={spec.sample_sizes}, noise={spec.noise_levels}"
    )

    records: List[Dict[str, Any]] = []
    timings: List[Dict[str, Any]] = []
    for sample_size in spec.sample_sizes:
        try:
            plan = _plan(n_samples, spec, sample_size)
        except FwfError as e:
            logger.warning(f"N={sample_size} skipped: {e}")
            for method in spec.methods:
                for noise_std in spec.noise_levels:
                    failed, failed_timings = _failed_records(
                        _jobs_for(spec, method, sample_size, noise_std), e, spec_hash, seed
                    )
                    records.extend(failed)
                    timings.extend(failed_timings)
            continue

        for method in spec.methods:
            for noise_std in spec.noise_levels:
                jobs = _jobs_for(spec, method, sample_size, noise_std)
                logger.info(f"Running {method.name.value}: N={sample_size}, noise={noise_std}, {len(jobs)} cells")
                results = Parallel(n_jobs=spec.n_jobs)(
                    delayed(run_cell)(
                        job, inputs[noise_std], z, plan, spec.horizon, spec.task.normalization, spec_hash, seed
                    )
                    for job in jobs
                )
                records.extend(record for record, _ in results)
                timings.extend(timing for _, timing in results)

    cells = pd.DataFrame(records, columns=CELL_COLUMNS)
    summary = summarize_cells(cells)
    selected = select_best(summary)
    finished = set(cells.loc[cells["status"] == "ok", "method"])
    failed_methods = [m.name.value for m in spec.methods if m.name.value not in finished]
    for name in failed_methods:
        logger.warning(f"Method {name} failed in every cell")

    report = ExperimentReport(
        spec=spec,
        spec_hash=spec_hash,
        cells=cells,
        summary=summary,
        selected=selected,
        failed_methods=failed_methods,
        timings=pd.DataFrame(timings, columns=TIMING_COLUMNS),
    )

    reference = inputs[spec.noise_levels[0]]
    if spec.mmse_sweep is not None:
        report.mmse_sweep = run_mmse_sweep(reference, z, spec)
    if spec.dims_sweep is not None:
        report.dims_sweep = run_dims_sweep(reference, z, spec)
    if spec.mode_extraction is not None:
        try:
            report.modes = run_mode_extraction(reference, z, spec)
        except _RECOVERABLE as e:
            logger.warning(f"Mode extraction failed: {e}")
            report.modes = empty_frame(MODE_COLUMNS)
    if spec.predictions is not None:
        report.predictions = run_predictions(inputs, z, spec, selected)
    if spec.timing is not None:
        report.probes = run_timing_probes(inputs, z, spec, selected)

    logger.info(f"Experiment {spec_hash[:12]} finished: {len(cells)} cells, {int((cells['status'] != 'ok').sum())} failed")
    return report
