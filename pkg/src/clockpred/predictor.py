"""Rolling one-step-ahead evaluation over the test partition.

Each test point is predicted from the 5 actual points before it; earlier
predictions are never fed back in.  Normalized predictions are mapped back
to nanoseconds by undoing the scale and re-adding the quadratic trend, and
both methods are scored with the root-mean-square prediction error.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .cnn import CnnModel, forward
from .kalman import KalmanParams, kf_one_ahead
from .series import NormalizationScale, PreparedSeries, QuadraticTrend, TimeSeries
from .training import rmse_loss

REPORT_HEADER = "mjd,actual_ns,cnn_pred_ns,kf_pred_ns,cnn_diff_ns,kf_diff_ns"


def e_rms_pred(preds, actuals) -> float:
    """Root-mean-square prediction error; same formula as the training loss."""
    return rmse_loss(preds, actuals)


def eligible_indices(test_range: range, width: int = 5) -> list[int]:
    """Test indices whose full width-point history exists."""
    return [i for i in test_range if i >= width]


def rolling_predict(
    predict_fn: Callable[[np.ndarray], float],
    series_norm: TimeSeries,
    test_range: range,
    width: int = 5,
) -> np.ndarray:
    """One prediction per eligible test index, in ascending epoch order.

    ``predict_fn`` receives the ``width`` actual values preceding the target
    index; windows may reach back before ``test_range`` but never contain a
    prior prediction.
    """
    if test_range.stop > len(series_norm):
        raise ValueError(f"test range {test_range} out of bounds")
    indices = eligible_indices(test_range, width)
    if not indices:
        raise ValueError(
            f"test range {test_range} is too short: no index has {width} predecessors"
        )
    return np.array(
        [float(predict_fn(series_norm.values[i - width : i])) for i in indices]
    )


def reconstruct(
    preds_norm, scale: NormalizationScale, trend: QuadraticTrend, epochs
) -> np.ndarray:
    """Map normalized residual predictions back to nanoseconds at the given epochs."""
    preds_norm = np.asarray(preds_norm, dtype=np.float64)
    epochs = np.asarray(epochs)
    if preds_norm.shape != epochs.shape:
        raise ValueError(
            f"{preds_norm.size} predictions do not match {epochs.size} epochs"
        )
    return preds_norm * scale.d_max_abs + trend(epochs)


def persistence_predictor(window) -> float:
    """Trivial baseline: tomorrow equals today."""
    return float(np.asarray(window)[-1])


def memorization_predictor(
    series_norm: TimeSeries, test_range: range, width: int = 5
) -> Callable[[np.ndarray], float]:
    """Stub that returns each target's actual value (harness self-check)."""
    answers = iter(
        float(series_norm.values[i]) for i in eligible_indices(test_range, width)
    )

    def predict(window) -> float:
        return next(answers)

    return predict


def cnn_window_predictor(model: CnnModel) -> Callable[[np.ndarray], float]:
    return lambda window: forward(model, window)


def kalman_window_predictor(
    params: KalmanParams, interval: float
) -> Callable[[np.ndarray], float]:
    return lambda window: kf_one_ahead(window, interval, params)


@dataclass(frozen=True)
class PredictionReport:
    """Per-epoch test values, both methods' predictions, and summary scores."""

    epochs: np.ndarray
    actual_ns: np.ndarray
    cnn_pred_ns: np.ndarray
    kf_pred_ns: np.ndarray
    cnn_diff_ns: np.ndarray
    kf_diff_ns: np.ndarray
    n_pred: int
    cnn_e_rms_ns: float
    kf_e_rms_ns: float

    def __post_init__(self):
        columns = {}
        for name in (
            "epochs",
            "actual_ns",
            "cnn_pred_ns",
            "kf_pred_ns",
            "cnn_diff_ns",
            "kf_diff_ns",
        ):
            arr = np.asarray(getattr(self, name))
            if arr.ndim != 1 or arr.size != self.n_pred:
                raise ValueError(f"column {name} must hold {self.n_pred} entries")
            arr.flags.writeable = False
            columns[name] = arr
        for name, arr in columns.items():
            object.__setattr__(self, name, arr)


def compare(
    cnn_method,
    kf_method,
    prepared: PreparedSeries,
    test_range: range | None = None,
    width: int = 5,
) -> PredictionReport:
    """Run both predictors over identical windows and score them.

    ``cnn_method`` may be a :class:`CnnModel` or any window callable;
    ``kf_method`` may be a :class:`KalmanParams` or any window callable.
    """
    if test_range is None:
        test_range = prepared.split.test_range
    cnn_fn = cnn_method if callable(cnn_method) else cnn_window_predictor(cnn_method)
    kf_fn = (
        kf_method
        if callable(kf_method)
        else kalman_window_predictor(kf_method, prepared.series.interval)
    )
    cnn_norm = rolling_predict(cnn_fn, prepared.residual_norm, test_range, width)
    kf_norm = rolling_predict(kf_fn, prepared.residual_norm, test_range, width)
    indices = eligible_indices(test_range, width)
    epochs = prepared.series.epochs[indices]
    actual = prepared.series.values[indices]
    cnn_ns = reconstruct(cnn_norm, prepared.scale, prepared.trend, epochs)
    kf_ns = reconstruct(kf_norm, prepared.scale, prepared.trend, epochs)
    return PredictionReport(
        epochs=epochs,
        actual_ns=actual,
        cnn_pred_ns=cnn_ns,
        kf_pred_ns=kf_ns,
        cnn_diff_ns=cnn_ns - actual,
        kf_diff_ns=kf_ns - actual,
        n_pred=len(indices),
        cnn_e_rms_ns=e_rms_pred(cnn_ns, actual),
        kf_e_rms_ns=e_rms_pred(kf_ns, actual),
    )


def report_to_csv(report: PredictionReport) -> str:
    """Full-precision CSV with one row per predicted epoch."""
    lines = [REPORT_HEADER]
    for i in range(report.n_pred):
        row = (
            f"{report.epochs[i]},{float(report.actual_ns[i])!r},"
            f"{float(report.cnn_pred_ns[i])!r},{float(report.kf_pred_ns[i])!r},"
            f"{float(report.cnn_diff_ns[i])!r},{float(report.kf_diff_ns[i])!r}"
        )
        lines.append(row)
    return "\n".join(lines) + "\n"


def summary_to_json(report: PredictionReport) -> str:
    """The scores behind the comparison: counts and both RMS errors in ns."""
    payload = {
        "n_pred": report.n_pred,
        "cnn_e_rms_ns": report.cnn_e_rms_ns,
        "kf_e_rms_ns": report.kf_e_rms_ns,
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def write_report(report: PredictionReport, csv_path, summary_path=None) -> None:
    with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(report_to_csv(report))
    if summary_path is not None:
        with open(summary_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(summary_to_json(report))
