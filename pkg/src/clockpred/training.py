"""Sliding-window supervision, the Adam optimizer, and the training loop.

Each training pair is a 5-point window of the normalized residual series
and the value one step after it.  Updates are full batch: the loss is the
root-mean-square error over all pairs plus an L2 penalty on the weights,
and one Adam step is taken per update.  Validation RMSE drives early
stopping with best-snapshot restoration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .cnn import CnnModel, backward_batch, forward_batch
from .series import TimeSeries

DEFAULT_SEED = 56934

STOP_MAX_UPDATES = "max-updates"
STOP_EARLY = "early-stop"


@dataclass(frozen=True)
class WindowDataset:
    """Window/next-point pairs drawn from one contiguous index range."""

    inputs: np.ndarray
    targets: np.ndarray
    source_range: range

    def __post_init__(self):
        inputs = np.asarray(self.inputs, dtype=np.float64)
        targets = np.asarray(self.targets, dtype=np.float64)
        if inputs.ndim != 2 or targets.ndim != 1 or inputs.shape[0] != targets.size:
            raise ValueError("inputs must be (n, width) with one target per window")
        inputs.flags.writeable = False
        targets.flags.writeable = False
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "targets", targets)

    def __len__(self) -> int:
        return self.targets.size


def make_windows(series: TimeSeries, indices: range, width: int = 5) -> WindowDataset:
    """All (window, next point) pairs fully contained in ``indices``.

    A range of length L yields L - width pairs.
    """
    if indices.step != 1:
        raise ValueError("window extraction requires a contiguous index range")
    if indices.start < 0 or indices.stop > len(series):
        raise ValueError(f"index range {indices} out of bounds")
    if len(indices) < width + 1:
        raise ValueError(
            f"range of {len(indices)} points is too short for width-{width} "
            "windows with a one-point-ahead target"
        )
    starts = range(indices.start, indices.stop - width)
    inputs = np.stack([series.values[j : j + width] for j in starts])
    targets = np.array([series.values[j + width] for j in starts])
    return WindowDataset(inputs, targets, indices)


def rmse_loss(preds, targets) -> float:
    """Root-mean-square error between predictions and targets."""
    preds = np.asarray(preds, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    if preds.shape != targets.shape or preds.ndim != 1:
        raise ValueError(f"shape mismatch: {preds.shape} vs {targets.shape}")
    if preds.size == 0:
        raise ValueError("rmse of empty vectors is undefined")
    return float(np.sqrt(np.mean((preds - targets) ** 2)))


def weight_norm_sq(model: CnnModel) -> float:
    """Sum of squared kernel and head weights; biases are excluded."""
    total = float(np.sum(model.head_weights**2))
    for layer in model.layers:
        total += float(np.sum(layer.kernel**2))
    return total


def loss_with_l2(preds, targets, model: CnnModel, l2_lambda: float) -> float:
    """RMSE plus ``l2_lambda`` times the squared weight norm."""
    return rmse_loss(preds, targets) + float(l2_lambda) * weight_norm_sq(model)


@dataclass(frozen=True)
class AdamState:
    """First/second moment estimates plus the optimizer hyperparameters."""

    m: np.ndarray
    v: np.ndarray
    t: int
    lr: float
    beta1: float
    beta2: float
    eps: float

    def __post_init__(self):
        m = np.asarray(self.m, dtype=np.float64)
        v = np.asarray(self.v, dtype=np.float64)
        if m.shape != v.shape or m.ndim != 1:
            raise ValueError("moment vectors must be 1D and congruent")
        if np.any(v < 0.0):
            raise ValueError("second moments must be nonnegative")
        if self.t < 0:
            raise ValueError("step count must be nonnegative")
        m.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "v", v)

    @classmethod
    def initial(
        cls,
        n_params: int,
        lr: float = 0.01,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ) -> "AdamState":
        return cls(np.zeros(n_params), np.zeros(n_params), 0, lr, beta1, beta2, eps)


def adam_step(params, grads, state: AdamState) -> tuple[np.ndarray, AdamState]:
    """One Adam update.

    m <- b1*m + (1-b1)*g,  v <- b2*v + (1-b2)*g^2, bias-corrected, then
    theta <- theta - lr * m_hat / (sqrt(v_hat) + eps).
    """
    params = np.asarray(params, dtype=np.float64)
    grads = np.asarray(grads, dtype=np.float64)
    if params.shape != grads.shape or params.shape != state.m.shape:
        raise ValueError(
            f"shape mismatch: params {params.shape}, grads {grads.shape}, "
            f"state {state.m.shape}"
        )
    t = state.t + 1
    m = state.beta1 * state.m + (1.0 - state.beta1) * grads
    v = state.beta2 * state.v + (1.0 - state.beta2) * grads**2
    m_hat = m / (1.0 - state.beta1**t)
    v_hat = v / (1.0 - state.beta2**t)
    new_params = params - state.lr * m_hat / (np.sqrt(v_hat) + state.eps)
    return new_params, replace(state, m=m, v=v, t=t)


@dataclass(frozen=True)
class TrainConfig:
    """Training-loop knobs; every field has a working default.

    The defaults are the frozen settings of the bundled experiment: a
    learning rate low enough that the terminal loss plateau is quiet, a
    damping eps well above machine precision for the same reason, and
    patience equal to the update budget, which turns early stopping into
    pure best-snapshot restoration.  Set a smaller patience to truncate
    runs whose validation error has stopped improving.
    """

    max_updates: int = 2000
    l2_lambda: float = 1e-4
    patience: int = 2000
    seed: int = DEFAULT_SEED
    lr: float = 0.005
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-3

    def __post_init__(self):
        if self.max_updates < 1:
            raise ValueError("max_updates must be at least 1")
        if self.l2_lambda < 0.0:
            raise ValueError("l2_lambda must be nonnegative")
        if self.patience < 1:
            raise ValueError("patience must be at least 1")


@dataclass(frozen=True)
class TrainingTrace:
    """Per-update train/validation RMSE, the stop reason, and the best update."""

    train_rmse: np.ndarray
    val_rmse: np.ndarray
    stop_reason: str
    best_update: int

    def __post_init__(self):
        train = np.asarray(self.train_rmse, dtype=np.float64)
        val = np.asarray(self.val_rmse, dtype=np.float64)
        if train.shape != val.shape or train.ndim != 1:
            raise ValueError("trace columns must be congruent 1D arrays")
        if self.stop_reason not in (STOP_MAX_UPDATES, STOP_EARLY):
            raise ValueError(f"unknown stop reason {self.stop_reason!r}")
        if not (0 <= self.best_update < train.size):
            raise ValueError("best_update outside the recorded trace")
        train.flags.writeable = False
        val.flags.writeable = False
        object.__setattr__(self, "train_rmse", train)
        object.__setattr__(self, "val_rmse", val)

    def __len__(self) -> int:
        return self.train_rmse.size


def predict_dataset(model: CnnModel, ds: WindowDataset) -> np.ndarray:
    """Model outputs for every window, in dataset order."""
    return forward_batch(model, ds.inputs)


def _loss_gradient(model: CnnModel, ds: WindowDataset, l2_lambda: float) -> np.ndarray:
    """Gradient of ``loss_with_l2`` over the whole dataset, as a flat vector."""
    preds = forward_batch(model, ds.inputs)
    resid = preds - ds.targets
    n = resid.size
    rmse = math.sqrt(float(np.mean(resid**2)))
    grad = np.zeros(model.num_params)
    if rmse > 0.0:
        grad += backward_batch(model, ds.inputs, resid / (n * rmse))
    grad += (2.0 * l2_lambda) * model.weight_mask() * model.to_vector()
    return grad


def train(
    model: CnnModel,
    train_ds: WindowDataset,
    val_ds: WindowDataset,
    cfg: TrainConfig,
) -> tuple[CnnModel, TrainingTrace]:
    """Full-batch Adam with early stopping on validation RMSE.

    Stops after ``cfg.max_updates`` updates, or once validation RMSE has
    failed to improve for ``cfg.patience`` consecutive updates.  The
    returned model is the snapshot with the lowest validation RMSE.
    """
    if len(train_ds) == 0 or len(val_ds) == 0:
        raise ValueError("training and validation datasets must be nonempty")
    params = model.to_vector()
    state = AdamState.initial(
        params.size, lr=cfg.lr, beta1=cfg.beta1, beta2=cfg.beta2, eps=cfg.eps
    )
    train_curve: list[float] = []
    val_curve: list[float] = []
    best_val = math.inf
    best_params = params.copy()
    best_update = 0
    stale = 0
    stop_reason = STOP_MAX_UPDATES
    current = model
    for update in range(cfg.max_updates):
        grads = _loss_gradient(current, train_ds, cfg.l2_lambda)
        params, state = adam_step(params, grads, state)
        current = model.from_vector(params)
        train_curve.append(rmse_loss(predict_dataset(current, train_ds), train_ds.targets))
        val_curve.append(rmse_loss(predict_dataset(current, val_ds), val_ds.targets))
        if val_curve[-1] < best_val:
            best_val = val_curve[-1]
            best_params = params.copy()
            best_update = update
            stale = 0
        else:
            stale += 1
            if stale >= cfg.patience:
                stop_reason = STOP_EARLY
                break
    trace = TrainingTrace(np.array(train_curve), np.array(val_curve), stop_reason, best_update)
    return model.from_vector(best_params), trace


def trace_to_csv(trace: TrainingTrace) -> str:
    """CSV document ``update,train_rmse,val_rmse`` with updates counted from 1."""
    lines = ["update,train_rmse,val_rmse"]
    for i, (tr, vr) in enumerate(zip(trace.train_rmse, trace.val_rmse), start=1):
        lines.append(f"{i},{float(tr)!r},{float(vr)!r}")
    return "\n".join(lines) + "\n"


def write_trace(trace: TrainingTrace, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(trace_to_csv(trace))
