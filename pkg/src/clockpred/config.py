"""Flat key=value configuration shared by every pipeline stage.

One file configures the synthetic generator (gen_*), preprocessing
(train_frac, val_frac, fit_on_full), training (train_*, cnn_channels) and
the Kalman baseline (kf_*).  Every key is optional; omitted keys fall back
to the frozen defaults below, which define the bundled experiment.
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping

from .kalman import KalmanParams
from .series import DEFAULT_TRAIN_FRAC, DEFAULT_VAL_FRAC
from .synthetic import SyntheticClockSpec
from .training import DEFAULT_SEED, TrainConfig

ENV_CONFIG_PATH = "CLOCKPRED_CONFIG"

DEFAULTS: dict[str, str] = {
    "seed": str(DEFAULT_SEED),
    # preprocessing
    "train_frac": repr(DEFAULT_TRAIN_FRAC),
    "val_frac": repr(DEFAULT_VAL_FRAC),
    "fit_on_full": "false",
    # synthetic generator
    "gen_x0": "50.0",
    "gen_y0": "10.0",
    "gen_drift": "0.005",
    "gen_sigma_wfm": "1.0",
    "gen_sigma_rwfm": "0.08",
    "gen_n": "274",
    "gen_interval": "5",
    "gen_start_epoch": "56934",
    # training
    "cnn_channels": "1",
    "train_max_updates": "2000",
    "train_l2_lambda": "1e-4",
    "train_patience": "2000",
    "train_lr": "0.005",
    "train_beta1": "0.9",
    "train_beta2": "0.999",
    "train_eps": "1e-3",
    # Kalman baseline (normalized units)
    "kf_q1": "0.1",
    "kf_q2": "1e-4",
    "kf_r": "1e-6",
    "kf_p0": "1e6",
}


def parse_config(path) -> dict[str, str]:
    """Read ``key = value`` lines; '#' starts a comment, blanks are skipped.

    Raises
    ------
    ValueError
        On malformed lines (with line number) or unknown keys.
    """
    entries: dict[str, str] = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in DEFAULTS:
            raise ValueError(f"{path}:{lineno}: unknown configuration key {key!r}")
        if not value:
            raise ValueError(f"{path}:{lineno}: empty value for {key!r}")
        entries[key] = value
    return entries


def effective_config(overrides: Mapping[str, str] | None = None) -> dict[str, str]:
    """Defaults merged with the given overrides."""
    merged = dict(DEFAULTS)
    if overrides:
        merged.update(overrides)
    return merged


def _as_float(cfg: Mapping[str, str], key: str) -> float:
    try:
        return float(cfg[key])
    except ValueError:
        raise ValueError(f"configuration key {key!r}: {cfg[key]!r} is not a number") from None


def _as_int(cfg: Mapping[str, str], key: str) -> int:
    try:
        return int(cfg[key])
    except ValueError:
        raise ValueError(f"configuration key {key!r}: {cfg[key]!r} is not an integer") from None


def _as_bool(cfg: Mapping[str, str], key: str) -> bool:
    value = cfg[key].lower()
    if value in ("true", "1", "yes"):
        return True
    if value in ("false", "0", "no"):
        return False
    raise ValueError(f"configuration key {key!r}: {cfg[key]!r} is not a boolean")


def seed_from(cfg: Mapping[str, str], override: int | None = None) -> int:
    seed = _as_int(cfg, "seed") if override is None else int(override)
    if seed < 0:
        raise ValueError(f"seed must be nonnegative, got {seed}")
    return seed


def synthetic_spec_from(cfg: Mapping[str, str], seed: int | None = None) -> SyntheticClockSpec:
    return SyntheticClockSpec(
        x0=_as_float(cfg, "gen_x0"),
        y0=_as_float(cfg, "gen_y0"),
        drift=_as_float(cfg, "gen_drift"),
        sigma_wfm=_as_float(cfg, "gen_sigma_wfm"),
        sigma_rwfm=_as_float(cfg, "gen_sigma_rwfm"),
        n=_as_int(cfg, "gen_n"),
        interval=_as_int(cfg, "gen_interval"),
        seed=seed_from(cfg, seed),
        start_epoch=_as_int(cfg, "gen_start_epoch"),
    )


def train_config_from(cfg: Mapping[str, str], seed: int | None = None) -> TrainConfig:
    return TrainConfig(
        max_updates=_as_int(cfg, "train_max_updates"),
        l2_lambda=_as_float(cfg, "train_l2_lambda"),
        patience=_as_int(cfg, "train_patience"),
        seed=seed_from(cfg, seed),
        lr=_as_float(cfg, "train_lr"),
        beta1=_as_float(cfg, "train_beta1"),
        beta2=_as_float(cfg, "train_beta2"),
        eps=_as_float(cfg, "train_eps"),
    )


def kalman_params_from(cfg: Mapping[str, str]) -> KalmanParams:
    return KalmanParams(
        q1=_as_float(cfg, "kf_q1"),
        q2=_as_float(cfg, "kf_q2"),
        r=_as_float(cfg, "kf_r"),
        p0=_as_float(cfg, "kf_p0"),
    )


def prepare_options_from(cfg: Mapping[str, str]) -> tuple[float, float, bool]:
    return (
        _as_float(cfg, "train_frac"),
        _as_float(cfg, "val_frac"),
        _as_bool(cfg, "fit_on_full"),
    )


def interval_from(cfg: Mapping[str, str]) -> int:
    return _as_int(cfg, "gen_interval")


def channels_from(cfg: Mapping[str, str]) -> int:
    return _as_int(cfg, "cnn_channels")
