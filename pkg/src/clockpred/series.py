"""Clock time-difference series and their invertible preprocessing.

The data of interest are offsets between a reference timescale and a
free-running hydrogen maser, sampled every 5 days on the MJD grid and
expressed in nanoseconds.  This module owns everything that happens to
such a series before a predictor sees it: combining partial offset
streams, removing the slow quadratic drift, scaling into [-1, 1], and
slicing into train / validation / test partitions.  Every transform keeps
enough state (:class:`QuadraticTrend`, :class:`NormalizationScale`) to map
predictions back to physical nanoseconds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

DEFAULT_INTERVAL_DAYS = 5

# Partition fractions.  floor(0.5146 * n) / floor(0.1205 * n) reproduce the
# reference 141 / 33 / 100 partition of a 274-point series.
DEFAULT_TRAIN_FRAC = 0.5146
DEFAULT_VAL_FRAC = 0.1205

CSV_HEADER = "mjd,ns"


@dataclass(frozen=True)
class TimeSeries:
    """A uniformly spaced offset series.

    Parameters
    ----------
    epochs : array-like of int
        MJD day numbers, strictly increasing with constant spacing.
    values : array-like of float
        Offsets in nanoseconds, all finite.
    interval : int
        Spacing between consecutive epochs in days.
    """

    epochs: np.ndarray
    values: np.ndarray
    interval: int = DEFAULT_INTERVAL_DAYS

    def __post_init__(self):
        epochs = np.asarray(self.epochs)
        if epochs.dtype.kind == "f":
            if not np.all(epochs == np.floor(epochs)):
                raise ValueError("epochs must be whole MJD day numbers")
        epochs = epochs.astype(np.int64)
        values = np.asarray(self.values, dtype=np.float64)
        if epochs.ndim != 1 or values.ndim != 1:
            raise ValueError("epochs and values must be one-dimensional")
        if epochs.size != values.size:
            raise ValueError(
                f"epochs ({epochs.size}) and values ({values.size}) differ in length"
            )
        if epochs.size == 0:
            raise ValueError("series must contain at least one point")
        interval = int(self.interval)
        if interval <= 0:
            raise ValueError(f"interval must be a positive day count, got {self.interval}")
        steps = np.diff(epochs)
        if steps.size and not np.all(steps == interval):
            bad = int(np.flatnonzero(steps != interval)[0])
            raise ValueError(
                f"epochs must advance by {interval} days; offending step "
                f"{epochs[bad]} -> {epochs[bad + 1]}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("values must all be finite")
        epochs.flags.writeable = False
        values.flags.writeable = False
        object.__setattr__(self, "epochs", epochs)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "interval", interval)

    def __len__(self) -> int:
        return self.epochs.size

    def with_values(self, values) -> "TimeSeries":
        """Same epochs and interval, new values."""
        return TimeSeries(self.epochs, values, self.interval)

    def subseries(self, indices: range) -> "TimeSeries":
        """Contiguous slice of the series (``indices`` must have step 1)."""
        if indices.step != 1:
            raise ValueError("subseries requires a contiguous index range")
        if indices.start < 0 or indices.stop > len(self) or len(indices) == 0:
            raise ValueError(
                f"index range {indices} out of bounds for series of length {len(self)}"
            )
        return TimeSeries(
            self.epochs[indices.start : indices.stop],
            self.values[indices.start : indices.stop],
            self.interval,
        )


@dataclass(frozen=True)
class QuadraticTrend:
    """Quadratic drift ``c0 + c1*(t - t0) + c2*(t - t0)**2``.

    ``t0`` is the reference epoch in MJD days; the coefficients carry ns,
    ns/day and ns/day**2 units.
    """

    t0: float
    c0: float
    c1: float
    c2: float

    def __post_init__(self):
        for name in ("t0", "c0", "c1", "c2"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"trend coefficient {name} must be finite")
            object.__setattr__(self, name, value)

    def __call__(self, epochs) -> np.ndarray:
        dt = np.asarray(epochs, dtype=np.float64) - self.t0
        return self.c0 + dt * (self.c1 + dt * self.c2)


@dataclass(frozen=True)
class NormalizationScale:
    """The max-absolute-value divisor used to bring a series into [-1, 1]."""

    d_max_abs: float

    def __post_init__(self):
        value = float(self.d_max_abs)
        if not math.isfinite(value) or value <= 0.0:
            raise ValueError(
                f"degenerate normalization scale {self.d_max_abs!r}; "
                "the source series must contain a nonzero value"
            )
        object.__setattr__(self, "d_max_abs", value)


@dataclass(frozen=True)
class DataSplit:
    """Contiguous train / validation / test index partition."""

    train_range: range
    val_range: range
    test_range: range
    fractions: tuple[float, float]

    @property
    def sizes(self) -> tuple[int, int, int]:
        return (len(self.train_range), len(self.val_range), len(self.test_range))


def combine_series(a: TimeSeries, b: TimeSeries) -> TimeSeries:
    """Pointwise sum of two offset streams defined on identical epochs.

    Adding the [reference - local timescale] and [local timescale - maser]
    streams yields the [reference - maser] series the predictors work on.

    Raises
    ------
    ValueError
        If the epoch grids diverge; the message names the first epoch
        present in one series but not matched by the other.
    """
    if a.interval != b.interval:
        raise ValueError(
            f"cannot combine series with intervals {a.interval} and {b.interval}"
        )
    n = min(len(a), len(b))
    mismatch = np.flatnonzero(a.epochs[:n] != b.epochs[:n])
    if mismatch.size:
        i = int(mismatch[0])
        raise ValueError(
            f"epoch alignment error at index {i}: "
            f"{a.epochs[i]} != {b.epochs[i]}"
        )
    if len(a) != len(b):
        extra = a.epochs[n] if len(a) > len(b) else b.epochs[n]
        raise ValueError(
            f"epoch alignment error at index {n}: epoch {extra} has no counterpart"
        )
    return a.with_values(a.values + b.values)


def fit_quadratic(s: TimeSeries) -> QuadraticTrend:
    """Least-squares quadratic through the series.

    Solves the 3x3 normal equations on a centered and span-scaled abscissa
    so the system stays well conditioned at MJD magnitudes; the reference
    epoch of the returned trend is the first epoch of the series.

    Raises
    ------
    ValueError
        If the series has fewer than 3 points.
    """
    if len(s) < 3:
        raise ValueError(f"quadratic fit needs at least 3 points, got {len(s)}")
    t0 = float(s.epochs[0])
    dt = s.epochs.astype(np.float64) - t0
    span = float(dt[-1])
    u = dt / span
    design = np.vander(u, 3, increasing=True)
    gram = design.T @ design
    moments = design.T @ s.values
    a0, a1, a2 = np.linalg.solve(gram, moments)
    return QuadraticTrend(t0, float(a0), float(a1 / span), float(a2 / span**2))


def detrend(s: TimeSeries, trend: QuadraticTrend) -> TimeSeries:
    """Subtract the trend evaluated at the series epochs."""
    return s.with_values(s.values - trend(s.epochs))


def retrend(s: TimeSeries, trend: QuadraticTrend) -> TimeSeries:
    """Exact inverse of :func:`detrend`."""
    return s.with_values(s.values + trend(s.epochs))


def normalize(s: TimeSeries) -> tuple[TimeSeries, NormalizationScale]:
    """Divide by the maximum absolute value; returns the scale for inversion.

    Raises
    ------
    ValueError
        If every value is zero, which leaves no usable scale.
    """
    peak = float(np.max(np.abs(s.values)))
    if peak == 0.0:
        raise ValueError("cannot normalize an all-zero series (degenerate scale)")
    scale = NormalizationScale(peak)
    return s.with_values(s.values / peak), scale


def denormalize(s: TimeSeries, scale: NormalizationScale) -> TimeSeries:
    """Multiply by the stored scale; inverse of :func:`normalize`."""
    return s.with_values(s.values * scale.d_max_abs)


def split(
    n: int,
    train_frac: float = DEFAULT_TRAIN_FRAC,
    val_frac: float = DEFAULT_VAL_FRAC,
) -> DataSplit:
    """Partition ``n`` indices into contiguous train / validation / test.

    Train and validation sizes are ``floor(frac * n)``; the test partition
    takes the remainder.  All three partitions must end up nonempty.

    Raises
    ------
    ValueError
        On fractions outside (0, 1) or fractions summing to >= 1, and when
        the floor rule leaves any partition empty.
    """
    if not (0.0 < train_frac and 0.0 < val_frac and train_frac + val_frac < 1.0):
        raise ValueError(
            f"fractions out of range: train={train_frac}, val={val_frac} "
            "(need both > 0 and their sum < 1)"
        )
    n = int(n)
    n_train = math.floor(train_frac * n)
    n_val = math.floor(val_frac * n)
    n_test = n - n_train - n_val
    if min(n_train, n_val, n_test) < 1:
        raise ValueError(
            f"splitting {n} points as {n_train}/{n_val}/{n_test} leaves an "
            "empty partition; every partition must be nonempty"
        )
    return DataSplit(
        train_range=range(0, n_train),
        val_range=range(n_train, n_train + n_val),
        test_range=range(n_train + n_val, n),
        fractions=(float(train_frac), float(val_frac)),
    )


def series_to_csv(s: TimeSeries, decimals: int | None = 3) -> str:
    """Render the ``mjd,ns`` CSV document (LF line endings).

    ``decimals`` fixes the fractional digits of the ns column; ``None``
    writes full ``repr`` precision for intermediate files that must
    round-trip exactly.
    """
    lines = [CSV_HEADER]
    for mjd, value in zip(s.epochs, s.values):
        if decimals is None:
            lines.append(f"{mjd},{float(value)!r}")
        else:
            lines.append(f"{mjd},{value:.{decimals}f}")
    return "\n".join(lines) + "\n"


def write_series(s: TimeSeries, path, decimals: int | None = 3) -> None:
    """Write the series as ``mjd,ns`` CSV."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(series_to_csv(s, decimals))


def read_series(path, interval: int = DEFAULT_INTERVAL_DAYS) -> TimeSeries:
    """Parse a ``mjd,ns`` CSV file into a :class:`TimeSeries`.

    The epoch grid must advance by ``interval`` days; gaps are rejected, not
    interpolated, because a silently patched series would corrupt any
    downstream evaluation.

    Raises
    ------
    ValueError
        On a bad header, a malformed row (the message carries the line
        number), non-monotone epochs or spacing other than ``interval``.
    """
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines or lines[0].strip() != CSV_HEADER:
        raise ValueError(f"{path}:1: expected header {CSV_HEADER!r}")
    epochs: list[int] = []
    values: list[float] = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split(",")
        if len(fields) != 2:
            raise ValueError(f"{path}:{lineno}: malformed row {line!r}")
        try:
            epochs.append(int(fields[0]))
            values.append(float(fields[1]))
        except ValueError:
            raise ValueError(f"{path}:{lineno}: malformed row {line!r}") from None
    try:
        return TimeSeries(epochs, values, interval)
    except ValueError as err:
        raise ValueError(f"{path}: {err}") from None


@dataclass(frozen=True)
class PreparedSeries:
    """A series together with all of its invertible preprocessing state.

    ``residual_norm`` is the detrended, scale-normalized series every
    predictor consumes; ``trend`` and ``scale`` recover nanoseconds.
    """

    series: TimeSeries
    residual_norm: TimeSeries
    trend: QuadraticTrend
    scale: NormalizationScale
    split: DataSplit
    fit_on_full: bool


def prepare(
    series: TimeSeries,
    train_frac: float = DEFAULT_TRAIN_FRAC,
    val_frac: float = DEFAULT_VAL_FRAC,
    fit_on_full: bool = False,
) -> PreparedSeries:
    """Run the full preprocessing pipeline on a raw offset series.

    The quadratic trend and the normalization scale are fitted on the
    training prefix by default so no information leaks out of the train
    partition.  ``fit_on_full`` instead fits both on the complete series,
    which is the presentation convention for residual plots.
    """
    parts = split(len(series), train_frac, val_frac)
    fit_slice = range(0, len(series)) if fit_on_full else parts.train_range
    trend = fit_quadratic(series.subseries(fit_slice))
    residual = detrend(series, trend)
    peak = float(np.max(np.abs(residual.values[fit_slice.start : fit_slice.stop])))
    if peak == 0.0:
        raise ValueError("residual is identically zero; cannot form a scale")
    scale = NormalizationScale(peak)
    residual_norm = residual.with_values(residual.values / peak)
    return PreparedSeries(series, residual_norm, trend, scale, parts, fit_on_full)
