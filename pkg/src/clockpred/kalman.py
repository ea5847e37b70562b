"""Two-state Kalman filter baseline for one-step-ahead clock prediction.

The state is (phase in ns, frequency in ns/day); the quadratic drift has
already been removed upstream, so no drift state is carried.  Process noise
follows the standard two-state clock model driven by white-FM and
random-walk-FM spectral densities q1 and q2: over a step of tau days

    Q(tau) = [[q1*tau + q2*tau**3/3,  q2*tau**2/2],
              [q2*tau**2/2,           q2*tau     ]]

Only the phase is observed (H = [1, 0]) with measurement variance R.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

# Defaults frozen from a coarse grid search on the bundled synthetic
# experiment's validation partition (see notebooks/05_kalman_calibration.py).
# Units are normalized-residual units squared (and per day for the densities).
DEFAULT_Q1 = 0.1
DEFAULT_Q2 = 1e-4
DEFAULT_R = 1e-6
DEFAULT_P0 = 1e6


@dataclass(frozen=True)
class KalmanParams:
    """Noise configuration: spectral densities q1 (white FM), q2 (random-walk FM),
    measurement variance r, and the diffuse initial variance p0."""

    q1: float = DEFAULT_Q1
    q2: float = DEFAULT_Q2
    r: float = DEFAULT_R
    p0: float = DEFAULT_P0

    def __post_init__(self):
        if self.q1 < 0.0 or self.q2 < 0.0 or self.r < 0.0:
            raise ValueError("noise parameters must be nonnegative")
        if self.p0 <= 0.0:
            raise ValueError("initial variance must be positive")


def transition_matrix(interval: float) -> np.ndarray:
    """Phase/frequency propagation over one interval: [[1, tau], [0, 1]]."""
    tau = float(interval)
    return np.array([[1.0, tau], [0.0, 1.0]])


def process_noise(q1: float, q2: float, interval: float) -> np.ndarray:
    """Two-state clock process covariance accumulated over one interval."""
    tau = float(interval)
    return np.array(
        [
            [q1 * tau + q2 * tau**3 / 3.0, q2 * tau**2 / 2.0],
            [q2 * tau**2 / 2.0, q2 * tau],
        ]
    )


def _symmetrize(p: np.ndarray) -> np.ndarray:
    return (p + p.T) / 2.0


@dataclass(frozen=True)
class KalmanModel:
    """Filter value: state mean, covariance, and the fixed model matrices."""

    state: np.ndarray
    P: np.ndarray
    F: np.ndarray
    Q: np.ndarray
    R: float

    H = np.array([1.0, 0.0])

    def __post_init__(self):
        state = np.asarray(self.state, dtype=np.float64)
        P = np.asarray(self.P, dtype=np.float64)
        F = np.asarray(self.F, dtype=np.float64)
        Q = np.asarray(self.Q, dtype=np.float64)
        if state.shape != (2,):
            raise ValueError("state must be (phase, frequency)")
        for name, mat in (("P", P), ("F", F), ("Q", Q)):
            if mat.shape != (2, 2):
                raise ValueError(f"{name} must be 2x2")
        if not math.isclose(float(np.linalg.det(F)), 1.0, rel_tol=1e-9):
            raise ValueError("transition matrix must have unit determinant")
        for name, mat in (("P", P), ("Q", Q)):
            if not np.allclose(mat, mat.T, atol=1e-9 * max(1.0, float(np.abs(mat).max()))):
                raise ValueError(f"{name} must be symmetric")
        if self.R < 0.0:
            raise ValueError("measurement variance must be nonnegative")
        for arr in (state, P, F, Q):
            arr.flags.writeable = False
        object.__setattr__(self, "state", state)
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "R", float(self.R))

    @classmethod
    def initial(
        cls,
        phase: float,
        frequency: float,
        interval: float,
        params: KalmanParams = KalmanParams(),
    ) -> "KalmanModel":
        """Diffuse-prior filter around a rough (phase, frequency) guess."""
        return cls(
            state=np.array([phase, frequency]),
            P=np.diag([params.p0, params.p0]),
            F=transition_matrix(interval),
            Q=process_noise(params.q1, params.q2, interval),
            R=params.r,
        )


def kf_predict(kf: KalmanModel) -> KalmanModel:
    """Propagate one interval: state <- F state, P <- F P F' + Q."""
    state = kf.F @ kf.state
    P = _symmetrize(kf.F @ kf.P @ kf.F.T + kf.Q)
    return replace(kf, state=state, P=P)


def kf_update(kf: KalmanModel, z: float) -> KalmanModel:
    """Condition on a phase measurement ``z``.

    Raises
    ------
    ValueError
        If the innovation variance is not positive, which can only happen
        with R = 0 and a degenerate phase variance.
    """
    innovation_var = float(kf.P[0, 0]) + kf.R
    if innovation_var <= 0.0:
        raise ValueError(
            f"degenerate update: innovation variance {innovation_var} is not positive"
        )
    gain = kf.P[:, 0] / innovation_var
    state = kf.state + gain * (float(z) - kf.state[0])
    # Joseph form: algebraically (I - K H) P, but stable when P spans many
    # decades relative to R (diffuse start, near-zero measurement noise).
    closure = np.eye(2) - np.outer(gain, KalmanModel.H)
    P = _symmetrize(closure @ kf.P @ closure.T + kf.R * np.outer(gain, gain))
    return replace(kf, state=state, P=P)


def _process_noise_factor(q1: float, q2: float, tau: float) -> np.ndarray:
    """A 2x3 matrix M with M M' = Q(tau), built from the exact Cholesky pieces."""
    wfm = math.sqrt(q1 * tau)
    s2 = math.sqrt(q2)
    st = math.sqrt(tau)
    return np.array(
        [
            [wfm, s2 * tau * st / math.sqrt(3.0), 0.0],
            [0.0, s2 * st * math.sqrt(3.0) / 2.0, s2 * st / 2.0],
        ]
    )


def kf_one_ahead(window, interval: float, params: KalmanParams = KalmanParams()) -> float:
    """Filter a window of phase samples and extrapolate one interval ahead.

    The state mean starts from the first two points (phase = w[0],
    frequency = (w[1] - w[0]) / tau) under a diffuse covariance, so the
    crude start carries almost no weight once the measurements are folded
    in.  The covariance is propagated in square-root form (Potter update,
    QR prediction): with a diffuse start the plain recursion grinds the
    post-collapse variances against 12+ decades of dynamic range, which
    costs around half the mantissa.
    """
    w = np.asarray(window, dtype=np.float64)
    if w.ndim != 1 or w.size < 2:
        raise ValueError("window must be a 1D sequence of at least two samples")
    tau = float(interval)
    state = np.array([w[0], (w[1] - w[0]) / tau])
    root = np.diag([math.sqrt(params.p0), math.sqrt(params.p0)])
    transition = transition_matrix(tau)
    noise_factor = _process_noise_factor(params.q1, params.q2, tau)
    for z in w:
        # Potter measurement update on the factor (H = [1, 0]).
        a = root[0, :]
        innovation_var = float(a @ a) + params.r
        if innovation_var <= 0.0:
            raise ValueError(
                f"degenerate update: innovation variance {innovation_var} is not positive"
            )
        gain = root @ a / innovation_var
        state = state + gain * (float(z) - state[0])
        shrink = 1.0 / (innovation_var + math.sqrt(innovation_var * params.r))
        root = root - shrink * np.outer(root @ a, a)
        # Prediction: stack [F S | Q^(1/2)] and re-triangularize.
        state = transition @ state
        stacked = np.hstack([transition @ root, noise_factor])
        root = np.linalg.qr(stacked.T, mode="r").T
    return float(state[0])
