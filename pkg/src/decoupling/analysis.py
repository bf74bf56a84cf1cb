"""Closed-form decay approximations, lower bounds, and trace fits.

Conventions: hbar = 1, all times in the same unit as 1/(Hamiltonian norm).
Deficit means 1 - fidelity.  Every approximation has a first-order form
(1 - x, clamped at zero) and an exponential form (exp(-x)) for plotting
beyond the first-order validity window; the first-order form is the
default and is what the bound inequalities refer to.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .engine import FidelityTrace


class BoundDomainError(ValueError):
    """The norm bound is vacuous for this cycle time."""


class InsufficientDataError(ValueError):
    """Too few usable trace points inside the fit window."""


# The residual-norm bound exists while 2 - exp(x) + x > 0; its domain edge
# solves exp(x) - x = 2.
X_STAR = float(brentq(lambda x: np.exp(x) - x - 2.0, 1e-12, 2.0, xtol=1e-14))

DEFAULT_FIT_WINDOW = (1e-6, 1e-1)


@dataclass(frozen=True)
class BoundInputs:
    """Scalar inputs shared by every bound: norms and uncertainties of the
    bare and residual generators, the cycle time, and the pulse interval."""

    h0_norm: float
    delta_h0: float
    hbar_norm: float
    delta_hbar: float
    t_c: float
    dt: float

    def __post_init__(self):
        for name in ("h0_norm", "delta_h0", "hbar_norm", "delta_hbar", "t_c", "dt"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        if self.delta_h0 > self.h0_norm * (1 + 1e-12):
            raise ValueError("delta_h0 exceeds h0_norm")
        if self.delta_hbar > self.hbar_norm * (1 + 1e-12):
            raise ValueError("delta_hbar exceeds hbar_norm")


@dataclass(frozen=True)
class FitResult:
    value: float
    stderr: float
    n_points: int


def _first_order(deficit: np.ndarray, form: str) -> np.ndarray:
    if form == "linear":
        return np.maximum(1.0 - deficit, 0.0)
    if form == "exp":
        return np.exp(-deficit)
    raise ValueError(f"form must be 'linear' or 'exp', got {form!r}")


def free_decay_approx(delta_h0: float, times: np.ndarray, form: str = "linear") -> np.ndarray:
    """Short-time dephasing of free evolution: f = 1 - (T dH0)^2."""
    times = np.asarray(times, dtype=float)
    return _first_order((times * delta_h0) ** 2, form)


def det_decay_approx(delta_hbar: float, times: np.ndarray, form: str = "linear") -> np.ndarray:
    """Short-time decay under a deterministic cycle: f = 1 - (T dHres)^2,
    valid at multiples of the cycle time."""
    times = np.asarray(times, dtype=float)
    return _first_order((times * delta_hbar) ** 2, form)


def parec_rate(delta_h0: float, dt: float) -> float:
    """Golden-rule decay rate of randomised control: Gamma = dt * dH0^2."""
    return dt * delta_h0**2


def embedded_rate(delta_hbar: float, t_c: float) -> float:
    """Golden-rule rate with the residual generator: Gamma = T_c * dHres^2."""
    return t_c * delta_hbar**2


def rate_prediction(rate: float, times: np.ndarray, form: str = "exp") -> np.ndarray:
    """Mean-fidelity prediction from a decay rate: 1 - Gamma T or exp(-Gamma T)."""
    times = np.asarray(times, dtype=float)
    return _first_order(rate * times, form)


def residual_norm_bound(h0_norm: float, t_c: float) -> float:
    """Upper bound -ln(2 - exp(x) + x) / T_c on the residual norm, with
    x = |H0| T_c; requires x < X_STAR, and reduces to |H0|^2 T_c / 2 for
    small x."""
    x = h0_norm * t_c
    if x >= X_STAR:
        raise BoundDomainError(
            f"norm bound vacuous: |H0| T_c = {x:.6g} >= x* = {X_STAR:.6g}"
        )
    if x == 0.0:
        return 0.0
    # 2 - exp(x) + x = 1 - (expm1(x) - x); expm1/log1p keep the small-x
    # regime accurate where the direct form cancels catastrophically
    return -np.log1p(-(np.expm1(x) - x)) / t_c


def det_bound(h0_norm: float, t_c: float, times: np.ndarray) -> np.ndarray:
    """Deterministic-cycle fidelity lower bound f >= 1 - (|H0|^2 T T_c / 2)^2.

    Implemented as the quadratic decay law with the small-x norm bound
    |H0|^2 T_c / 2 substituted for the residual uncertainty, so the two are
    identical by construction."""
    return det_decay_approx(h0_norm**2 * t_c / 2.0, times)


def parec_bound(h0_norm: float, dt: float, times: np.ndarray) -> np.ndarray:
    """Randomised-control mean-fidelity lower bound Ef >= 1 - |H0|^2 T dt."""
    times = np.asarray(times, dtype=float)
    return _first_order(h0_norm**2 * times * dt, "linear")


def embedded_bound(h0_norm: float, t_c: float, times: np.ndarray) -> np.ndarray:
    """Embedded-scheme lower bound Ef >= 1 - (|H0|^2 T_c / 2)^2 T T_c.

    Implemented as the randomised-control bound with the residual generator
    substitutions (norm -> |H0|^2 T_c / 2, interval -> T_c)."""
    return parec_bound(h0_norm**2 * t_c / 2.0, t_c, times)


def _window_points(trace: FidelityTrace, window: tuple[float, float]):
    """Recorded points with deficit inside the window, above the Monte Carlo
    noise floor (3 standard errors), and at positive times."""
    lo, hi = window
    deficit = 1.0 - trace.mean_fidelity
    mask = (
        (trace.times > 0)
        & (deficit >= lo)
        & (deficit <= hi)
        & (deficit > 3.0 * trace.std_error)
    )
    return trace.times[mask], deficit[mask]


def _ols(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Least-squares slope of y on x with its standard error."""
    n = len(x)
    xm = x - x.mean()
    ym = y - y.mean()
    sxx = float(xm @ xm)
    slope = float(xm @ ym) / sxx
    if n > 2:
        resid = ym - slope * xm
        stderr = float(np.sqrt((resid @ resid) / ((n - 2) * sxx)))
    else:
        stderr = np.inf
    return slope, stderr


def fit_loglog_slope(
    trace: FidelityTrace, window: tuple[float, float] = DEFAULT_FIT_WINDOW
) -> FitResult:
    """Least-squares slope of log(1 - f) against log T inside the deficit
    window; needs at least 10 usable points."""
    times, deficit = _window_points(trace, window)
    if len(times) < 10:
        raise InsufficientDataError(
            f"only {len(times)} usable points in deficit window {window}"
        )
    slope, stderr = _ols(np.log(times), np.log(deficit))
    return FitResult(slope, stderr, len(times))


def fit_decay_rate(
    trace: FidelityTrace, window: tuple[float, float] = DEFAULT_FIT_WINDOW
) -> FitResult:
    """Decay rate from the least-squares slope of ln f against T inside the
    deficit window (rate = -slope); needs at least 10 usable points."""
    times, deficit = _window_points(trace, window)
    if len(times) < 10:
        raise InsufficientDataError(
            f"only {len(times)} usable points in deficit window {window}"
        )
    slope, stderr = _ols(times, np.log1p(-deficit))
    return FitResult(-slope, stderr, len(times))


BOUNDS_HEADER = (
    "time_tau,eq5_bound,eq6_bound,eq7_bound,eq3_approx,eq8_approx,"
    "parec_rate_pred,embedded_rate_pred"
)


def bounds_table(inputs: BoundInputs, times: np.ndarray) -> dict[str, np.ndarray]:
    """All bound and approximation curves on a common time grid, keyed by
    the bounds-CSV column names."""
    times = np.asarray(times, dtype=float)
    return {
        "time_tau": times,
        "eq5_bound": det_bound(inputs.h0_norm, inputs.t_c, times),
        "eq6_bound": parec_bound(inputs.h0_norm, inputs.dt, times),
        "eq7_bound": embedded_bound(inputs.h0_norm, inputs.t_c, times),
        "eq3_approx": det_decay_approx(inputs.delta_hbar, times),
        "eq8_approx": free_decay_approx(inputs.delta_h0, times),
        "parec_rate_pred": rate_prediction(parec_rate(inputs.delta_h0, inputs.dt), times),
        "embedded_rate_pred": rate_prediction(
            embedded_rate(inputs.delta_hbar, inputs.t_c), times
        ),
    }


def write_bounds(path, table: dict[str, np.ndarray]) -> None:
    columns = BOUNDS_HEADER.split(",")
    if list(table.keys()) != columns:
        raise ValueError("bounds table does not match the CSV schema")
    rows = np.column_stack([table[c] for c in columns])
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(BOUNDS_HEADER + "\n")
        for row in rows:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
