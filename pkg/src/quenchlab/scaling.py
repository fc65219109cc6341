"""Scaling-law extraction: power-law and logarithmic fits, threshold finders.

All fits are plain least squares on transformed coordinates with the fit
window recorded in the result, so every exponent in a report can be traced
back to the exact data range that produced it.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

DEFAULT_EPS_C = 1e-6


class NoEntangledWindow(RuntimeError):
    """Raised when a scan finds no time scale with concurrence above threshold."""


class FitWindowError(ValueError):
    """Raised when a fit window is empty or otherwise unusable."""


@dataclass(frozen=True)
class SweepSeries:
    """Ordered (x, y) samples of one swept variable with fixed-parameter metadata."""

    x: np.ndarray
    y: np.ndarray
    swept: str = "tau"
    fixed: dict = field(default_factory=dict)
    seed: int | None = None

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        if x.ndim != 1 or x.shape != y.shape:
            raise ValueError("x and y must be 1-d arrays of equal length")
        if np.any(np.diff(x) <= 0):
            raise ValueError("x must be strictly increasing")
        if not np.all(np.isfinite(y)):
            raise ValueError("y must be finite")

    def restrict(self, lo: float, hi: float) -> "SweepSeries":
        m = (self.x >= lo) & (self.x <= hi)
        return SweepSeries(self.x[m], self.y[m], self.swept, dict(self.fixed), self.seed)


@dataclass(frozen=True)
class FitResult:
    """Line-fit summary: slope/exponent, intercept, quality, window, metadata."""

    exponent: float
    amplitude: float
    r_squared: float
    residuals: np.ndarray
    window: tuple[float, float]
    kind: str
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not -1e-9 <= self.r_squared <= 1.0 + 1e-9:
            raise ValueError(f"r_squared {self.r_squared} outside [0, 1]")

    def to_json(self) -> str:
        payload = {
            "kind": self.kind,
            "exponent": self.exponent,
            "amplitude": self.amplitude,
            "r_squared": self.r_squared,
            "window": list(self.window),
            "meta": self.meta,
        }
        return json.dumps(payload, sort_keys=True)


def _line_fit(u: np.ndarray, v: np.ndarray):
    slope, intercept = np.polyfit(u, v, 1)
    pred = slope * u + intercept
    resid = v - pred
    ss_res = float(np.sum(resid**2))
    ss_tot = float(np.sum((v - v.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else max(0.0, 1.0 - ss_res / ss_tot)
    return float(slope), float(intercept), min(r2, 1.0), resid


def fit_power_law(series: SweepSeries, window: tuple[float, float] | None = None,
                  min_points: int = 5) -> FitResult:
    """Least-squares line on (ln x, ln y); the slope is the power-law exponent.

    ``min_points`` defaults to five; short designed scans (like the
    four-intensity cutoff fit) may lower it explicitly.
    """
    sel = series if window is None else series.restrict(*window)
    if len(sel.x) < min_points or len(sel.x) < 2:
        raise FitWindowError(f"need >= {max(min_points, 2)} points in window, have {len(sel.x)}")
    if np.any(sel.y <= 0.0):
        raise FitWindowError("power-law fit requires strictly positive y")
    slope, intercept, r2, resid = _line_fit(np.log(sel.x), np.log(sel.y))
    return FitResult(
        exponent=slope,
        amplitude=math.exp(intercept),
        r_squared=r2,
        residuals=resid,
        window=(float(sel.x[0]), float(sel.x[-1])),
        kind="power-law",
        meta={"swept": sel.swept, **sel.fixed},
    )


def fit_log_scaling(series: SweepSeries, xi: float,
                    window: tuple[float, float] | None = None) -> FitResult:
    """Least-squares line C = slope * ln(tau) + intercept on the given window.

    The slope is the (negative) logarithmic amplitude; ``meta`` records the
    implied zero crossing exp(-intercept/slope), to be compared against the
    directly estimated vanishing time scale.
    """
    sel = series if window is None else series.restrict(*window)
    if len(sel.x) < 6:
        raise FitWindowError(f"need >= 6 points in window, have {len(sel.x)}")
    slope, intercept, r2, resid = _line_fit(np.log(sel.x), sel.y)
    if slope == 0.0:
        raise FitWindowError("degenerate flat fit")
    crossing = math.exp(-intercept / slope)
    return FitResult(
        exponent=slope,
        amplitude=intercept,
        r_squared=r2,
        residuals=resid,
        window=(float(sel.x[0]), float(sel.x[-1])),
        kind="log-scaling",
        meta={"xi": xi, "zero_crossing": crossing, "swept": sel.swept, **sel.fixed},
    )


def estimate_tau0(
    concurrence_of_tau: Callable[[float], float],
    bracket: tuple[float, float] = (1.0, 4.0),
    eps_c: float = DEFAULT_EPS_C,
    iterations: int = 20,
) -> float:
    """Smallest time scale with nonvanishing large-field concurrence.

    Bisection on the indicator C(tau) > eps_c; requires C <= eps_c at the
    lower bracket edge and C > eps_c at the upper edge.
    """
    lo, hi = bracket
    if not concurrence_of_tau(hi) > eps_c:
        raise ValueError(f"no sign change: C({hi}) <= eps_c")
    if concurrence_of_tau(lo) > eps_c:
        raise ValueError(f"no sign change: C({lo}) already > eps_c")
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if concurrence_of_tau(mid) > eps_c:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def estimate_tau_c(
    concurrence_of_tau: Callable[[float], float],
    tau_grid: Sequence[float],
    eps_c: float = DEFAULT_EPS_C,
    iterations: int = 12,
) -> float:
    """Largest time scale with concurrence above threshold.

    Scans the (increasing) grid for the last point with C > eps_c, then
    bisects between it and the following grid point.  Raises
    NoEntangledWindow when the scan finds nothing above threshold.
    """
    grid = np.asarray(list(tau_grid), dtype=float)
    if np.any(np.diff(grid) <= 0):
        raise ValueError("tau grid must be strictly increasing")
    values = np.array([concurrence_of_tau(t) for t in grid])
    above = np.flatnonzero(values > eps_c)
    if len(above) == 0:
        raise NoEntangledWindow(f"no tau on the grid has C > {eps_c}")
    last = int(above[-1])
    if last == len(grid) - 1:
        raise ValueError("entangled window extends past the top of the scan grid")
    lo, hi = grid[last], grid[last + 1]
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if concurrence_of_tau(mid) > eps_c:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def estimate_tau_opt(series: SweepSeries) -> float:
    """Optimum annealing time: parabolic minimum of ln(n) against ln(tau).

    The series must straddle the turnover where the Kibble-Zurek decrease
    gives way to the noise-driven increase; a monotone series has no
    interior minimum and is rejected.
    """
    if len(series.x) < 3:
        raise FitWindowError("need at least 3 points to bracket a minimum")
    if np.any(series.y <= 0.0):
        raise FitWindowError("defect series must be strictly positive")
    ln_t = np.log(series.x)
    ln_n = np.log(series.y)
    i = int(np.argmin(ln_n))
    if i == 0 or i == len(ln_n) - 1:
        raise FitWindowError("series is monotone over the scan; no interior minimum")
    u0, u1, u2 = ln_t[i - 1], ln_t[i], ln_t[i + 1]
    v0, v1, v2 = ln_n[i - 1], ln_n[i], ln_n[i + 1]
    # vertex of the interpolating parabola through the three bracketing points
    denom = (u1 - u0) * (v1 - v2) - (u1 - u2) * (v1 - v0)
    if denom == 0.0:
        return float(series.x[i])
    num = (u1 - u0) ** 2 * (v1 - v2) - (u1 - u2) ** 2 * (v1 - v0)
    return float(math.exp(u1 - 0.5 * num / denom))


def max_concurrence_over_tau(series: SweepSeries) -> tuple[float, float]:
    """Maximum concurrence over the scan and the time scale where it occurs."""
    i = int(np.argmax(series.y))
    return float(series.y[i]), float(series.x[i])


def geometric_grid(lo: float, hi: float, points_per_decade: int = 24) -> np.ndarray:
    """Geometric grid with a fixed density per decade, endpoints included."""
    if not 0 < lo < hi:
        raise ValueError("need 0 < lo < hi")
    n = max(2, int(math.ceil(math.log10(hi / lo) * points_per_decade)) + 1)
    return np.geomspace(lo, hi, n)
