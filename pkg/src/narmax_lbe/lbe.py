"""Lower bound error over k pseudo-orbits and its log-linear growth rate.

At every step the lower bound error is half the largest pairwise distance
between the pseudo-orbits.  For any set of intervals centred on the orbit
values, a radius smaller than this cannot make the two farthest intervals
overlap, so at least one orbit must be at least that far from the true state.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy import stats

__all__ = [
    "ErrorSeries",
    "LyapunovFit",
    "IntervalCheck",
    "WindowTooSmallError",
    "InsufficientPointsError",
    "lbe_series",
    "two_orbit_lbe",
    "half_distance",
    "interval_check",
    "log2_series",
    "select_fit_window",
    "fit_lyapunov",
]


class WindowTooSmallError(ValueError):
    pass


class InsufficientPointsError(ValueError):
    pass


@dataclass
class ErrorSeries:
    """Per-step lower bound error.

    Attributes
    ----------
    zeta : ndarray of shape (N + 1,)
        NaN where ``valid`` is False.
    pairs : ndarray of shape (N + 1, 2)
        Row indices ``(i, j)``, ``i < j``, attaining the maximum; ``-1`` where
        invalid.
    valid : ndarray of bool
        False at steps where any orbit has diverged.
    """

    zeta: np.ndarray
    pairs: np.ndarray
    valid: np.ndarray

    @property
    def steps(self) -> np.ndarray:
        return np.arange(len(self.zeta))

    def __len__(self):
        return len(self.zeta)


@dataclass(frozen=True)
class LyapunovFit:
    """Least-squares line through ``(n, log2 zeta_n)``.

    ``slope`` is in bits per iteration; ``slope_per_time`` divides it by the
    sample period when the model has one.
    """

    slope: float
    intercept: float
    window: tuple
    r_squared: float
    n_points: int
    slope_per_time: Optional[float] = None


@dataclass(frozen=True)
class IntervalCheck:
    step: int
    pair: tuple
    radius: float
    interval_a: tuple
    interval_b: tuple
    intersects: bool


def half_distance(a, b) -> np.ndarray:
    """``|a - b| / 2`` element-wise, never below the exact half-distance.

    The difference is formed in binary64 and its rounding error recovered
    with the TwoSum construction; when the rounded difference fell short of
    the exact one it is bumped up by one ulp.  Halving is exact except in the
    subnormal range, which is handled the same way.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    hi = np.maximum(a, b)
    lo = np.minimum(a, b)
    with np.errstate(invalid="ignore"):
        d = hi - lo
        # TwoSum of hi and -lo: d + err == hi - lo exactly
        bv = d - hi
        err = (hi - (d - bv)) + (-lo - bv)
        d = np.where(err > 0, np.nextafter(d, np.inf), d)
        h = d * 0.5
        h = np.where(h * 2.0 < d, np.nextafter(h, np.inf), h)
    return h


def _series_from_matrix(values: np.ndarray) -> ErrorSeries:
    k, m = values.shape
    pairs = list(itertools.combinations(range(k), 2))
    dist = np.vstack([half_distance(values[i], values[j]) for i, j in pairs])
    valid = np.all(np.isfinite(values), axis=0)
    # argmax returns the first maximum, and pairs are in lexicographic order
    best = np.argmax(np.where(valid, dist, 0.0), axis=0)
    zeta = dist[best, np.arange(m)]
    chosen = np.asarray(pairs, dtype=int)[best]
    zeta = np.where(valid, zeta, np.nan)
    chosen[~valid] = -1
    return ErrorSeries(zeta=zeta, pairs=chosen, valid=valid)


def lbe_series(ens) -> ErrorSeries:
    """Lower bound error ``zeta_n`` over all pairs of pseudo-orbits.

    Parameters
    ----------
    ens : PseudoOrbitEnsemble or array-like of shape (k, N + 1)

    Raises
    ------
    ValueError
        If fewer than two orbits are given.
    """
    values = np.asarray(getattr(ens, "values", ens), dtype=float)
    if values.ndim != 2 or values.shape[0] < 2:
        raise ValueError("lower bound error needs at least two pseudo-orbits")
    return _series_from_matrix(values)


def two_orbit_lbe(a, b) -> ErrorSeries:
    """Lower bound error of a single pair of pseudo-orbits."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"orbit lengths differ: {a.shape} vs {b.shape}")
    valid = np.isfinite(a) & np.isfinite(b)
    zeta = np.where(valid, half_distance(a, b), np.nan)
    pairs = np.zeros((len(a), 2), dtype=int)
    pairs[:, 1] = 1
    pairs[~valid] = -1
    return ErrorSeries(zeta=zeta, pairs=pairs, valid=valid)


def interval_check(ens, series: ErrorSeries, n: int, radius: float) -> IntervalCheck:
    """Centre closed intervals of ``radius`` on the argmax pair at step ``n``.

    Endpoints are reported in binary64; the intersection test itself is done
    in exact rational arithmetic so it reflects the real intervals.
    """
    values = np.asarray(getattr(ens, "values", ens), dtype=float)
    i, j = (int(v) for v in series.pairs[n])
    if i < 0:
        raise ValueError(f"step {n} is not valid")
    xa, xb = float(values[i, n]), float(values[j, n])
    r = float(radius)
    intersects = abs(Fraction(xa) - Fraction(xb)) <= 2 * Fraction(r)
    return IntervalCheck(
        step=n,
        pair=(i, j),
        radius=r,
        interval_a=(xa - r, xa + r),
        interval_b=(xb - r, xb + r),
        intersects=bool(intersects),
    )


def log2_series(series: ErrorSeries) -> tuple[np.ndarray, np.ndarray]:
    """Steps and ``log2 zeta_n`` for valid steps with ``zeta_n > 0``."""
    mask = series.valid & (np.nan_to_num(series.zeta) > 0)
    steps = series.steps[mask]
    return steps, np.log2(series.zeta[mask])


def _amplitude(ens) -> float:
    if np.ndim(ens) == 0 and not hasattr(ens, "values"):
        return float(ens)
    row = np.asarray(getattr(ens, "values", ens), dtype=float)
    row = row[0] if row.ndim == 2 else row
    row = row[np.isfinite(row)]
    return float(row.max() - row.min()) if row.size else 0.0


def select_fit_window(
    series: ErrorSeries,
    ens,
    sat_fraction: float = 0.01,
    floor: float = 0.0,
) -> tuple[int, int]:
    """Pick the log-linear growth region of ``series``.

    The window opens at the first valid step with ``zeta_n > floor`` and closes
    just before ``zeta_n`` first reaches ``sat_fraction`` times the range of
    orbit row 0.  ``ens`` may also be given directly as that range.

    Raises
    ------
    WindowTooSmallError
        If the window spans fewer than five steps.
    """
    zeta = np.where(series.valid, series.zeta, np.nan)
    with np.errstate(invalid="ignore"):
        above = np.flatnonzero(zeta > floor)
    if above.size == 0:
        raise WindowTooSmallError("lower bound error never exceeds the floor")
    start = int(above[0])
    threshold = sat_fraction * _amplitude(ens)
    with np.errstate(invalid="ignore"):
        saturated = np.flatnonzero(zeta[start:] >= threshold)
    if saturated.size:
        end = start + int(saturated[0]) - 1
    else:
        end = int(np.flatnonzero(series.valid)[-1])
    if end - start < 4:
        raise WindowTooSmallError(
            f"fit window [{start}, {end}] is shorter than 5 steps"
        )
    return start, end


def fit_lyapunov(
    points: tuple[Sequence[int], Sequence[float]],
    window: tuple[int, int],
    ts: Optional[float] = None,
) -> LyapunovFit:
    """Ordinary least squares through the ``(n, log2 zeta_n)`` points in window.

    Raises
    ------
    InsufficientPointsError
        With fewer than five points inside the window.
    """
    steps, logs = (np.asarray(p, dtype=float) for p in points)
    lo, hi = window
    mask = (steps >= lo) & (steps <= hi)
    x, y = steps[mask], logs[mask]
    if x.size < 5:
        raise InsufficientPointsError(
            f"{x.size} points in window [{lo}, {hi}], need at least 5"
        )
    res = stats.linregress(x, y)
    slope = float(res.slope)
    return LyapunovFit(
        slope=slope,
        intercept=float(res.intercept),
        window=(int(lo), int(hi)),
        r_squared=float(res.rvalue**2),
        n_points=int(x.size),
        slope_per_time=slope / ts if ts else None,
    )
