"""End-to-end analysis of one model: simulate, measure, fit, report."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Optional

from .lbe import (
    ErrorSeries,
    LyapunovFit,
    WindowTooSmallError,
    fit_lyapunov,
    lbe_series,
    log2_series,
    select_fit_window,
)
from .simulate import NarmaxModel, PseudoOrbitEnsemble, simulate_ensemble

__all__ = ["RunReport", "RunResult", "analyze", "series_csv", "format_report"]


@dataclass
class RunReport:
    model_name: str
    k: int
    n_steps: int
    pow_mode: str
    csv_path: Optional[str]
    window: tuple
    slope: float
    slope_per_time: Optional[float]
    r_squared: float
    n_points: int
    warnings: list = field(default_factory=list)


@dataclass
class RunResult:
    model: NarmaxModel
    ensemble: PseudoOrbitEnsemble
    series: ErrorSeries
    fit: LyapunovFit
    report: RunReport


def analyze(
    model: NarmaxModel,
    n_steps: Optional[int] = None,
    pow_mode: Optional[str] = None,
    fit_start: Optional[int] = None,
    fit_end: Optional[int] = None,
    sat_fraction: float = 0.01,
    floor: float = 0.0,
    n_jobs: Optional[int] = None,
) -> RunResult:
    """Simulate every extension, compute the lower bound error and fit its slope.

    ``fit_start`` / ``fit_end`` override either end of the automatic window.

    Raises
    ------
    WindowTooSmallError, InsufficientPointsError
        When no usable growth region exists.
    """
    if model.validate:
        model.check_equivalence()
    ens = simulate_ensemble(model, n_steps=n_steps, pow_mode=pow_mode, n_jobs=n_jobs)
    series = lbe_series(ens)
    if fit_start is None or fit_end is None:
        auto = select_fit_window(series, ens, sat_fraction=sat_fraction, floor=floor)
        window = (
            auto[0] if fit_start is None else fit_start,
            auto[1] if fit_end is None else fit_end,
        )
    else:
        window = (fit_start, fit_end)
    if window[1] - window[0] < 4:
        raise WindowTooSmallError(f"fit window {list(window)} is shorter than 5 steps")
    ts = model.input.ts if model.input.kind == "cosine" else None
    fit = fit_lyapunov(log2_series(series), window, ts=ts)

    warnings = list(model.assumptions)
    for label, step in zip(ens.labels, ens.diverged_at):
        if step is not None:
            warnings.append(f"extension {label} diverged at step {step}")
    report = RunReport(
        model_name=model.name,
        k=ens.k,
        n_steps=ens.n_steps,
        pow_mode=pow_mode or model.pow_mode,
        csv_path=None,
        window=fit.window,
        slope=fit.slope,
        slope_per_time=fit.slope_per_time,
        r_squared=fit.r_squared,
        n_points=fit.n_points,
        warnings=warnings,
    )
    return RunResult(model, ens, series, fit, report)


def _num(v) -> str:
    # repr() is the shortest string that round-trips a binary64
    return "" if v != v else repr(float(v))


def series_csv(series: ErrorSeries, ens: PseudoOrbitEnsemble, per_orbit=False) -> str:
    """CSV text with ``n, zeta, log2_zeta, argmax_i, argmax_j`` per step.

    ``per_orbit`` appends one column per pseudo-orbit.  ``log2_zeta`` is empty
    where ``zeta`` is zero; invalid steps leave ``zeta`` and the pair empty.
    """
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = ["n", "zeta", "log2_zeta", "argmax_i", "argmax_j"]
    if per_orbit:
        header += [f"x_{i}" for i in range(ens.k)]
    w.writerow(header)
    for n in range(len(series)):
        z = float(series.zeta[n])
        if series.valid[n]:
            row = [
                str(n),
                _num(z),
                _num(math.log2(z)) if z > 0 else "",
                str(int(series.pairs[n, 0])),
                str(int(series.pairs[n, 1])),
            ]
        else:
            row = [str(n), "", "", "", ""]
        if per_orbit:
            row += [_num(v) for v in ens.values[:, n]]
        w.writerow(row)
    return buf.getvalue()


def format_report(report: RunReport) -> str:
    lines = [
        f"model:            {report.model_name}",
        f"extensions (k):   {report.k}",
        f"steps (N):        {report.n_steps}",
        f"pow_mode:         {report.pow_mode}",
        f"csv:              {report.csv_path or '-'}",
        f"fit window:       [{report.window[0]}, {report.window[1]}] "
        f"({report.n_points} points)",
        f"lambda:           {report.slope:.6f} bits/iteration",
    ]
    if report.slope_per_time is not None:
        lines.append(f"lambda / Ts:      {report.slope_per_time:.6f} bits/time unit")
    lines.append(f"r^2:              {report.r_squared:.6f}")
    for w in report.warnings:
        lines.append(f"WARNING: {w}")
    return "\n".join(lines)
