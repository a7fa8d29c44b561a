"""scikit-learn style wrappers around the simulation and fitting steps.

The orbit matrix is laid out the scikit-learn way, shape
``(n_steps + 1, k)``: one sample per time step, one feature per extension.

>>> from sklearn.pipeline import make_pipeline
>>> from narmax_lbe.cases import sine_map_case
>>> pipe = make_pipeline(PseudoOrbitSimulator(sine_map_case().model),
...                      LyapunovFromLowerBound())
>>> est = pipe.fit(None)[-1]
>>> round(est.lyapunov_exponent_, 2)
1.12
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .lbe import fit_lyapunov, lbe_series, log2_series, select_fit_window
from .simulate import simulate_ensemble

__all__ = ["PseudoOrbitSimulator", "LowerBoundError", "LyapunovFromLowerBound"]


def _check_orbits(X):
    X = check_array(X, dtype=np.float64, ensure_all_finite="allow-nan",
                    ensure_min_samples=1, ensure_min_features=2)
    return X


class PseudoOrbitSimulator(TransformerMixin, BaseEstimator):
    """Generate the pseudo-orbit matrix of a model.

    ``X`` is ignored; it only exists so the simulator can head a pipeline.

    Parameters
    ----------
    model : NarmaxModel
    n_steps : int, default=None
        Defaults to the model's own ``n_steps`` (or 100).
    pow_mode : {"libm", "repeated"}, default=None
        Defaults to the model's setting.
    n_jobs : int, default=None
        Threads used to simulate rows; output is identical for any value.

    Attributes
    ----------
    ensemble_ : PseudoOrbitEnsemble
    """

    def __init__(self, model=None, n_steps=None, pow_mode=None, n_jobs=None):
        self.model = model
        self.n_steps = n_steps
        self.pow_mode = pow_mode
        self.n_jobs = n_jobs

    def fit(self, X=None, y=None):
        if self.model is None:
            raise ValueError("PseudoOrbitSimulator needs a model")
        self.ensemble_ = simulate_ensemble(
            self.model, n_steps=self.n_steps, pow_mode=self.pow_mode,
            n_jobs=self.n_jobs,
        )
        self.n_features_out_ = self.ensemble_.k
        return self

    def transform(self, X=None):
        check_is_fitted(self, "ensemble_")
        return self.ensemble_.values.T.copy()

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "ensemble_")
        return np.asarray(self.ensemble_.labels, dtype=object)


class LowerBoundError(TransformerMixin, BaseEstimator):
    """Stateless transform from an orbit matrix to the lower bound error column."""

    def fit(self, X, y=None):
        X = _check_orbits(X)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        X = _check_orbits(X)
        return lbe_series(X.T).zeta.reshape(-1, 1)

    def get_feature_names_out(self, input_features=None):
        return np.asarray(["zeta"], dtype=object)


class LyapunovFromLowerBound(RegressorMixin, BaseEstimator):
    """Fit the growth rate of the lower bound error of an orbit matrix.

    Parameters
    ----------
    sat_fraction : float, default=0.01
        Saturation level as a fraction of the range of the first orbit.
    floor : float, default=0.0
        The window opens at the first step whose error exceeds this.
    fit_start, fit_end : int, default=None
        Override either end of the automatic window.
    ts : float, default=None
        Sample period; when set, ``lyapunov_exponent_per_time_`` is filled.

    Attributes
    ----------
    series_ : ErrorSeries
    window_ : tuple of int
    fit_ : LyapunovFit
    lyapunov_exponent_ : float
        Bits per iteration.
    lyapunov_exponent_per_time_ : float or None
    intercept_ : float
    """

    def __init__(self, sat_fraction=0.01, floor=0.0, fit_start=None,
                 fit_end=None, ts=None):
        self.sat_fraction = sat_fraction
        self.floor = floor
        self.fit_start = fit_start
        self.fit_end = fit_end
        self.ts = ts

    def fit(self, X, y=None):
        X = _check_orbits(X)
        self.n_features_in_ = X.shape[1]
        orbits = X.T
        self.series_ = lbe_series(orbits)
        start, end = self.fit_start, self.fit_end
        if start is None or end is None:
            auto = select_fit_window(self.series_, orbits, self.sat_fraction, self.floor)
            start = auto[0] if start is None else start
            end = auto[1] if end is None else end
        self.window_ = (int(start), int(end))
        self.fit_ = fit_lyapunov(log2_series(self.series_), self.window_, ts=self.ts)
        self.lyapunov_exponent_ = self.fit_.slope
        self.lyapunov_exponent_per_time_ = self.fit_.slope_per_time
        self.intercept_ = self.fit_.intercept
        return self

    def predict(self, X):
        """Fitted ``log2 zeta`` at the step numbers in ``X``."""
        check_is_fitted(self, "fit_")
        steps = np.asarray(X, dtype=float).reshape(-1)
        return self.lyapunov_exponent_ * steps + self.intercept_
