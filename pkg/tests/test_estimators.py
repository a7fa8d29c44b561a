import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline

from narmax_lbe.cases import duffing_ueda_case, sine_map_case
from narmax_lbe.estimators import (
    LowerBoundError,
    LyapunovFromLowerBound,
    PseudoOrbitSimulator,
)
from narmax_lbe.lbe import lbe_series
from narmax_lbe.runner import analyze
from narmax_lbe.simulate import simulate_ensemble


def test_simulator_layout():
    sim = PseudoOrbitSimulator(sine_map_case().model, n_steps=50)
    X = sim.fit_transform(None)
    assert X.shape == (51, 4)
    assert sim.get_feature_names_out().tolist() == ["F", "G", "H", "L"]
    ens = simulate_ensemble(sine_map_case().model, 50)
    assert np.array_equal(X, ens.values.T)


def test_simulator_needs_model_and_fit():
    with pytest.raises(ValueError):
        PseudoOrbitSimulator().fit()
    with pytest.raises(NotFittedError):
        PseudoOrbitSimulator(sine_map_case().model).transform(None)


def test_get_params_and_clone():
    est = LyapunovFromLowerBound(sat_fraction=0.05, ts=0.1)
    assert est.get_params() == {
        "sat_fraction": 0.05, "floor": 0.0, "fit_start": None, "fit_end": None, "ts": 0.1,
    }
    assert clone(est).get_params() == est.get_params()
    sim = PseudoOrbitSimulator(n_steps=10).set_params(pow_mode="repeated")
    assert sim.pow_mode == "repeated"


def test_lower_bound_transform():
    X = np.array([[1.0, 1.2, 1.1], [0.0, 0.0, 0.0]])
    z = LowerBoundError().fit_transform(X)
    assert z.shape == (2, 1)
    assert z[1, 0] == 0.0
    assert z[0, 0] == pytest.approx(0.1)
    with pytest.raises(ValueError):
        LowerBoundError().fit_transform(np.ones((3, 1)))


@pytest.mark.parametrize("factory", [sine_map_case, duffing_ueda_case])
def test_pipeline_matches_functional_api(factory):
    model = factory().model
    ts = model.input.ts
    pipe = make_pipeline(PseudoOrbitSimulator(model), LyapunovFromLowerBound(ts=ts))
    est = pipe.fit(None)[-1]
    ref = analyze(model)
    assert est.lyapunov_exponent_ == ref.fit.slope
    assert est.window_ == ref.fit.window
    assert est.lyapunov_exponent_per_time_ == ref.fit.slope_per_time


def test_predict_line():
    n = np.arange(60)
    a = np.zeros(60)
    a[-1] = 100.0  # range of the first orbit sets the saturation level
    b = a + np.where(n > 0, 2.0 ** (0.5 * n - 39), 0.0)
    est = LyapunovFromLowerBound(fit_start=2, fit_end=30).fit(np.column_stack([a, b]))
    assert abs(est.lyapunov_exponent_ - 0.5) < 1e-12
    assert est.predict([10]) == pytest.approx([0.5 * 10 - 40])


def test_series_attribute_matches():
    X = simulate_ensemble(sine_map_case().model).values.T
    est = LyapunovFromLowerBound().fit(X)
    assert est.series_.zeta.tobytes() == lbe_series(X.T).zeta.tobytes()
