import itertools
import math
from fractions import Fraction

import pytest

from narmax_lbe.cases import duffing_ueda_case, get_case, sine_map_case
from narmax_lbe.expr import check_equivalence, expand_canonical


def _mono(*factors):
    return tuple(sorted(factors))


def test_sine_case_contents():
    case = sine_map_case()
    m = case.model
    assert m.k == 4
    assert m.labels == ("F", "G", "H", "L")
    assert m.initial == (0.1,)
    assert m.input.kind == "none"
    assert m.n_steps == 100
    assert (case.expected_lambda, case.tolerance) == (1.15, 0.15)
    for a, b in itertools.combinations(m.extensions, 2):
        assert check_equivalence(a, b)


def test_sine_canonical_terms():
    poly = expand_canonical(sine_map_case().model.extensions[0])
    assert poly.terms == {
        _mono((("y", 1), 1)): Fraction("2.6868"),
        _mono((("y", 1), 3)): Fraction("-0.2462"),
    }


def test_duffing_case_contents():
    case = duffing_ueda_case()
    m = case.model
    assert m.k == 4
    assert m.input.kind == "cosine"
    assert m.input.ts == math.pi / 60
    assert m.input.ts_text == "pi/60"
    assert m.input.amplitude == 11.0
    assert m.initial == (0.0, 0.0, 0.0)
    assert (m.n_y, m.n_u) == (3, 2)
    assert m.n_steps == 1000
    assert (case.expected_lambda, case.tolerance) == (0.1202, 0.03)
    assert any("A=11" in a for a in m.assumptions)
    assert any("initial lags" in a for a in m.assumptions)
    for a, b in itertools.combinations(m.extensions, 2):
        assert check_equivalence(a, b)


def test_duffing_canonical_terms():
    y1, y2, y3 = ("y", 1), ("y", 2), ("y", 3)
    expected = {
        _mono((y1, 1)): "2.1579",
        _mono((y2, 1)): "-1.3203",
        _mono((y3, 1)): "0.16239",
        _mono((("u", 1), 1)): "0.0003416",
        _mono((("u", 2), 1)): "0.001963",
        _mono((y1, 3)): "-0.0048196",
        _mono((y1, 2), (y2, 1)): "0.003523",
        _mono((y1, 1), (y2, 1), (y3, 1)): "-0.0012162",
        _mono((y3, 3)): "0.0002248",
    }
    for e in duffing_ueda_case().model.extensions:
        poly = expand_canonical(e)
        assert len(poly) == 9
        assert poly.terms == {k: Fraction(v) for k, v in expected.items()}


def test_duffing_overrides_are_reported():
    m = duffing_ueda_case(amplitude=7.5, initial=[0.1, 0.0, 0.0]).model
    assert m.input.amplitude == 7.5
    assert any("deviates" in a and "7.5" in a for a in m.assumptions)
    assert any("deviate" in a and "initial" in a for a in m.assumptions)


def test_get_case():
    assert get_case("sine").id == "sine"
    with pytest.raises(ValueError):
        get_case("lorenz")
