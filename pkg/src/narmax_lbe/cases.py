"""Built-in case studies: an identified sine map and a Duffing-Ueda model."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .simulate import InputSignal, NarmaxModel

__all__ = [
    "CaseStudy",
    "sine_map_case",
    "duffing_ueda_case",
    "get_case",
    "CASES",
    "SINE_EXTENSIONS",
    "DUFFING_EXTENSIONS",
    "DUFFING_DEFAULT_AMPLITUDE",
]

# y_{n+1} = 2.6868 y_n - 0.2462 y_n^3, written with the output at step n.
SINE_EXTENSIONS = {
    "F": "2.6868*y(n-1) - 0.2462*y(n-1)^3",
    "G": "2.6868*y(n-1) - (0.2462*y(n-1))*y(n-1)^2",
    "H": "2.6868*y(n-1) - 0.2462*y(n-1)*y(n-1)*y(n-1)",
    "L": "y(n-1)*(2.6868 - 0.2462*y(n-1)*y(n-1))",
}

DUFFING_EXTENSIONS = {
    "F": (
        "2.1579*y(n-1) - 1.3203*y(n-2) + 0.16239*y(n-3)"
        " + 0.0003416*u(n-1) + 0.001963*u(n-2)"
        " - 0.0048196*y(n-1)^3 + 0.003523*y(n-1)^2*y(n-2)"
        " - 0.0012162*y(n-1)*y(n-2)*y(n-3) + 0.0002248*y(n-3)^3"
    ),
    "G": (
        "0.0003416*u(n-1) + 0.001963*u(n-2)"
        " + 2.1579*y(n-1) - 1.3203*y(n-2) + 0.16239*y(n-3)"
        " - 0.0048196*y(n-1)^3 + 0.003523*y(n-1)^2*y(n-2)"
        " - 0.0012162*y(n-1)*y(n-2)*y(n-3) + 0.0002248*y(n-3)^3"
    ),
    "H": (
        "0.0003416*u(n-1) + 0.001963*u(n-2)"
        " + 2.1579*y(n-1) - 1.3203*y(n-2) + 0.16239*y(n-3)"
        " - 0.0048196*y(n-1)^3 + 0.003523*y(n-1)^2*y(n-2)"
        " - 0.0012162*y(n-1)*y(n-2)*y(n-3) + 0.0002248*y(n-3)*y(n-3)*y(n-3)"
    ),
    "L": (
        "2.1579*y(n-1) - 1.3203*y(n-2) + 0.16239*y(n-3)"
        " + 0.0003416*u(n-1) + 0.001963*u(n-2)"
        " - 0.0048196*y(n-1)*y(n-1)*y(n-1) + 0.003523*y(n-1)^2*y(n-2)"
        " - 0.0012162*y(n-1)*y(n-2)*y(n-3) + 0.0002248*y(n-3)^3"
    ),
}

DUFFING_DEFAULT_AMPLITUDE = 11.0
DUFFING_TS_TEXT = "pi/60"


@dataclass(frozen=True)
class CaseStudy:
    id: str
    model: NarmaxModel
    expected_lambda: float
    tolerance: float
    citation: str


def sine_map_case() -> CaseStudy:
    model = NarmaxModel.from_texts(
        "sine-map",
        list(SINE_EXTENSIONS.values()),
        initial=[0.1],
        labels=tuple(SINE_EXTENSIONS),
        n_steps=100,
    )
    return CaseStudy(
        id="sine",
        model=model,
        expected_lambda=1.15,
        tolerance=0.15,
        citation=(
            "Identified polynomial model of x[n+1] = 1.2*pi*sin(x[n]); "
            "reference Lyapunov exponent 1.15 bits per iteration."
        ),
    )


def duffing_ueda_case(amplitude=None, initial=None) -> CaseStudy:
    """Duffing-Ueda NARMAX model driven by ``u_n = A cos(n pi/60)``.

    Neither the drive amplitude nor the initial lags come with the identified
    model.  Defaults are ``A = 11`` and zero lags; any value left at its
    default is recorded in ``model.assumptions``.
    """
    assumptions = []
    if amplitude is None:
        amplitude = DUFFING_DEFAULT_AMPLITUDE
        assumptions.append(f"input amplitude A={amplitude:g} is an assumed default")
    elif float(amplitude) != DUFFING_DEFAULT_AMPLITUDE:
        assumptions.append(
            f"input amplitude A={amplitude:g} deviates from the default "
            f"A={DUFFING_DEFAULT_AMPLITUDE:g}"
        )
    if initial is None:
        initial = (0.0, 0.0, 0.0)
        assumptions.append("initial lags y=[0, 0, 0] are assumed defaults")
    elif any(float(v) != 0.0 for v in initial):
        assumptions.append(
            f"initial lags y={list(initial)} deviate from the default [0, 0, 0]"
        )
    model = NarmaxModel.from_texts(
        "duffing-ueda",
        list(DUFFING_EXTENSIONS.values()),
        initial=initial,
        input=InputSignal(
            kind="cosine",
            amplitude=float(amplitude),
            ts=math.pi / 60,
            ts_text=DUFFING_TS_TEXT,
        ),
        labels=tuple(DUFFING_EXTENSIONS),
        n_steps=1000,
        assumptions=tuple(assumptions),
    )
    return CaseStudy(
        id="duffing",
        model=model,
        expected_lambda=0.1202,
        tolerance=0.03,
        citation=(
            "Identified polynomial model of the forced Duffing-Ueda oscillator "
            "y'' + k y' + mu y^3 = A cos(t), Ts = pi/60; reference exponent 0.1202."
        ),
    )


CASES = {"sine": sine_map_case, "duffing": duffing_ueda_case}


def get_case(case_id: str) -> CaseStudy:
    try:
        return CASES[case_id]()
    except KeyError:
        raise ValueError(
            f"unknown case {case_id!r}; choose from {sorted(CASES)}"
        ) from None
