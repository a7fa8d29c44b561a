"""Rounding-error lower bounds for free-run NARMAX simulation.

Algebraically equivalent orderings of one polynomial model are iterated in
binary64; half their largest pairwise spread is a lower bound on the error of
at least one of them, and its growth rate estimates the largest Lyapunov
exponent.
"""

from .cases import CaseStudy, duffing_ueda_case, get_case, sine_map_case
from .estimators import LowerBoundError, LyapunovFromLowerBound, PseudoOrbitSimulator
from .expr import (
    CanonicalPolynomial,
    check_equivalence,
    evaluate_strict,
    expand_canonical,
    format_expression,
    parse_expression,
)
from .lbe import (
    ErrorSeries,
    IntervalCheck,
    LyapunovFit,
    fit_lyapunov,
    interval_check,
    lbe_series,
    log2_series,
    select_fit_window,
    two_orbit_lbe,
)
from .modelfile import load_model, save_model
from .runner import analyze
from .simulate import (
    InputSignal,
    NarmaxModel,
    PseudoOrbitEnsemble,
    build_input,
    simulate_ensemble,
    simulate_orbit,
)

__version__ = "0.1.0"
