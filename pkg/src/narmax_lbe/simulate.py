"""Free-run simulation of polynomial NARMAX extensions.

Every extension of a model is iterated on its own past outputs from the same
initial lags and the same input trace.  The resulting rows are the
pseudo-orbits compared by :mod:`narmax_lbe.lbe`.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .expr import (
    POW_MODES,
    Expression,
    EvaluationError,
    check_equivalence,
    compile_expression,
    expand_canonical,
    format_expression,
    max_lags,
    parse_expression,
    variables,
)

__all__ = [
    "InputSignal",
    "NarmaxModel",
    "PseudoOrbitEnsemble",
    "EquivalenceError",
    "build_input",
    "simulate_orbit",
    "simulate_ensemble",
]


class EquivalenceError(ValueError):
    """Two extensions of one model are not algebraically identical."""

    def __init__(self, i, j, difference):
        self.pair = (i, j)
        self.difference = difference
        super().__init__(
            f"extensions {i} and {j} are not equivalent; "
            f"expanded difference: {difference}"
        )


@dataclass(frozen=True)
class InputSignal:
    """Exogenous input ``u``.

    ``kind="cosine"`` yields ``u_n = amplitude * cos(n * ts)`` where ``n * ts``
    is rounded to binary64 before the cosine.  ``ts_text`` keeps the literal
    the sample period was read from (e.g. ``"pi/60"``) for export.
    """

    kind: str = "none"
    amplitude: float = 0.0
    ts: Optional[float] = None
    ts_text: Optional[str] = None
    samples: tuple = ()

    def __post_init__(self):
        if self.kind not in ("none", "cosine", "samples"):
            raise ValueError(f"unknown input kind {self.kind!r}")
        if self.kind == "cosine" and self.ts is None:
            raise ValueError("cosine input needs a sample period ts")


def build_input(signal: InputSignal, n_steps: int) -> np.ndarray:
    """Input trace ``u_0 .. u_N`` as a float64 array of length ``N + 1``."""
    if n_steps < 0:
        raise ValueError("n_steps must be >= 0")
    if signal.kind == "none":
        return np.zeros(n_steps + 1)
    if signal.kind == "cosine":
        a, ts = float(signal.amplitude), float(signal.ts)
        return np.array([a * math.cos(n * ts) for n in range(n_steps + 1)])
    if len(signal.samples) < n_steps + 1:
        raise ValueError(
            f"input has {len(signal.samples)} samples, need {n_steps + 1}"
        )
    return np.array(signal.samples[: n_steps + 1], dtype=float)


@dataclass(frozen=True)
class NarmaxModel:
    """A named set of algebraically equivalent extensions of one NARMAX map.

    Parameters
    ----------
    name : str
    extensions : sequence of Expression
        At least two.  Checked pairwise with
        :func:`~narmax_lbe.expr.check_equivalence` unless ``validate=False``.
    initial : sequence of float
        The first ``n_y`` orbit values, oldest first.
    input : InputSignal
    pow_mode : {"libm", "repeated"}
    labels : sequence of str, optional
        Display names for the extensions; defaults to ``x_0 .. x_{k-1}``.
    n_steps : int, optional
        Default simulation length for this model.
    assumptions : sequence of str
        Free-text notes about values that were assumed rather than given.
    """

    name: str
    extensions: tuple
    initial: tuple
    input: InputSignal = field(default_factory=InputSignal)
    pow_mode: str = "libm"
    labels: tuple = ()
    n_steps: Optional[int] = None
    assumptions: tuple = ()
    validate: bool = True

    def __post_init__(self):
        object.__setattr__(self, "extensions", tuple(self.extensions))
        object.__setattr__(self, "initial", tuple(float(v) for v in self.initial))
        object.__setattr__(self, "assumptions", tuple(self.assumptions))
        if not self.labels:
            labels = tuple(f"x_{i}" for i in range(len(self.extensions)))
            object.__setattr__(self, "labels", labels)
        else:
            object.__setattr__(self, "labels", tuple(self.labels))
        if len(self.extensions) < 2:
            raise ValueError("a model needs at least two extensions")
        if len(self.labels) != len(self.extensions):
            raise ValueError("labels and extensions differ in length")
        if self.pow_mode not in POW_MODES:
            raise ValueError(f"pow_mode must be one of {POW_MODES}")
        if len(self.initial) != self.n_y:
            raise ValueError(
                f"expected {self.n_y} initial values, got {len(self.initial)}"
            )
        if self.validate:
            self.check_equivalence()

    @classmethod
    def from_texts(cls, name, texts: Sequence[str], initial, **kwargs):
        return cls(name, tuple(parse_expression(t) for t in texts), initial, **kwargs)

    @property
    def k(self) -> int:
        return len(self.extensions)

    @property
    def n_y(self) -> int:
        return max(max_lags(e)[0] for e in self.extensions)

    @property
    def n_u(self) -> int:
        return max(max_lags(e)[1] for e in self.extensions)

    @property
    def texts(self) -> list[str]:
        return [format_expression(e) for e in self.extensions]

    def check_equivalence(self):
        """Raise :class:`EquivalenceError` for the first non-equivalent pair."""
        for i, j in itertools.combinations(range(self.k), 2):
            a, b = self.extensions[i], self.extensions[j]
            if not check_equivalence(a, b):
                raise EquivalenceError(i, j, expand_canonical(a) - expand_canonical(b))


@dataclass
class PseudoOrbitEnsemble:
    """``k`` pseudo-orbits of length ``N + 1`` sharing initial lags and input.

    Attributes
    ----------
    values : ndarray of shape (k, N + 1)
        Row ``i`` is the pseudo-orbit of extension ``i``.  Entries from the
        divergence step onwards are NaN.
    inputs : ndarray of shape (N + 1,)
    diverged_at : list of int or None
        Step at which each row first produced a non-finite value.
    labels : tuple of str
    """

    values: np.ndarray
    inputs: np.ndarray
    diverged_at: list
    labels: tuple = ()

    @property
    def k(self) -> int:
        return self.values.shape[0]

    @property
    def n_steps(self) -> int:
        return self.values.shape[1] - 1


def simulate_orbit(
    e: Expression,
    initial: Sequence[float],
    inputs: np.ndarray,
    n_steps: int,
    pow_mode: str = "libm",
) -> tuple[np.ndarray, Optional[int]]:
    """Iterate one extension in free run.

    Returns the orbit ``x_0 .. x_N`` and the step at which it diverged (or
    ``None``).  The first ``len(initial)`` entries are the initial lags.
    Input samples before time 0 are taken as zero.
    """
    f = compile_expression(e, pow_mode)
    ny = len(initial)
    keys = sorted(variables(e))
    row = np.full(n_steps + 1, np.nan)
    x = [float(v) for v in initial[: n_steps + 1]]
    u = [float(v) for v in inputs]
    env = {}
    for n in range(ny, n_steps + 1):
        for key in keys:
            stream, lag = key
            if stream == "y":
                env[key] = x[n - lag]
            else:
                env[key] = u[n - lag] if n >= lag else 0.0
        try:
            v = f(env)
        except EvaluationError:
            v = math.nan
        if not math.isfinite(v):
            row[: len(x)] = x
            return row, n
        x.append(v)
    row[:] = x
    return row, None


def simulate_ensemble(
    model: NarmaxModel,
    n_steps: Optional[int] = None,
    pow_mode: Optional[str] = None,
    n_jobs: Optional[int] = None,
) -> PseudoOrbitEnsemble:
    """Simulate every extension of ``model`` for ``n_steps`` steps.

    Rows may be computed on a thread pool (``n_jobs > 1``); each row is a
    sequential recursion so the result is bit-identical either way.
    """
    if n_steps is None:
        n_steps = model.n_steps if model.n_steps is not None else 100
    pow_mode = pow_mode or model.pow_mode
    inputs = build_input(model.input, n_steps)

    def run(e):
        return simulate_orbit(e, model.initial, inputs, n_steps, pow_mode)

    if n_jobs is not None and n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            results = list(pool.map(run, model.extensions))
    else:
        results = [run(e) for e in model.extensions]
    values = np.vstack([r for r, _ in results])
    return PseudoOrbitEnsemble(
        values=values,
        inputs=inputs,
        diverged_at=[d for _, d in results],
        labels=model.labels,
    )
