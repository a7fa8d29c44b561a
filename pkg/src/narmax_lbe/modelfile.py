"""YAML model files.

Schema::

    name: sine-map                 # str, required
    extensions:                    # list of expression strings, k >= 2
      - "2.6868*y(n-1) - 0.2462*y(n-1)^3"
      - "y(n-1)*(2.6868 - 0.2462*y(n-1)*y(n-1))"
    labels: [F, L]                 # optional, one per extension
    initial: [0.1]                 # n_y decimals, oldest first
    input:                         # optional, defaults to kind: none
      kind: cosine                 # none | cosine | samples
      amplitude: 11.0
      ts: pi/60                    # number or product/quotient of numbers and pi
      samples: [...]               # kind: samples only
    n_y: 1                         # optional, checked against the expressions
    n_u: 0                         # optional, checked against the expressions
    pow_mode: libm                 # libm | repeated
    n_steps: 100                   # optional default run length
    assumptions: []                # optional notes carried into run reports
    validate: true                 # set false to skip the equivalence gate
"""

from __future__ import annotations

import math
import re
from pathlib import Path

import yaml

from .simulate import InputSignal, NarmaxModel

__all__ = [
    "ModelFileError",
    "parse_scalar",
    "model_to_dict",
    "model_from_dict",
    "load_model",
    "dump_model",
    "save_model",
]

_KNOWN_KEYS = {
    "name", "extensions", "labels", "initial", "input", "n_y", "n_u",
    "pow_mode", "n_steps", "assumptions", "validate",
}
_SCALAR_TOKEN = re.compile(r"\s*(pi|[0-9.]+(?:[eE][+-]?\d+)?|[*/])")


class ModelFileError(ValueError):
    pass


def parse_scalar(value) -> float:
    """Read a number or a ``*``/``/`` chain of numbers and ``pi``.

    Operations run left to right in binary64, so ``"pi/60"`` gives exactly
    ``math.pi / 60``.
    """
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    text = str(value).strip()
    pos, tokens = 0, []
    while pos < len(text):
        m = _SCALAR_TOKEN.match(text, pos)
        if not m:
            raise ModelFileError(f"cannot read scalar {text!r}")
        tokens.append(m.group(1))
        pos = m.end()
    if not tokens or len(tokens) % 2 == 0:
        raise ModelFileError(f"cannot read scalar {text!r}")

    def atom(tok):
        if tok == "pi":
            return math.pi
        try:
            return float(tok)
        except ValueError:
            raise ModelFileError(f"cannot read scalar {text!r}") from None

    acc = atom(tokens[0])
    for op, tok in zip(tokens[1::2], tokens[2::2]):
        if op not in "*/":
            raise ModelFileError(f"cannot read scalar {text!r}")
        acc = acc * atom(tok) if op == "*" else acc / atom(tok)
    return acc


def model_to_dict(model: NarmaxModel) -> dict:
    sig = model.input
    inp: dict = {"kind": sig.kind}
    if sig.kind == "cosine":
        inp["amplitude"] = float(sig.amplitude)
        inp["ts"] = sig.ts_text if sig.ts_text else float(sig.ts)
    elif sig.kind == "samples":
        inp["samples"] = [float(v) for v in sig.samples]
    out = {
        "name": model.name,
        "extensions": model.texts,
        "labels": list(model.labels),
        "initial": list(model.initial),
        "input": inp,
        "n_y": model.n_y,
        "n_u": model.n_u,
        "pow_mode": model.pow_mode,
    }
    if model.n_steps is not None:
        out["n_steps"] = model.n_steps
    if model.assumptions:
        out["assumptions"] = list(model.assumptions)
    if not model.validate:
        out["validate"] = False
    return out


def model_from_dict(data: dict) -> NarmaxModel:
    """Build a model from a parsed document; see the module docstring."""
    if not isinstance(data, dict):
        raise ModelFileError("model file must be a mapping")
    unknown = set(data) - _KNOWN_KEYS
    if unknown:
        raise ModelFileError(f"unknown fields: {sorted(unknown)}")
    for key in ("name", "extensions", "initial"):
        if key not in data:
            raise ModelFileError(f"missing required field {key!r}")
    exts = data["extensions"]
    if not isinstance(exts, list) or not all(isinstance(t, str) for t in exts):
        raise ModelFileError("extensions must be a list of strings")

    inp = data.get("input") or {"kind": "none"}
    kind = inp.get("kind", "none")
    if kind == "cosine":
        for key in ("amplitude", "ts"):
            if key not in inp:
                raise ModelFileError(f"cosine input requires {key}")
        ts_raw = inp["ts"]
        signal = InputSignal(
            kind="cosine",
            amplitude=parse_scalar(inp["amplitude"]),
            ts=parse_scalar(ts_raw),
            ts_text=ts_raw if isinstance(ts_raw, str) else None,
        )
    elif kind == "samples":
        signal = InputSignal(
            kind="samples",
            samples=tuple(parse_scalar(v) for v in inp.get("samples", [])),
        )
    elif kind == "none":
        signal = InputSignal()
    else:
        raise ModelFileError(f"unknown input kind {kind!r}")

    model = NarmaxModel.from_texts(
        str(data["name"]),
        exts,
        initial=[parse_scalar(v) for v in data["initial"]],
        input=signal,
        pow_mode=data.get("pow_mode", "libm"),
        labels=tuple(data.get("labels") or ()),
        n_steps=data.get("n_steps"),
        assumptions=tuple(data.get("assumptions") or ()),
        validate=bool(data.get("validate", True)),
    )
    for key in ("n_y", "n_u"):
        if key in data and data[key] != getattr(model, key):
            raise ModelFileError(
                f"{key}={data[key]} disagrees with the expressions "
                f"({getattr(model, key)})"
            )
    return model


def dump_model(model: NarmaxModel) -> str:
    return yaml.safe_dump(model_to_dict(model), sort_keys=False, width=1000)


def load_model(path) -> NarmaxModel:
    """Read a YAML model file.

    Raises
    ------
    OSError
        When the file cannot be read.
    ModelFileError
        On malformed YAML or schema violations.
    """
    text = Path(path).read_text()
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ModelFileError(f"{path}: {exc}") from exc
    return model_from_dict(data)


def save_model(model: NarmaxModel, path) -> None:
    Path(path).write_text(dump_model(model))
