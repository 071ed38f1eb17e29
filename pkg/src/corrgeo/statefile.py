"""
JSON state files.

Two layouts are accepted::

    {"dims": [2, 2], "matrix": {"re": [[...]], "im": [[...]]}}
    {"family": "bell_diagonal", "params": [0.7, 0.1, 0.1, 0.1]}

Families: ``bell_diagonal`` (four weights), ``w``, ``cluster4`` (no
parameters) and ``mid_counterexample`` (``q`` followed by four weights).
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import states
from .errors import CorrGeoError, DimensionMismatch, InvalidDistribution
from .states import MultipartiteState

FAMILIES = ("bell_diagonal", "w", "cluster4", "mid_counterexample")


def _bell_params(values: dict) -> list[float]:
    if "lambda" in values:
        return [float(v) for v in values["lambda"]]
    keys = [k for k in ("lambda1", "lambda2", "lambda3", "lambda4") if k in values]
    if keys == ["lambda1"]:
        l1 = float(values["lambda1"])
        return [l1] + [(1.0 - l1) / 3.0] * 3
    if keys == ["lambda1", "lambda2", "lambda3"]:
        lam = [float(values[k]) for k in keys]
        return lam + [1.0 - sum(lam)]
    if len(keys) == 4:
        return [float(values[k]) for k in keys]
    raise InvalidDistribution(f"bell_diagonal needs lambda1, lambda1..3 or lambda1..4; got {sorted(values)}")


def _mid_params(values: dict) -> tuple[float, list[float]]:
    if "q" not in values:
        raise InvalidDistribution("mid_counterexample needs 'q'")
    q = float(values["q"])
    if "p" in values:
        p = [float(v) for v in values["p"]]
    elif all(k in values for k in ("p00", "p01", "p10")):
        p = [float(values[k]) for k in ("p00", "p01", "p10")]
        p.append(float(values["p11"]) if "p11" in values else 1.0 - sum(p))
    else:
        p = [0.25] * 4
    return q, p


def build_family(name: str, point: dict | None = None, fixed: dict | None = None) -> MultipartiteState:
    """Construct a named family member from named parameters."""
    values = dict(fixed or {})
    values.update(point or {})
    if name == "bell_diagonal":
        return states.bell_diagonal(_bell_params(values))
    if name == "w":
        return states.w_state()
    if name == "cluster4":
        return states.cluster_state_4()
    if name == "mid_counterexample":
        q, p = _mid_params(values)
        return states.mid_counterexample(q, p)
    raise CorrGeoError(f"unknown family {name!r}; choose from {', '.join(FAMILIES)}")


def _family_from_list(name: str, params: list) -> MultipartiteState:
    params = [float(v) for v in params]
    if name == "bell_diagonal":
        return states.bell_diagonal(params)
    if name in ("w", "cluster4"):
        if params:
            raise InvalidDistribution(f"family {name!r} takes no parameters")
        return build_family(name)
    if name == "mid_counterexample":
        if len(params) != 5:
            raise InvalidDistribution("mid_counterexample params are [q, p00, p01, p10, p11]")
        return states.mid_counterexample(params[0], params[1:])
    raise CorrGeoError(f"unknown family {name!r}; choose from {', '.join(FAMILIES)}")


def state_from_dict(d: dict) -> MultipartiteState:
    if not isinstance(d, dict):
        raise CorrGeoError("state file must hold a JSON object")
    if "family" in d:
        return _family_from_list(str(d["family"]), d.get("params") or [])
    if "dims" not in d or "matrix" not in d:
        raise CorrGeoError("state file needs either 'family' or both 'dims' and 'matrix'")
    m = d["matrix"]
    try:
        re = np.asarray(m["re"], dtype=float)
        im = np.asarray(m.get("im", np.zeros_like(re)), dtype=float)
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise CorrGeoError(f"bad matrix block: {exc}") from None
    if re.shape != im.shape:
        raise DimensionMismatch(f"re has shape {re.shape} but im has {im.shape}")
    return states.validate(d["dims"], re + 1j * im)


def state_to_dict(x: MultipartiteState) -> dict:
    return {"dims": list(x.dims), "matrix": {"re": x.rho.real.tolist(), "im": x.rho.imag.tolist()}}


def load_state(path) -> MultipartiteState:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CorrGeoError(f"cannot read {path}: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorrGeoError(f"{path} is not valid JSON: {exc}") from None
    return state_from_dict(data)


def dump_state(x: MultipartiteState, path) -> None:
    Path(path).write_text(json.dumps(state_to_dict(x)), encoding="utf-8")
