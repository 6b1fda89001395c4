"""Microtubule decoherence-time estimates and the temperature-scaling dispute.

``tau_tegmark`` grows like sqrt(T); ``tau_rosa_faber`` falls like 1/T.  Both
are always reported side by side; neither is preferred.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields, replace
from functools import lru_cache
from importlib import resources
from typing import Sequence

import yaml

from .constants import SI, Constants

# superposition lifetime band for Na+ "in/out" states across an axon membrane
ION_DECOHERENCE_BAND = (1e-20, 1e-19)
HAGAN_FACTOR = 1e10


def _check_positive(params) -> None:
    bad = [f.name for f in fields(params) if not getattr(params, f.name) > 0]
    if bad:
        raise ValueError(f"{type(params).__name__}: parameters must be strictly positive: {bad}")


@dataclass(frozen=True)
class TegmarkParams:
    D: float
    m: float
    T: float
    N: float
    q: float

    def __post_init__(self):
        _check_positive(self)


@dataclass(frozen=True)
class RosaFaberParams:
    q1: float
    q2: float
    x1: float
    M: float
    T: float

    def __post_init__(self):
        _check_positive(self)


@lru_cache(maxsize=None)
def _defaults_raw() -> dict:
    text = resources.files("ecsteleport").joinpath("data/decoherence_defaults.yaml").read_text()
    return yaml.safe_load(text)


def default_tegmark() -> TegmarkParams:
    raw = {k: v for k, v in _defaults_raw()["tegmark"].items() if k != "notes"}
    return TegmarkParams(**{k: float(v) for k, v in raw.items()})


def default_rosa_faber() -> RosaFaberParams:
    raw = {k: v for k, v in _defaults_raw()["rosa_faber"].items() if k != "notes"}
    return RosaFaberParams(**{k: float(v) for k, v in raw.items()})


def tau_tegmark(p: TegmarkParams, constants: Constants = SI) -> float:
    """``D^2 sqrt(m k T) / (N g q^2)`` in seconds."""
    # T enters last in each product so exact power-of-two scalings of T survive rounding
    return p.D**2 * math.sqrt(p.m * constants.k_B * p.T) / (p.N * constants.g * p.q**2)


def tau_rosa_faber(p: RosaFaberParams, constants: Constants = SI) -> float:
    """``hbar^3 / (g q1 q2 x1 M k T)`` in seconds."""
    return constants.hbar**3 / (p.x1 * p.M * constants.k_B * p.T) / (constants.g * p.q1 * p.q2)


def hagan_adjusted(tau: float) -> float:
    """Tegmark's estimate scaled up by the 1e10 correction factor."""
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    return tau * HAGAN_FACTOR


FORMULAS = {
    "tegmark": (tau_tegmark, TegmarkParams),
    "rosa-faber": (tau_rosa_faber, RosaFaberParams),
}


def sweep(formula: str, base, temperatures: Sequence[float], constants: Constants = SI) -> list[tuple[float, float]]:
    """Rows ``(T, tau)`` for each temperature, other parameters held at ``base``."""
    if formula not in FORMULAS:
        raise ValueError(f"unknown formula {formula!r}; choose from {sorted(FORMULAS)}")
    fn, kind = FORMULAS[formula]
    if not isinstance(base, kind):
        raise TypeError(f"{formula} sweep needs {kind.__name__}, got {type(base).__name__}")
    temperatures = list(temperatures)
    if not temperatures:
        raise ValueError("temperature range is empty")
    if any(not t > 0 for t in temperatures):
        raise ValueError(f"temperatures must be positive: {temperatures}")
    return [(float(t), fn(replace(base, T=float(t)), constants)) for t in temperatures]


def band_annotation(tau: float) -> str:
    lo, hi = ION_DECOHERENCE_BAND
    if tau > hi:
        return f"above ion band ({tau / hi:.3g}x upper edge)"
    if tau < lo:
        return "below ion band"
    return "inside ion band"


def params_dict(p) -> dict:
    return asdict(p)
