"""Physical constants and the override hook used by unit-system tests."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import yaml


@lru_cache(maxsize=None)
def _shipped() -> dict:
    text = resources.files("ecsteleport").joinpath("data/constants.yaml").read_text()
    return yaml.safe_load(text)


@dataclass(frozen=True)
class Constants:
    """Bundle of the constants the decoherence and threshold formulas need.

    Every field can be overridden (``Constants.si().replace(k_B=1.0)``) so
    formulas can be checked in unit systems where the answer is obvious.
    """

    hbar: float
    k_B: float
    g: float
    e: float
    version: int = 0

    @classmethod
    def si(cls) -> "Constants":
        raw = _shipped()
        return cls(
            hbar=float(raw["hbar"]), k_B=float(raw["k_B"]), g=float(raw["g"]), e=float(raw["e"]), version=int(raw["version"])
        )

    @classmethod
    def unit(cls) -> "Constants":
        return cls(hbar=1.0, k_B=1.0, g=1.0, e=1.0, version=0)

    def replace(self, **overrides) -> "Constants":
        unknown = set(overrides) - {"hbar", "k_B", "g", "e"}
        if unknown:
            raise KeyError(f"unknown constant(s): {sorted(unknown)}")
        for name, value in overrides.items():
            if not float(value) > 0:
                raise ValueError(f"constant {name} must be positive, got {value!r}")
        return dataclasses.replace(self, **{k: float(v) for k, v in overrides.items()})

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


SI = Constants.si()
HBAR = SI.hbar
K_B = SI.k_B
COULOMB_G = SI.g
ELEMENTARY_CHARGE = SI.e
