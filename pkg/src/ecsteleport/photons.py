"""Photon losses on the way to the retina, and the objective-reduction time."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import HBAR


@dataclass(frozen=True)
class AttenuationStage:
    label: str
    transmittance: float

    def __post_init__(self):
        if not 0.0 <= self.transmittance <= 1.0:
            raise ValueError(f"transmittance of {self.label!r} must lie in [0, 1], got {self.transmittance}")


# 4% reflected at the cornea, half of the rest absorbed by the ocular media,
# 80% lost in retinal transmission
DEFAULT_STAGES = (
    AttenuationStage("cornea", 0.96),
    AttenuationStage("ocular media", 0.50),
    AttenuationStage("retinal transmission", 0.20),
)


@dataclass(frozen=True)
class AttenuationResult:
    n_input: float
    surviving: float
    fraction: float
    trace: list[dict]
    sampled: bool = False


def attenuate(
    n_input: float,
    stages=DEFAULT_STAGES,
    sample: bool = False,
    seed: int | None = None,
) -> AttenuationResult:
    """Propagate a photon count through successive lossy stages.

    By default the count is an expectation value.  With ``sample=True`` each
    stage draws binomially from the integer survivors of the previous one.
    """
    if n_input < 0:
        raise ValueError(f"photon count must be non-negative, got {n_input}")
    stages = [s if isinstance(s, AttenuationStage) else AttenuationStage(**s) for s in stages]
    rng = np.random.default_rng(seed) if sample else None
    if sample and n_input != int(n_input):
        raise ValueError("binomial sampling needs an integer photon count")

    n = int(n_input) if sample else float(n_input)
    fraction = 1.0
    trace = []
    for stage in stages:
        n = int(rng.binomial(n, stage.transmittance)) if sample else n * stage.transmittance
        fraction *= stage.transmittance
        trace.append({"stage": stage.label, "transmittance": stage.transmittance, "photons_after": n})
    return AttenuationResult(float(n_input), n, fraction, trace, sample)


def or_threshold_time(energy: float, hbar: float = HBAR) -> float:
    """Collapse time ``T = hbar / E`` for gravitational self-energy ``E`` (J)."""
    if not energy > 0:
        raise ValueError(f"energy must be positive, got {energy}")
    return hbar / energy
