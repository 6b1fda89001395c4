"""Coherent-state teleportation from the retina to V1.

Two ways of running the protocol:

* literal: the firing pattern is given, the conditional state on modes (5, 6)
  is written down directly and the pattern's phase-shift correction applied;
* physical: the six-mode composite is built, modes 1-4 are measured
  projectively in the even/odd cat basis, and the 16 raw outcomes are grouped
  into firing patterns.

Mode indices inside two-mode states on (5, 6) are local: 0 is mode 5 and 1 is
mode 6.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .ecs import (
    DEFAULT_MAX_AMPLITUDES,
    ChannelParams,
    EcsParams,
    cat_pair,
    ecs_state,
    lgn_composite,
)
from .errors import DegenerateStateError
from .fock import (
    ModeOperator,
    TruncatedState,
    apply_operators,
    coherent_state,
    coherent_tail,
    fidelity,
    identity,
    phase_shift,
)


class FiringPattern(str, enum.Enum):
    """Which pair of optic-tract fibers carries action potentials."""

    I_II = "I_II"
    I_IV = "I_IV"
    II_III = "II_III"
    III_IV = "III_IV"

    @property
    def flips(self) -> tuple[bool, bool]:
        """Whether the pattern leaves mode 5 / mode 6 in the sign-flipped branch."""
        return _FLIPS[self]


_FLIPS = {
    FiringPattern.I_II: (False, False),
    FiringPattern.I_IV: (False, True),
    FiringPattern.II_III: (True, False),
    FiringPattern.III_IV: (True, True),
}

CORRECTION_ANGLE = -math.pi


@dataclass(frozen=True)
class TeleportReport:
    pattern: FiringPattern
    fidelity_before_correction: float
    fidelity_after_correction: float
    outcome_probability: float | None
    truncation_tail: float

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pattern"] = self.pattern.value
        return d


def conditional_state(pattern: FiringPattern, ecs: EcsParams, cutoff: int) -> TruncatedState:
    """State on modes (5, 6) that the given firing pattern leaves behind.

    I_II:   A|z>|z>   + s B|-z>|-z>
    I_IV:   A|z>|-z>  + s B|-z>|z>
    II_III: A|-z>|z>  + s B|z>|-z>
    III_IV: A|-z>|-z> + s B|z>|z>
    """
    pattern = FiringPattern(pattern)
    return cat_pair(ecs.A, ecs.B, ecs.sign, ecs.z, cutoff, flip=pattern.flips)[0]


def correction_for(pattern: FiringPattern, cutoff: int) -> dict[int, ModeOperator]:
    """Phase-shift fix-up for a pattern, keyed by local mode (0 -> 5, 1 -> 6).

    A crossed fiber on a mode gets ``exp(-i pi a^dagger a)`` there; uncrossed
    modes get the identity.
    """
    pattern = FiringPattern(pattern)
    flip = phase_shift(CORRECTION_ANGLE, cutoff)
    ident = identity(cutoff)
    return {mode: (flip if flipped else ident) for mode, flipped in enumerate(pattern.flips)}


def apply_correction(pattern: FiringPattern, state: TruncatedState) -> TruncatedState:
    if state.mode_count != 2:
        raise ValueError("corrections act on the two-mode (5, 6) state")
    return apply_operators(correction_for(pattern, state.cutoff), state)


def run_literal(pattern: FiringPattern, ecs: EcsParams, cutoff: int) -> TeleportReport:
    pattern = FiringPattern(pattern)
    target = ecs_state(ecs, cutoff)
    received = conditional_state(pattern, ecs, cutoff)
    corrected = apply_correction(pattern, received)
    return TeleportReport(
        pattern=pattern,
        fidelity_before_correction=fidelity(received, target),
        fidelity_after_correction=fidelity(corrected, target),
        outcome_probability=None,
        truncation_tail=coherent_tail(ecs.z, cutoff),
    )


# -- physical measurement model -----------------------------------------------

PARITY_LABELS = ("e", "o")


def parity_key(outcome: tuple[int, ...]) -> str:
    """Raw cat-basis outcome (0 = even, 1 = odd per mode) as e.g. ``"eeoe"``."""
    return "".join(PARITY_LABELS[bit] for bit in outcome)


def default_grouping() -> dict[str, FiringPattern]:
    """Group the 16 outcomes on modes 1-4 by the parities of modes 3 and 4.

    Modes 3 and 4 are the retina halves of the channels ending on modes 5 and
    6, which are the modes the corrections act on.
    """
    by_channel = {
        (0, 0): FiringPattern.I_II,
        (0, 1): FiringPattern.I_IV,
        (1, 0): FiringPattern.II_III,
        (1, 1): FiringPattern.III_IV,
    }
    return {
        parity_key(bits): by_channel[bits[2], bits[3]] for bits in itertools.product((0, 1), repeat=4)
    }


def parse_grouping(table: dict) -> dict[str, FiringPattern]:
    keys = {parity_key(bits) for bits in itertools.product((0, 1), repeat=4)}
    grouping = {str(k): FiringPattern(v) for k, v in table.items()}
    missing = keys - set(grouping)
    extra = set(grouping) - keys
    if missing or extra:
        raise ValueError(
            f"grouping table must map exactly the 16 parity strings; missing={sorted(missing)}, extra={sorted(extra)}"
        )
    return grouping


def cat_basis(z: complex, cutoff: int) -> np.ndarray:
    """Rows are the even and odd cats ``u+- ~ |z> +- |-z>`` (orthonormal)."""
    plus = coherent_state(z, cutoff).amplitudes
    minus = coherent_state(-z, cutoff).amplitudes
    rows = []
    for vec in (plus + minus, plus - minus):
        n = np.linalg.norm(vec)
        if n < 1e-14:
            raise DegenerateStateError(f"cat basis undefined at z={z} (|z>-|-z> has zero norm)")
        rows.append(vec / n)
    return np.array(rows)


@dataclass(frozen=True)
class RawOutcome:
    parities: str
    pattern: FiringPattern
    probability: float
    state: TruncatedState | None = field(repr=False)
    fidelity_before_correction: float
    fidelity_after_correction: float

    def to_dict(self) -> dict:
        return {
            "parities": self.parities,
            "pattern": self.pattern.value,
            "probability": self.probability,
            "fidelity_before_correction": self.fidelity_before_correction,
            "fidelity_after_correction": self.fidelity_after_correction,
        }


@dataclass(frozen=True)
class PhysicalRun:
    reports: list[TeleportReport]
    outcomes: list[RawOutcome]
    trajectory: dict
    seed: int

    def report(self, pattern: FiringPattern) -> TeleportReport:
        return next(r for r in self.reports if r.pattern == FiringPattern(pattern))

    def mean_fidelity_after(self) -> float:
        return sum(o.probability * o.fidelity_after_correction for o in self.outcomes if o.state is not None)

    def min_fidelity_after(self) -> float:
        # patterns that no outcome maps to carry no state
        return min(r.fidelity_after_correction for r in self.reports if r.outcome_probability)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "reports": [r.to_dict() for r in self.reports],
            "outcomes": [o.to_dict() for o in self.outcomes],
            "trajectory": dict(self.trajectory),
            "mean_fidelity_after": self.mean_fidelity_after(),
        }


# outcomes below this probability carry no usable post-measurement state
MIN_OUTCOME_PROBABILITY = 1e-300


def run_physical(
    ecs: EcsParams,
    ch: ChannelParams,
    cutoff: int,
    seed: int,
    grouping: dict[str, FiringPattern] | None = None,
    max_amplitudes: int = DEFAULT_MAX_AMPLITUDES,
) -> PhysicalRun:
    """Measure modes 1-4 of the composite in the cat basis and correct 5, 6.

    A firing pattern collects several raw outcomes, so its post-measurement
    state is a mixture; its fidelity is the probability-weighted mean of the
    raw outcomes' fidelities, which equals the mixture's fidelity with the
    pure target.
    """
    if ecs.z == 0:
        raise DegenerateStateError("physical mode needs |z| > 0: the odd cat state vanishes at z = 0")
    grouping = default_grouping() if grouping is None else grouping
    basis = cat_basis(ecs.z, cutoff).conj()
    composite = lgn_composite(ecs, ch, cutoff, max_amplitudes)
    t = composite.tensor.reshape((cutoff,) * 4 + (cutoff * cutoff,))
    post = np.einsum("pa,qb,rc,sd,abcdx->pqrsx", basis, basis, basis, basis, t, optimize=True)
    target = ecs_state(ecs, cutoff)
    tail = coherent_tail(ecs.z, cutoff)

    outcomes = []
    for bits in itertools.product((0, 1), repeat=4):
        key = parity_key(bits)
        vec = post[bits]
        p = float(np.vdot(vec, vec).real)
        if p > MIN_OUTCOME_PROBABILITY:
            state = TruncatedState(2, cutoff, vec / math.sqrt(p), 2 * tail)
            pattern = grouping[key]
            f_before = fidelity(state, target)
            f_after = fidelity(apply_correction(pattern, state), target)
        else:
            state, f_before, f_after = None, 0.0, 0.0
        outcomes.append(RawOutcome(key, grouping[key], p, state, f_before, f_after))

    reports = []
    for pattern in FiringPattern:
        members = [o for o in outcomes if o.pattern == pattern and o.state is not None]
        p = sum(o.probability for o in members)
        if p > 0:
            before = sum(o.probability * o.fidelity_before_correction for o in members) / p
            after = sum(o.probability * o.fidelity_after_correction for o in members) / p
        else:
            before = after = math.nan
        reports.append(TeleportReport(pattern, before, after, p, tail))

    probs = np.array([o.probability for o in outcomes])
    rng = np.random.default_rng(seed)
    pick = outcomes[int(rng.choice(len(outcomes), p=probs / probs.sum()))]
    trajectory = {
        "parities": pick.parities,
        "pattern": pick.pattern.value,
        "probability": pick.probability,
        "fidelity_before_correction": pick.fidelity_before_correction,
        "fidelity_after_correction": pick.fidelity_after_correction,
    }
    return PhysicalRun(reports, outcomes, trajectory, seed)
