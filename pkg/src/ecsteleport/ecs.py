"""Entangled coherent states: the two-mode source state, the two
retina-to-cortex channels, and their six-mode composite."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetError, DegenerateStateError
from .fock import TruncatedState, coherent_state, tensor_product

DEGENERACY_TOL = 1e-14
# 2**24 amplitudes = 16**6, about 268 MB of complex128
DEFAULT_MAX_AMPLITUDES = 2**24


def _check_sign(sign: int) -> int:
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign!r}")
    return int(sign)


@dataclass(frozen=True)
class EcsParams:
    """``A |z>|z> + sign * B |-z>|-z>`` on an ordered pair of modes.

    ``A`` and ``B`` are pre-normalization weights; the constructed state is
    always renormalized.
    """

    A: complex
    B: complex
    sign: int
    z: complex
    mode_pair: tuple[int, int] = (1, 2)

    def __post_init__(self):
        object.__setattr__(self, "A", complex(self.A))
        object.__setattr__(self, "B", complex(self.B))
        object.__setattr__(self, "z", complex(self.z))
        _check_sign(self.sign)
        if self.A == 0 and self.B == 0:
            raise DegenerateStateError("A and B cannot both be zero")

    @classmethod
    def balanced(cls, z: complex, sign: int = 1) -> "EcsParams":
        r = 1 / math.sqrt(2)
        return cls(r, r, sign, z)


@dataclass(frozen=True)
class ChannelParams:
    """Coefficients of the two channels ``(3,5)`` and ``(4,6)``."""

    delta3: complex
    delta4: complex
    delta5: complex
    delta6: complex
    sign35: int
    sign46: int
    z: complex

    def __post_init__(self):
        for name in ("delta3", "delta4", "delta5", "delta6", "z"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        _check_sign(self.sign35)
        _check_sign(self.sign46)
        if self.delta3 == 0 and self.delta4 == 0:
            raise DegenerateStateError("delta3 and delta4 cannot both be zero")
        if self.delta5 == 0 and self.delta6 == 0:
            raise DegenerateStateError("delta5 and delta6 cannot both be zero")

    @classmethod
    def balanced(cls, z: complex, sign35: int = 1, sign46: int = 1) -> "ChannelParams":
        r = 1 / math.sqrt(2)
        return cls(r, r, r, r, sign35, sign46, z)


def cat_pair(
    first: complex,
    second: complex,
    sign: int,
    z: complex,
    cutoff: int,
    flip: tuple[bool, bool] = (False, False),
) -> tuple[TruncatedState, float]:
    """Normalized ``first |s1 z>|s2 z> + sign * second |-s1 z>|-s2 z>``.

    ``flip`` negates the amplitude of the first term's coherent state on each
    mode (``s_i = -1`` when flipped).  Returns the state and its squared norm
    before normalization.
    """
    sign = _check_sign(sign)
    plus = coherent_state(z, cutoff)
    minus = coherent_state(-z, cutoff)
    left = (minus, plus) if flip[0] else (plus, minus)
    right = (minus, plus) if flip[1] else (plus, minus)
    term_a = np.multiply.outer(left[0].amplitudes, right[0].amplitudes)
    term_b = np.multiply.outer(left[1].amplitudes, right[1].amplitudes)
    amps = complex(first) * term_a + sign * complex(second) * term_b
    norm_sq = float(np.vdot(amps, amps).real)
    if norm_sq < DEGENERACY_TOL:
        raise DegenerateStateError(
            f"superposition cancels: squared norm {norm_sq:.3e} below {DEGENERACY_TOL:g} "
            f"(first={first}, second={second}, sign={sign:+d}, z={z})"
        )
    state = TruncatedState(2, cutoff, amps.reshape(-1) / math.sqrt(norm_sq), 2 * plus.truncation_tail)
    return state, norm_sq


def ecs_state(p: EcsParams, cutoff: int) -> TruncatedState:
    return cat_pair(p.A, p.B, p.sign, p.z, cutoff)[0]


def ecs_norm_squared(p: EcsParams, cutoff: int) -> float:
    """Squared norm of the unnormalized superposition, computed numerically."""
    return cat_pair(p.A, p.B, p.sign, p.z, cutoff)[1]


def ecs_norm_squared_closed_form(A: complex, B: complex, sign: int, z: complex) -> float:
    """``|A|^2 + |B|^2 + 2 sign Re(conj(A) B) exp(-4|z|^2)`` for untruncated states."""
    A, B = complex(A), complex(B)
    return abs(A) ** 2 + abs(B) ** 2 + 2 * sign * (A.conjugate() * B).real * math.exp(-4 * abs(z) ** 2)


def channel_state_35(p: ChannelParams, cutoff: int) -> TruncatedState:
    return cat_pair(p.delta3, p.delta4, p.sign35, p.z, cutoff)[0]


def channel_state_46(p: ChannelParams, cutoff: int) -> TruncatedState:
    return cat_pair(p.delta5, p.delta6, p.sign46, p.z, cutoff)[0]


def check_budget(cutoff: int, mode_count: int, max_amplitudes: int = DEFAULT_MAX_AMPLITUDES) -> int:
    dimension = cutoff**mode_count
    if dimension > max_amplitudes:
        raise BudgetError(
            f"{mode_count}-mode state at cutoff {cutoff} needs {dimension} amplitudes, "
            f"budget is {max_amplitudes}",
            dimension=dimension,
            limit=max_amplitudes,
        )
    return dimension


def lgn_composite(
    ecs: EcsParams,
    ch: ChannelParams,
    cutoff: int,
    max_amplitudes: int = DEFAULT_MAX_AMPLITUDES,
) -> TruncatedState:
    """Six-mode composite with modes ordered 1..6.

    The source pair occupies modes (1, 2), channel 35 modes (3, 5) and channel
    46 modes (4, 6), so the pair tensor product is reordered accordingly.
    """
    check_budget(cutoff, 6, max_amplitudes)
    if ecs.z != ch.z:
        raise ValueError(f"source and channels must share z (got {ecs.z} and {ch.z})")
    src = ecs_state(ecs, cutoff)
    c35 = channel_state_35(ch, cutoff)
    c46 = channel_state_46(ch, cutoff)
    # product axes are (1, 2, 3, 5, 4, 6); move to (1, 2, 3, 4, 5, 6)
    product = tensor_product([src, c35, c46]).tensor
    ordered = np.ascontiguousarray(np.transpose(product, (0, 1, 2, 4, 3, 5)))
    return TruncatedState(6, cutoff, ordered.reshape(-1), coherent_state(ecs.z, cutoff).truncation_tail * 6)
