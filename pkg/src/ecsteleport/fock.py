"""Truncated Fock-space engine.

States are complex amplitude vectors over ``mode_count`` bosonic modes, each
truncated to Fock levels ``0 .. cutoff-1``.  The flat index of an occupation
tuple ``(n_1, ..., n_M)`` is its mixed-radix (C-order) encoding, so the
amplitude vector reshapes directly into an ``(cutoff,) * mode_count`` tensor.
Single-mode operators act along one tensor axis; the full ``d**M`` square
matrix is never built.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import gammainc, gammaln

from .errors import NormalizationError, ShapeMismatchError

NORM_TOL = 1e-12
FIDELITY_NORM_TOL = 1e-10


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.ascontiguousarray(array, dtype=np.complex128)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class TruncatedState:
    mode_count: int
    cutoff: int
    amplitudes: np.ndarray = field(repr=False)
    truncation_tail: float = 0.0

    def __post_init__(self):
        if self.mode_count < 1 or self.cutoff < 1:
            raise ValueError("mode_count and cutoff must be positive")
        amps = np.asarray(self.amplitudes).reshape(-1)
        if amps.size != self.cutoff**self.mode_count:
            raise ShapeMismatchError(
                f"expected {self.cutoff}**{self.mode_count} = {self.cutoff**self.mode_count} "
                f"amplitudes, got {amps.size}"
            )
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @classmethod
    def from_tensor(cls, tensor: np.ndarray, truncation_tail: float = 0.0) -> "TruncatedState":
        tensor = np.asarray(tensor)
        if tensor.ndim == 0 or len(set(tensor.shape)) != 1:
            raise ShapeMismatchError(f"tensor must have equal axis lengths, got {tensor.shape}")
        return cls(tensor.ndim, tensor.shape[0], tensor.reshape(-1), truncation_tail)

    @property
    def dimension(self) -> int:
        return self.amplitudes.size

    @property
    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((self.cutoff,) * self.mode_count)

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def norm(self) -> float:
        return math.sqrt(self.norm_squared())

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm_squared() - 1.0) <= tol

    def normalized(self) -> "TruncatedState":
        n = self.norm()
        if n == 0.0:
            raise NormalizationError("cannot normalize the zero vector")
        return self._with(self.amplitudes / n)

    def scaled(self, factor: complex) -> "TruncatedState":
        return self._with(self.amplitudes * factor)

    def __add__(self, other: "TruncatedState") -> "TruncatedState":
        _check_same_shape(self, other)
        return TruncatedState(
            self.mode_count,
            self.cutoff,
            self.amplitudes + other.amplitudes,
            max(self.truncation_tail, other.truncation_tail),
        )

    def amplitude(self, occupations: Sequence[int]) -> complex:
        return complex(self.amplitudes[encode_index(occupations, self.cutoff)])

    def _with(self, amplitudes: np.ndarray) -> "TruncatedState":
        return TruncatedState(self.mode_count, self.cutoff, amplitudes, self.truncation_tail)


@dataclass(frozen=True, eq=False)
class ModeOperator:
    """A ``cutoff x cutoff`` matrix acting on a single mode."""

    cutoff: int
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        entries = np.asarray(self.entries)
        if entries.shape != (self.cutoff, self.cutoff):
            raise ShapeMismatchError(f"expected ({self.cutoff}, {self.cutoff}) matrix, got {entries.shape}")
        object.__setattr__(self, "entries", _frozen(entries))

    def adjoint(self) -> "ModeOperator":
        return ModeOperator(self.cutoff, self.entries.conj().T)

    def __matmul__(self, other: "ModeOperator") -> "ModeOperator":
        if not isinstance(other, ModeOperator):
            return NotImplemented
        if other.cutoff != self.cutoff:
            raise ShapeMismatchError("operator cutoffs differ")
        return ModeOperator(self.cutoff, self.entries @ other.entries)

    def is_unitary(self, tol: float = 1e-12) -> bool:
        eye = np.eye(self.cutoff)
        return bool(np.max(np.abs(self.entries.conj().T @ self.entries - eye)) <= tol)


# -- indexing -----------------------------------------------------------------


def encode_index(occupations: Sequence[int], cutoff: int) -> int:
    """Mixed-radix flat index of an occupation tuple (mode 0 most significant)."""
    return int(np.ravel_multi_index(tuple(int(n) for n in occupations), (cutoff,) * len(occupations)))


def decode_index(index: int, cutoff: int, mode_count: int) -> tuple[int, ...]:
    return tuple(int(n) for n in np.unravel_index(int(index), (cutoff,) * mode_count))


# -- states -------------------------------------------------------------------


def fock_state(occupations: int | Sequence[int], cutoff: int) -> TruncatedState:
    if isinstance(occupations, (int, np.integer)):
        occupations = (int(occupations),)
    occupations = tuple(occupations)
    if any(n < 0 or n >= cutoff for n in occupations):
        raise ValueError(f"occupations {occupations} outside 0..{cutoff - 1}")
    amps = np.zeros(cutoff ** len(occupations), dtype=np.complex128)
    amps[encode_index(occupations, cutoff)] = 1.0
    return TruncatedState(len(occupations), cutoff, amps)


def vacuum(cutoff: int, mode_count: int = 1) -> TruncatedState:
    return fock_state((0,) * mode_count, cutoff)


def coherent_tail(z: complex, cutoff: int) -> float:
    """Probability mass of an untruncated coherent state above the cutoff.

    Equals ``1 - exp(-|z|^2) * sum_{n<cutoff} |z|^(2n)/n!``, the Poisson upper
    tail, evaluated through the regularized incomplete gamma function so it
    stays accurate when tiny.
    """
    x = abs(z) ** 2
    if x == 0.0:
        return 0.0
    return float(gammainc(cutoff, x))


def coherent_state(z: complex, cutoff: int) -> TruncatedState:
    """Single-mode coherent state ``|z>`` truncated and renormalized.

    The discarded probability is attached as ``truncation_tail``.
    """
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"coherent amplitude must be finite, got {z!r}")
    n = np.arange(cutoff)
    if z == 0:
        amps = np.zeros(cutoff, dtype=np.complex128)
        amps[0] = 1.0
    else:
        # log-domain magnitudes keep large |z| or cutoff from overflowing
        log_mag = n * math.log(abs(z)) - 0.5 * gammaln(n + 1)
        log_mag -= log_mag.max()
        amps = np.exp(log_mag) * np.exp(1j * cmath.phase(z) * n)
        amps /= np.linalg.norm(amps)
    return TruncatedState(1, cutoff, amps, coherent_tail(z, cutoff))


def coherent_overlap(z: complex, w: complex) -> complex:
    """Closed-form ``<z|w>`` for untruncated coherent states."""
    z, w = complex(z), complex(w)
    return cmath.exp(-abs(z) ** 2 / 2 - abs(w) ** 2 / 2 + z.conjugate() * w)


def tensor_product(states: Sequence[TruncatedState]) -> TruncatedState:
    states = list(states)
    if not states:
        raise ValueError("tensor_product needs at least one state")
    cutoff = states[0].cutoff
    if any(s.cutoff != cutoff for s in states):
        raise ShapeMismatchError(f"cutoff mismatch: {[s.cutoff for s in states]}")
    amps = states[0].amplitudes
    for s in states[1:]:
        amps = np.multiply.outer(amps, s.amplitudes).reshape(-1)
    return TruncatedState(
        sum(s.mode_count for s in states),
        cutoff,
        amps,
        sum(s.truncation_tail for s in states),
    )


def inner_product(s1: TruncatedState, s2: TruncatedState) -> complex:
    """``<s1|s2>``, conjugate-linear in the first argument."""
    _check_same_shape(s1, s2)
    return complex(np.vdot(s1.amplitudes, s2.amplitudes))


def fidelity(s1: TruncatedState, s2: TruncatedState) -> float:
    """Global-phase-invariant overlap ``|<s1|s2>|^2`` of two normalized states."""
    _check_same_shape(s1, s2)
    for label, s in (("first", s1), ("second", s2)):
        if not s.is_normalized(FIDELITY_NORM_TOL):
            raise NormalizationError(f"{label} state has norm^2 {s.norm_squared():.3e}, expected 1")
    return min(1.0, abs(inner_product(s1, s2)) ** 2)


def _check_same_shape(s1: TruncatedState, s2: TruncatedState) -> None:
    if s1.mode_count != s2.mode_count or s1.cutoff != s2.cutoff:
        raise ShapeMismatchError(
            f"shape mismatch: ({s1.mode_count} modes, cutoff {s1.cutoff}) vs "
            f"({s2.mode_count} modes, cutoff {s2.cutoff})"
        )


# -- operators ----------------------------------------------------------------


def annihilation(cutoff: int) -> ModeOperator:
    if cutoff < 2:
        raise ValueError("annihilation operator needs cutoff >= 2")
    return ModeOperator(cutoff, np.diag(np.sqrt(np.arange(1, cutoff, dtype=float)), k=1))


def creation(cutoff: int) -> ModeOperator:
    return annihilation(cutoff).adjoint()


def number_operator(cutoff: int) -> ModeOperator:
    return ModeOperator(cutoff, np.diag(np.arange(cutoff, dtype=float)))


def identity(cutoff: int) -> ModeOperator:
    return ModeOperator(cutoff, np.eye(cutoff))


def phase_shift(theta: float, cutoff: int) -> ModeOperator:
    """``exp(i theta a^dagger a)``: diagonal with entries ``exp(i theta n)``.

    ``phase_shift(-pi)`` sends ``|z>`` to ``|-z>`` exactly, truncation included,
    because it multiplies the n-th amplitude by ``(-1)**n``.
    """
    theta = float(theta)
    if not math.isfinite(theta):
        raise ValueError(f"theta must be finite, got {theta!r}")
    n = np.arange(cutoff)
    diag = np.exp(1j * theta * n)
    if theta % math.pi == 0.0:
        # remove the ~1e-16 imaginary dust of exp(i k pi)
        diag = np.where(((theta / math.pi) * n) % 2 == 0, 1.0, -1.0).astype(np.complex128)
    return ModeOperator(cutoff, np.diag(diag))


def apply_to_mode(op: ModeOperator, mode: int, state: TruncatedState) -> TruncatedState:
    """Act with a single-mode operator along one tensor axis of ``state``."""
    if not 0 <= mode < state.mode_count:
        raise IndexError(f"mode {mode} out of range for {state.mode_count}-mode state")
    if op.cutoff != state.cutoff:
        raise ShapeMismatchError(f"operator cutoff {op.cutoff} != state cutoff {state.cutoff}")
    out = np.tensordot(op.entries, state.tensor, axes=([1], [mode]))
    out = np.moveaxis(out, 0, mode)
    return TruncatedState(state.mode_count, state.cutoff, out.reshape(-1), state.truncation_tail)


def apply_operators(ops: dict[int, ModeOperator], state: TruncatedState) -> TruncatedState:
    """Apply several single-mode operators, keyed by mode index."""
    for mode, op in sorted(ops.items()):
        state = apply_to_mode(op, mode, state)
    return state
