"""Three-qubit teleportation with Bell-pair channels.

Serves as the trusted reference protocol for the coherent-state analogue:
every measurement outcome is corrected with I, X, Z or ZX and must return
the input qubit exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

PAULI_I = np.eye(2, dtype=np.complex128)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=np.complex128) / math.sqrt(2)
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128)

BITS = ((0, 0), (0, 1), (1, 0), (1, 1))

# classical message -> Bob's fix-up; "ZX" means X first, then Z
CORRECTIONS = {
    (0, 0): PAULI_I,
    (0, 1): PAULI_X,
    (1, 0): PAULI_Z,
    (1, 1): PAULI_Z @ PAULI_X,
}


def bell_state(x: int, y: int) -> np.ndarray:
    """``(|0,y> + (-1)^x |1,not y>) / sqrt(2)`` as a length-4 vector."""
    v = np.zeros(4, dtype=np.complex128)
    v[2 * 0 + y] = 1.0
    v[2 * 1 + (1 - y)] = (-1) ** x
    return v / math.sqrt(2)


@dataclass(frozen=True)
class QubitOutcome:
    raw_bits: tuple[int, int]
    message: tuple[int, int]
    probability: float
    received: np.ndarray
    corrected: np.ndarray
    fidelity: float


def _normalize(alpha: complex, gamma: complex) -> np.ndarray:
    psi = np.array([alpha, gamma], dtype=np.complex128)
    n = np.linalg.norm(psi)
    if n == 0:
        raise ValueError("input qubit is the zero vector")
    return psi / n


def qubit_teleport(alpha: complex, gamma: complex, bell_xy: tuple[int, int] = (0, 0)) -> list[QubitOutcome]:
    """Teleport ``alpha|0> + gamma|1>`` over channel ``|beta_xy>``.

    Alice applies CNOT and H to her two qubits and measures them, getting raw
    bits ``(m0, m1)``.  Because the channel label is shared knowledge, the
    classical message is ``(m0 ^ x, m1 ^ y)``; Bob applies ``CORRECTIONS`` for
    that message.  Returns one entry per raw outcome.
    """
    x, y = bell_xy
    if (x, y) not in BITS:
        raise ValueError(f"bell_xy must be a pair of bits, got {bell_xy!r}")
    psi = _normalize(alpha, gamma)
    state = np.kron(psi, bell_state(x, y))  # qubit order: input, Alice half, Bob half
    state = np.kron(CNOT, PAULI_I) @ state
    state = np.kron(HADAMARD, np.eye(4)) @ state
    amps = state.reshape(2, 2, 2)

    outcomes = []
    for m0, m1 in BITS:
        bob = amps[m0, m1, :]
        p = float(np.vdot(bob, bob).real)
        received = bob / math.sqrt(p)
        message = (m0 ^ x, m1 ^ y)
        corrected = CORRECTIONS[message] @ received
        f = float(abs(np.vdot(psi, corrected)) ** 2)
        outcomes.append(QubitOutcome((m0, m1), message, p, received, corrected, f))
    return outcomes
