"""Wu-Austin and Pokorny-Wu Hamiltonians on small truncated mode spaces.

Modes are laid out system first (``a_1..a_N``), then bath (``b_1..b_NB``),
then input field (``c_1..c_NI``), matching the flat-index order of
:mod:`ecsteleport.fock`.

Every monomial is truncated as a compression ``P X P`` of the untruncated
operator, not as a product of truncated ladder matrices.  The two differ
whenever a creation operator is followed by an annihilation on the same
mode (``a a^dagger`` at the top level), and only the compression nests
properly: the matrix at cutoff ``d`` is the leading block of the one at
``d + 1``, so by eigenvalue interlacing the ground-state energy can only go
down as the cutoff grows.

Each term is added together with its exact adjoint, which makes the result
Hermitian entry-for-entry.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply

from .errors import BudgetError, NumericError, ShapeMismatchError
from .fock import TruncatedState

MAX_EIGEN_DIM = 4096
MAX_EVOLVE_DIM = 65536

ANNIHILATE = "a"
CREATE = "+"


@lru_cache(maxsize=None)
def word_matrix(word: str, cutoff: int) -> sp.csr_matrix:
    """Compressed matrix of a ladder-operator word on one mode.

    ``word`` is read left to right as written in operator products, so
    ``"+a"`` is ``a^dagger a`` and ``"a+"`` is ``a a^dagger``.
    """
    pad = cutoff + len(word)
    lower = sp.diags(np.sqrt(np.arange(1, pad, dtype=float)), 1, shape=(pad, pad), format="csr")
    letters = {ANNIHILATE: lower, CREATE: lower.T.tocsr()}
    out = sp.identity(pad, format="csr")
    for letter in word:
        out = out @ letters[letter]
    return out[:cutoff, :cutoff].tocsr()


@dataclass
class HermitianOperator:
    matrix: sp.csr_matrix
    cutoff: int
    mode_count: int
    labels: list[str] = field(default_factory=list)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def hermiticity_error(self) -> float:
        diff = self.matrix - self.matrix.conj().T
        return float(np.max(np.abs(diff.data))) if diff.nnz else 0.0

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def expectation(self, state: TruncatedState) -> float:
        _check_state(self, state)
        return float(np.vdot(state.amplitudes, self.matrix @ state.amplitudes).real)


class _Builder:
    def __init__(self, mode_count: int, cutoff: int):
        self.mode_count = mode_count
        self.cutoff = cutoff
        self.dim = cutoff**mode_count
        # H = K + K^dagger; IEEE addition commutes, so H is Hermitian bit-for-bit
        self.half = sp.csr_matrix((self.dim, self.dim), dtype=np.complex128)

    def monomial(self, factors: list[tuple[int, str]]) -> sp.csr_matrix:
        """Embed an ordered product of single-mode letters ``[(mode, letter), ...]``."""
        words = {}
        for mode, letter in factors:
            # operators on different modes commute, so only per-mode order matters
            words[mode] = words.get(mode, "") + letter
        out = sp.identity(1, format="csr", dtype=np.complex128)
        for mode in range(self.mode_count):
            op = word_matrix(words[mode], self.cutoff) if mode in words else sp.identity(self.cutoff, format="csr")
            out = sp.kron(out, op, format="csr")
        return out

    def add_number(self, energy: float, mode: int) -> None:
        if energy:
            self.half = self.half + (0.5 * energy) * self.monomial([(mode, CREATE), (mode, ANNIHILATE)])

    def add_with_adjoint(self, coeff: complex, factors: list[tuple[int, str]]) -> None:
        if coeff == 0:
            return
        self.half = self.half + coeff * self.monomial(factors)

    def result(self) -> sp.csr_matrix:
        return (self.half + self.half.conj().T).tocsr()


def _check_budget(dim: int, limit: int, what: str) -> None:
    if dim > limit:
        raise BudgetError(f"{what} dimension {dim} exceeds budget {limit}", dimension=dim, limit=limit)


def _coupling(value, shape: tuple[int, ...], name: str) -> np.ndarray:
    arr = np.asarray(value, dtype=np.complex128)
    try:
        return np.broadcast_to(arr, shape)
    except ValueError:
        raise ValueError(f"{name} must be a scalar or have shape {shape}, got {arr.shape}") from None


@dataclass(frozen=True)
class WuAustinParams:
    """Mode frequencies plus the gamma/alpha/beta couplings.

    Couplings are scalars (uniform over all index combinations) or arrays of
    shape ``(N, N_I)`` for gamma, ``(N, N_B, N_B)`` for alpha and
    ``(N, N, N_B)`` for beta.
    """

    omegas: tuple[float, ...] = ()
    Omegas: tuple[float, ...] = ()
    OmegaPrimes: tuple[float, ...] = ()
    gamma: complex | np.ndarray = 0.0
    alpha: complex | np.ndarray = 0.0
    beta: complex | np.ndarray = 0.0

    def __post_init__(self):
        for name in ("omegas", "Omegas", "OmegaPrimes"):
            vals = tuple(float(w) for w in getattr(self, name))
            if any(w < 0 for w in vals):
                raise ValueError(f"{name} must be non-negative")
            object.__setattr__(self, name, vals)
        if self.mode_count < 1:
            raise ValueError("need at least one mode")

    @property
    def N(self) -> int:
        return len(self.omegas)

    @property
    def N_B(self) -> int:
        return len(self.Omegas)

    @property
    def N_I(self) -> int:
        return len(self.OmegaPrimes)

    @property
    def mode_count(self) -> int:
        return self.N + self.N_B + self.N_I

    def system(self, i: int) -> int:
        return i

    def bath(self, k: int) -> int:
        return self.N + k

    def field(self, l: int) -> int:
        return self.N + self.N_B + l

    def labels(self) -> list[str]:
        return (
            [f"a{i + 1}" for i in range(self.N)]
            + [f"b{k + 1}" for k in range(self.N_B)]
            + [f"c{l + 1}" for l in range(self.N_I)]
        )


@dataclass(frozen=True)
class PokornyWuParams:
    base: WuAustinParams
    phi: complex = 0.0
    zeta: complex = 0.0
    sigma: complex = 0.0
    rho: complex = 0.0
    xi: complex = 0.0
    m: int = 1
    n: int = 1

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValueError("powers m and n must be >= 1")


def _diagonal(b: _Builder, p: WuAustinParams, hbar: float) -> None:
    for i, w in enumerate(p.omegas):
        b.add_number(hbar * w, p.system(i))
    for k, w in enumerate(p.Omegas):
        b.add_number(hbar * w, p.bath(k))
    for l, w in enumerate(p.OmegaPrimes):
        b.add_number(hbar * w, p.field(l))


def build_wu_austin(
    p: WuAustinParams,
    cutoff: int,
    hbar: float = 1.0,
    max_dim: int = MAX_EVOLVE_DIM,
) -> HermitianOperator:
    """Number terms plus the three coupling sums.

    gamma: ``a_i c_l^dagger``; alpha: ``a_i b_j^dagger b_k``;
    beta: ``a_i a_j^dagger b_k``, each with its adjoint.
    """
    if cutoff < 2:
        raise ValueError("cutoff must be >= 2")
    _check_budget(cutoff**p.mode_count, max_dim, "Hamiltonian")
    N, NB, NI = p.N, p.N_B, p.N_I
    gamma = _coupling(p.gamma, (N, NI), "gamma")
    alpha = _coupling(p.alpha, (N, NB, NB), "alpha")
    beta = _coupling(p.beta, (N, N, NB), "beta")

    b = _Builder(p.mode_count, cutoff)
    _diagonal(b, p, hbar)
    for i, l in itertools.product(range(N), range(NI)):
        b.add_with_adjoint(gamma[i, l], [(p.system(i), ANNIHILATE), (p.field(l), CREATE)])
    for i, j, k in itertools.product(range(N), range(NB), range(NB)):
        b.add_with_adjoint(
            alpha[i, j, k], [(p.system(i), ANNIHILATE), (p.bath(j), CREATE), (p.bath(k), ANNIHILATE)]
        )
    for i, j, k in itertools.product(range(N), range(N), range(NB)):
        b.add_with_adjoint(beta[i, j, k], [(p.system(i), ANNIHILATE), (p.system(j), CREATE), (p.bath(k), ANNIHILATE)])
    return HermitianOperator(b.result(), cutoff, p.mode_count, p.labels())


def build_pokorny_wu(
    p: PokornyWuParams,
    cutoff: int,
    hbar: float = 1.0,
    max_dim: int = MAX_EVOLVE_DIM,
) -> HermitianOperator:
    """Diagonal part, linear bath/source couplings (phi, zeta) and the
    nonlinear ``a_j^dagger (a_l)^m (a_p)^n`` terms (sigma, rho, xi)."""
    if p.m >= cutoff or p.n >= cutoff:
        raise ValueError(f"powers m={p.m}, n={p.n} must be below the cutoff {cutoff}")
    base = p.base
    _check_budget(cutoff**base.mode_count, max_dim, "Hamiltonian")
    b = _Builder(base.mode_count, cutoff)
    _diagonal(b, base, hbar)

    for i, k in itertools.product(range(base.N), range(base.N_B)):
        b.add_with_adjoint(p.phi, [(base.system(i), ANNIHILATE), (base.bath(k), CREATE)])
    for i, l in itertools.product(range(base.N), range(base.N_I)):
        b.add_with_adjoint(p.zeta, [(base.field(l), ANNIHILATE), (base.system(i), CREATE)])

    for j, l, q in itertools.product(range(base.N), repeat=3):
        factors = (
            [(base.system(j), CREATE)]
            + [(base.system(l), ANNIHILATE)] * p.m
            + [(base.system(q), ANNIHILATE)] * p.n
        )
        for coeff in (p.sigma, p.rho, p.xi):
            b.add_with_adjoint(coeff, factors)
    return HermitianOperator(b.result(), cutoff, base.mode_count, base.labels())


# -- dynamics -----------------------------------------------------------------


def _check_state(H: HermitianOperator, state: TruncatedState) -> None:
    if state.cutoff != H.cutoff or state.mode_count != H.mode_count:
        raise ShapeMismatchError(
            f"state ({state.mode_count} modes, cutoff {state.cutoff}) does not match "
            f"operator ({H.mode_count} modes, cutoff {H.cutoff})"
        )


def _rk4(H: sp.csr_matrix, psi: np.ndarray, t: float, hbar: float, max_phase_step: float, max_steps: int) -> np.ndarray:
    scale = float(abs(H).sum(axis=1).max()) if H.nnz else 0.0  # bounds the spectral radius
    steps = max(1, math.ceil(abs(t) * scale / hbar / max_phase_step))
    if steps > max_steps:
        raise NumericError(f"step-size underflow: {steps} steps needed, limit {max_steps}")
    h = t / steps
    k = -1j / hbar

    def f(v):
        return k * (H @ v)

    for _ in range(steps):
        k1 = f(psi)
        k2 = f(psi + 0.5 * h * k1)
        k3 = f(psi + 0.5 * h * k2)
        k4 = f(psi + h * k3)
        psi = psi + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
    return psi


def evolve(
    H: HermitianOperator,
    state: TruncatedState,
    t: float,
    method: str = "exact",
    hbar: float = 1.0,
    max_phase_step: float = 0.02,
    max_steps: int = 1_000_000,
) -> TruncatedState:
    """Apply ``exp(-i H t / hbar)``.

    ``exact`` diagonalizes (or uses a Krylov action above the eigensolve
    budget); ``small-step`` integrates with fixed-step RK4.
    """
    _check_state(H, state)
    t = float(t)
    if not math.isfinite(t):
        raise ValueError(f"evolution time must be finite, got {t}")
    _check_budget(H.dimension, MAX_EVOLVE_DIM, "evolution")
    psi = np.array(state.amplitudes)
    if t == 0.0:
        out = psi
    elif method == "exact":
        if H.dimension <= MAX_EIGEN_DIM:
            energies, vecs = scipy.linalg.eigh(H.dense())
            out = vecs @ (np.exp(-1j * energies * t / hbar) * (vecs.conj().T @ psi))
        else:
            out = expm_multiply((-1j * t / hbar) * H.matrix.tocsc(), psi)
    elif method == "small-step":
        out = _rk4(H.matrix, psi, t, hbar, max_phase_step, max_steps)
    else:
        raise ValueError(f"unknown method {method!r}; use 'exact' or 'small-step'")
    if not np.all(np.isfinite(out)):
        raise NumericError("evolution produced non-finite amplitudes")
    return TruncatedState(state.mode_count, state.cutoff, out, state.truncation_tail)


def ground_state_diagnostic(
    p: WuAustinParams,
    cutoffs,
    hbar: float = 1.0,
) -> list[tuple[int, float]]:
    """Lowest eigenvalue of the truncated Wu-Austin operator per cutoff.

    Nonzero alpha or beta couplings make the series fall without bound as
    the cutoff grows.
    """
    cutoffs = [int(c) for c in cutoffs]
    for c in cutoffs:
        _check_budget(c**p.mode_count, MAX_EIGEN_DIM, f"eigensolve at cutoff {c}")
    rows = []
    for c in cutoffs:
        H = build_wu_austin(p, c, hbar=hbar, max_dim=MAX_EIGEN_DIM)
        rows.append((c, float(scipy.linalg.eigvalsh(H.dense())[0])))
    return rows
