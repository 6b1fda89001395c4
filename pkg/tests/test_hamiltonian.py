import cmath
import math

import numpy as np
import pytest
import scipy.linalg

from ecsteleport.errors import BudgetError, NumericError, ShapeMismatchError
from ecsteleport.fock import coherent_state, encode_index, fidelity, fock_state, tensor_product
from ecsteleport.hamiltonian import (
    PokornyWuParams,
    WuAustinParams,
    build_pokorny_wu,
    build_wu_austin,
    evolve,
    ground_state_diagnostic,
    word_matrix,
)

SAMPLE = WuAustinParams(omegas=(0.1,), Omegas=(1.0,), beta=0.5)


def test_word_matrix_compression():
    a = word_matrix("a", 4).toarray()
    np.testing.assert_array_equal(np.diag(a, 1), np.sqrt([1, 2, 3]))
    np.testing.assert_allclose(np.diag(word_matrix("+a", 4).toarray()), [0, 1, 2, 3], atol=1e-15)
    # a a^dagger keeps the top level at n + 1 = 4 rather than 0
    np.testing.assert_allclose(np.diag(word_matrix("a+", 4).toarray()), [1, 2, 3, 4], atol=1e-15)


def test_uncoupled_spectrum():
    H = build_wu_austin(WuAustinParams(omegas=(1.0,)), 4)
    np.testing.assert_allclose(np.linalg.eigvalsh(H.dense()), [0, 1, 2, 3], atol=1e-15)


def test_gamma_matrix_element():
    g = 0.3 - 0.2j
    d = 3
    H = build_wu_austin(WuAustinParams(omegas=(1.0,), OmegaPrimes=(1.0,), gamma=g), d).dense()
    # a c^dagger moves one quantum from the system into the field
    assert H[encode_index((0, 1), d), encode_index((1, 0), d)] == pytest.approx(g, abs=1e-15)
    assert H[encode_index((1, 0), d), encode_index((0, 1), d)] == pytest.approx(g.conjugate(), abs=1e-15)


def test_sigma_matrix_element():
    s = 0.25
    base = WuAustinParams(omegas=(0.0,))
    H = build_pokorny_wu(PokornyWuParams(base, sigma=s), 3).dense()
    # <1| a^dagger a a |2> = sqrt(2)
    assert H[1, 2] == pytest.approx(s * math.sqrt(2), abs=1e-15)
    assert H[2, 1] == pytest.approx(s * math.sqrt(2), abs=1e-15)


def test_pokorny_wu_power_limit():
    with pytest.raises(ValueError):
        build_pokorny_wu(PokornyWuParams(WuAustinParams(omegas=(1.0,)), sigma=1, m=3), 3)
    with pytest.raises(ValueError):
        PokornyWuParams(WuAustinParams(omegas=(1.0,)), m=0)


@pytest.mark.parametrize(
    "params",
    [
        SAMPLE,
        WuAustinParams(omegas=(1.0, 0.5), Omegas=(0.7,), OmegaPrimes=(0.2,), gamma=0.1 + 0.2j, alpha=0.3j, beta=0.4),
        WuAustinParams(omegas=(1.0,), Omegas=(1.0, 2.0), alpha=np.array([[[0.1, 0.2j], [0.3, 0.4]]])),
    ],
)
def test_exact_hermiticity(params):
    H = build_wu_austin(params, 3)
    assert H.hermiticity_error() == 0.0


def test_pokorny_wu_hermitian():
    base = WuAustinParams(omegas=(1.0, 0.3), Omegas=(0.5,), OmegaPrimes=(0.4,))
    H = build_pokorny_wu(PokornyWuParams(base, phi=0.2, zeta=0.1j, sigma=0.3, rho=0.1 - 0.1j, xi=0.05, m=1, n=2), 4)
    assert H.hermiticity_error() <= 1e-14


def test_coupling_shape_validated():
    with pytest.raises(ValueError):
        build_wu_austin(WuAustinParams(omegas=(1.0,), Omegas=(1.0,), alpha=np.ones((2, 2, 2))), 3)


def test_negative_frequency_rejected():
    with pytest.raises(ValueError):
        WuAustinParams(omegas=(-1.0,))


def test_budget_refusal():
    with pytest.raises(BudgetError):
        build_wu_austin(WuAustinParams(omegas=(1.0,) * 6), 10)


def test_ground_state_series_frozen():
    rows = ground_state_diagnostic(SAMPLE, [2, 3, 4, 5])
    np.testing.assert_allclose(
        [e for _, e in rows], [-0.5180339887498949, -1.425453320945705, -2.7, -4.315555516053097], atol=1e-12
    )
    # cutoff 2: 0.1 - (sqrt(5) - 1) / 2
    assert rows[0][1] == pytest.approx(0.1 - (math.sqrt(5) - 1) / 2, abs=1e-14)


@pytest.mark.parametrize(
    "params",
    [
        SAMPLE,
        WuAustinParams(omegas=(1.0,), Omegas=(1.0,), beta=0.3),
        WuAustinParams(omegas=(1.0,), Omegas=(1.0, 1.0), alpha=0.3),
    ],
)
def test_ground_state_non_increasing(params):
    energies = [e for _, e in ground_state_diagnostic(params, [2, 3, 4, 5])]
    assert all(b <= a + 1e-12 for a, b in zip(energies, energies[1:]))


def test_free_ground_state_is_zero():
    rows = ground_state_diagnostic(WuAustinParams(omegas=(1.0,), Omegas=(2.0,)), [2, 3, 4])
    assert [e for _, e in rows] == pytest.approx([0, 0, 0], abs=1e-15)


# -- evolution ----------------------------------------------------------------------


def test_uncoupled_evolution_factorizes():
    d, t = 10, 1.7
    w1, w2 = 1.0, 0.4
    H = build_wu_austin(WuAustinParams(omegas=(w1,), Omegas=(w2,)), d)
    z1, z2 = 0.6, 0.3j
    state = tensor_product([coherent_state(z1, d), coherent_state(z2, d)])
    out = evolve(H, state, t)
    ref = tensor_product([coherent_state(z1 * cmath.exp(-1j * w1 * t), d), coherent_state(z2 * cmath.exp(-1j * w2 * t), d)])
    np.testing.assert_allclose(out.amplitudes, ref.amplitudes, atol=1e-12)


def test_methods_agree_and_conserve():
    H = build_wu_austin(SAMPLE, 5)
    state = fock_state([1, 0], 5)
    e0 = H.expectation(state)
    exact = evolve(H, state, 3.0, method="exact")
    rk = evolve(H, state, 3.0, method="small-step")
    assert fidelity(exact, rk.normalized()) >= 1 - 1e-8
    assert abs(H.expectation(exact) - e0) <= 1e-8
    assert abs(H.expectation(rk) - e0) <= 1e-8
    assert abs(exact.norm() - 1) <= 1e-12


def test_exact_matches_scipy_expm():
    H = build_wu_austin(WuAustinParams(omegas=(1.0, 0.5), Omegas=(0.7,), beta=0.2, alpha=0.1), 3)
    state = fock_state([1, 1, 0], 3)
    U = scipy.linalg.expm(-1j * 0.9 * H.dense())
    np.testing.assert_allclose(evolve(H, state, 0.9).amplitudes, U @ state.amplitudes, atol=1e-12)


def test_hbar_scales_time():
    H = build_wu_austin(SAMPLE, 4)
    s = fock_state([1, 1], 4)
    np.testing.assert_allclose(evolve(H, s, 2.0, hbar=2.0).amplitudes, evolve(H, s, 1.0).amplitudes, atol=1e-12)


def test_evolve_zero_time_and_errors():
    H = build_wu_austin(SAMPLE, 4)
    s = fock_state([1, 0], 4)
    assert np.array_equal(evolve(H, s, 0.0).amplitudes, s.amplitudes)
    with pytest.raises(ShapeMismatchError):
        evolve(H, fock_state([1, 0], 5), 1.0)
    with pytest.raises(ValueError):
        evolve(H, s, 1.0, method="magic")
    with pytest.raises(ValueError):
        evolve(H, s, math.inf)
    with pytest.raises(NumericError):
        evolve(H, s, 1e6, method="small-step", max_steps=1000)


def test_gamma_element_cutoff_two_zero_frequencies():
    H = build_wu_austin(WuAustinParams(omegas=(0.0,), OmegaPrimes=(0.0,), gamma=1.0), 2).dense()
    expected = np.zeros((4, 4), dtype=complex)
    expected[1, 2] = expected[2, 1] = 1.0  # |0,1> <-> |1,0>
    np.testing.assert_array_equal(H, expected)
