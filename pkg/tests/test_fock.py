import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ecsteleport.errors import NormalizationError, ShapeMismatchError
from ecsteleport.fock import (
    ModeOperator,
    TruncatedState,
    annihilation,
    apply_operators,
    apply_to_mode,
    coherent_overlap,
    coherent_state,
    coherent_tail,
    creation,
    decode_index,
    encode_index,
    fidelity,
    fock_state,
    identity,
    inner_product,
    number_operator,
    phase_shift,
    tensor_product,
    vacuum,
)

from oracles import poisson_vector

E_MINUS_2 = 0.1353352832366127
E_MINUS_4 = 0.01831563888873418

small_complex = st.complex_numbers(max_magnitude=1.5, allow_nan=False, allow_infinity=False)


# -- construction ---------------------------------------------------------------


def test_fock_state_amplitude_and_index():
    s = fock_state([1, 2], 4)
    assert s.amplitudes[encode_index([1, 2], 4)] == 1
    assert s.amplitudes.sum() == 1
    assert s.amplitude((1, 2)) == 1


def test_vacuum_tensor_vacuum():
    s = tensor_product([vacuum(5), vacuum(5)])
    assert s.amplitude((0, 0)) == 1
    assert np.count_nonzero(s.amplitudes) == 1


def test_coherent_state_matches_poisson_profile():
    z = 0.8 - 0.3j
    ref = poisson_vector(z, 20)
    ref /= np.linalg.norm(ref)
    np.testing.assert_allclose(coherent_state(z, 20).amplitudes, ref, atol=1e-14)


def test_coherent_tail_is_mass_above_cutoff():
    z, d = 1.3, 6
    mean = abs(z) ** 2
    expected = 1 - sum(math.exp(-mean) * mean**n / math.factorial(n) for n in range(d))
    assert coherent_tail(z, d) == pytest.approx(expected, rel=1e-10)
    assert coherent_state(z, d).truncation_tail == pytest.approx(expected, rel=1e-10)
    assert coherent_tail(0, 3) == 0.0


def test_product_of_coherent_states_is_normalized():
    s = tensor_product([coherent_state(1.0, 20), coherent_state(1.0, 20)])
    assert abs(s.norm() - 1) <= 1e-12


def test_two_mode_cross_overlap():
    a = tensor_product([coherent_state(1, 20), coherent_state(-1, 20)])
    b = tensor_product([coherent_state(-1, 20), coherent_state(1, 20)])
    assert abs(inner_product(a, b)) == pytest.approx(E_MINUS_4, abs=1e-8)


def test_state_is_immutable():
    s = coherent_state(0.5, 5)
    with pytest.raises(ValueError):
        s.amplitudes[0] = 0


def test_from_tensor_round_trip():
    s = tensor_product([coherent_state(0.4, 5), fock_state(2, 5)])
    assert np.array_equal(TruncatedState.from_tensor(s.tensor).amplitudes, s.amplitudes)


# -- inner product and fidelity -----------------------------------------------------


def test_inner_product_closed_form():
    assert inner_product(coherent_state(1, 20), coherent_state(-1, 20)).real == pytest.approx(E_MINUS_2, abs=1e-8)


def test_inner_product_orthogonal_fock():
    assert inner_product(fock_state(1, 5), fock_state(2, 5)) == 0


def test_inner_product_conjugate_linear_in_first():
    s, t = coherent_state(0.3 + 0.2j, 10), coherent_state(-0.5, 10)
    c = 0.7 - 1.1j
    assert inner_product(s.scaled(c), t) == pytest.approx(c.conjugate() * inner_product(s, t), abs=1e-14)


def test_inner_product_shape_mismatch():
    with pytest.raises(ShapeMismatchError):
        inner_product(vacuum(4), vacuum(5))
    with pytest.raises(ShapeMismatchError):
        inner_product(vacuum(4, 1), vacuum(4, 2))


def test_fidelity_values():
    s = coherent_state(0.6 + 0.1j, 15)
    assert fidelity(s, s) == pytest.approx(1, abs=1e-12)
    assert fidelity(s, s.scaled(cmath.exp(0.73j))) == pytest.approx(1, abs=1e-12)
    assert fidelity(coherent_state(1, 25), coherent_state(-1, 25)) == pytest.approx(E_MINUS_4, abs=1e-8)


def test_fidelity_rejects_unnormalized():
    s = coherent_state(0.5, 10)
    with pytest.raises(NormalizationError):
        fidelity(s.scaled(2), s)


@settings(max_examples=60, deadline=None)
@given(small_complex, small_complex)
def test_overlap_law(z, w):
    got = inner_product(coherent_state(z, 25), coherent_state(w, 25))
    expected = cmath.exp(-abs(z) ** 2 / 2 - abs(w) ** 2 / 2 + z.conjugate() * w)
    assert abs(got - expected) <= 1e-8
    assert abs(coherent_overlap(z, w) - expected) <= 1e-14


@settings(max_examples=40, deadline=None)
@given(small_complex, small_complex)
def test_fidelity_symmetric(z, w):
    a, b = coherent_state(z, 20), coherent_state(w, 20)
    assert fidelity(a, b) == pytest.approx(fidelity(b, a), abs=1e-14)
    assert 0 <= fidelity(a, b) <= 1


# -- operators ----------------------------------------------------------------------


def test_ladder_matrices():
    a = annihilation(4).entries
    np.testing.assert_array_equal(np.diag(a, 1), np.sqrt([1, 2, 3]))
    np.testing.assert_array_equal(creation(4).entries, a.T)
    np.testing.assert_array_equal(np.diag(number_operator(4).entries), [0, 1, 2, 3])
    assert annihilation(4).adjoint().entries.tolist() == creation(4).entries.tolist()


def test_identity_apply_is_bitwise():
    s = tensor_product([coherent_state(0.3j, 6), coherent_state(-0.4, 6)])
    out = apply_to_mode(identity(6), 1, s)
    assert np.array_equal(out.amplitudes, s.amplitudes)


def test_annihilation_on_mode_zero():
    out = apply_to_mode(annihilation(4), 0, fock_state([1, 0], 4))
    assert np.array_equal(out.amplitudes, fock_state([0, 0], 4).amplitudes)


def test_number_operator_on_mode_one():
    s = fock_state([0, 3], 5)
    out = apply_to_mode(number_operator(5), 1, s)
    np.testing.assert_array_equal(out.amplitudes, 3 * s.amplitudes)


def test_apply_to_mode_errors():
    s = vacuum(4, 2)
    with pytest.raises(IndexError):
        apply_to_mode(identity(4), 2, s)
    with pytest.raises(ShapeMismatchError):
        apply_to_mode(identity(5), 0, s)


def test_phase_shift_zero_is_identity():
    np.testing.assert_array_equal(phase_shift(0.0, 7).entries, identity(7).entries)


def test_phase_shift_minus_pi_entries_are_exact_signs():
    np.testing.assert_array_equal(np.diag(phase_shift(-math.pi, 6).entries), [1, -1, 1, -1, 1, -1])


def test_phase_shift_maps_z_to_minus_z():
    out = apply_to_mode(phase_shift(-math.pi, 25), 0, coherent_state(0.7, 25))
    assert fidelity(out, coherent_state(-0.7, 25)) >= 1 - 1e-10


def test_phase_shift_twice_is_identity():
    s = coherent_state(0.9 - 0.2j, 20)
    U = phase_shift(-math.pi, 20)
    out = apply_to_mode(U, 0, apply_to_mode(U, 0, s))
    assert fidelity(out, s) >= 1 - 1e-12


def test_operator_product_and_unitarity():
    op = phase_shift(0.3, 5) @ phase_shift(0.4, 5)
    np.testing.assert_allclose(op.entries, phase_shift(0.7, 5).entries, atol=1e-15)
    assert op.is_unitary()
    assert not annihilation(5).is_unitary()
    assert isinstance(op, ModeOperator)


@settings(max_examples=50, deadline=None)
@given(st.floats(-10, 10), small_complex)
def test_phase_shift_preserves_norm(theta, z):
    out = apply_to_mode(phase_shift(theta, 20), 0, coherent_state(z, 20))
    assert abs(out.norm() - 1) <= 1e-12


@settings(max_examples=30, deadline=None)
@given(st.floats(-4, 4), st.floats(-4, 4), st.integers(0, 2), st.integers(0, 2))
def test_apply_to_mode_commutes_across_modes(t1, t2, i, j):
    if i == j:
        return
    d = 5
    s = tensor_product([coherent_state(0.3, d), coherent_state(-0.5j, d), fock_state(2, d)])
    P = phase_shift(t1, d) @ creation(d)
    Q = annihilation(d) @ phase_shift(t2, d)
    ij = apply_to_mode(Q, j, apply_to_mode(P, i, s))
    ji = apply_to_mode(P, i, apply_to_mode(Q, j, s))
    np.testing.assert_allclose(ij.amplitudes, ji.amplitudes, atol=1e-12)
    both = apply_operators({i: P, j: Q}, s)
    np.testing.assert_allclose(both.amplitudes, ij.amplitudes, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), st.integers(1, 4), st.data())
def test_index_round_trip(d, m, data):
    k = data.draw(st.integers(0, d**m - 1))
    occ = decode_index(k, d, m)
    assert len(occ) == m and all(0 <= n < d for n in occ)
    assert encode_index(occ, d) == k


def test_index_round_trip_exhaustive_small():
    for d, m in [(2, 3), (3, 2), (4, 3)]:
        assert [encode_index(decode_index(k, d, m), d) for k in range(d**m)] == list(range(d**m))


def test_mixed_radix_order_is_first_mode_slowest():
    assert decode_index(5, 4, 2) == (1, 1)
    assert encode_index((2, 3), 4) == 11


# -- eigenvalue property ------------------------------------------------------------


def _eigen_residual(z, d):
    s = coherent_state(z, d)
    out = apply_to_mode(annihilation(d), 0, s)
    return float(np.linalg.norm(out.amplitudes - z * s.amplitudes)), s


@pytest.mark.parametrize("z", [0.5, 1.0, 1.5 - 0.5j, 2.0])
@pytest.mark.parametrize("d", [20, 25, 30])
def test_eigen_residual_exact_value(z, d):
    # truncation drops only the last amplitude's image: ||a s - z s|| = |z| |c_{d-1}|
    residual, s = _eigen_residual(z, d)
    assert residual == pytest.approx(abs(z) * abs(s.amplitudes[-1]), rel=1e-9, abs=1e-15)
    # bound expressed through the tail at cutoff d-1
    assert residual <= abs(z) * math.sqrt(coherent_tail(z, d - 1)) * (1 + 1e-9) + 1e-15


def test_eigen_residual_exceeds_ten_times_tail():
    # documented counterexample to a bound linear in the tail
    residual, s = _eigen_residual(2.0, 20)
    assert residual > 10 * s.truncation_tail
    assert residual == pytest.approx(4.07e-4, rel=1e-2)
