"""Gate-level checks against definitions and the Kronecker-product oracle.

Ket strings in comments are binary amplitude indices, most significant
bit first, so |10> on two qubits is index 2 (qubit 1 set, qubit 0 clear).
"""

import numpy as np
import pytest

from qksvm import statevector as sv
from qksvm.errors import ConfigError
from oracles import circuit_matrix, random_circuit

INV_SQRT2 = 1.0 / np.sqrt(2.0)


def random_state(rng, n_qubits):
    amps = rng.normal(size=1 << n_qubits) + 1j * rng.normal(size=1 << n_qubits)
    amps /= np.linalg.norm(amps)
    return sv.StateVector(n_qubits, amps.astype(np.complex128))


class TestInitState:
    def test_one_qubit(self):
        state = sv.init_state(1)
        np.testing.assert_array_equal(state.amplitudes, [1, 0])

    def test_two_qubits(self):
        state = sv.init_state(2)
        np.testing.assert_array_equal(state.amplitudes, [1, 0, 0, 0])

    def test_ceiling(self):
        with pytest.raises(ConfigError):
            sv.init_state(25)
        with pytest.raises(ConfigError):
            sv.init_state(0)

    def test_configurable_ceiling(self):
        assert sv.init_state(5, max_qubits=5).n_qubits == 5
        with pytest.raises(ConfigError):
            sv.init_state(6, max_qubits=5)


class TestHadamard:
    def test_plus_state(self):
        state = sv.apply_h(sv.init_state(1), 0)
        np.testing.assert_allclose(state.amplitudes, [INV_SQRT2, INV_SQRT2], atol=1e-15)

    def test_involution_on_random_state(self):
        rng = np.random.default_rng(11)
        state = random_state(rng, 3)
        original = state.amplitudes.copy()
        for q in range(3):
            sv.apply_h(sv.apply_h(state, q), q)
        np.testing.assert_allclose(state.amplitudes, original, atol=1e-12)

    def test_qubit_one_of_two(self):
        # H on qubit 1 of |00>: (|00> + |10>)/sqrt(2), indices 0 and 2
        state = sv.apply_h(sv.init_state(2), 1)
        np.testing.assert_allclose(state.amplitudes, [INV_SQRT2, 0, INV_SQRT2, 0], atol=1e-15)

    def test_qubit_out_of_range(self):
        with pytest.raises(ValueError):
            sv.apply_h(sv.init_state(2), 2)
        with pytest.raises(ValueError):
            sv.apply_h(sv.init_state(2), -1)


class TestRz:
    def test_zero_angle_identity(self):
        rng = np.random.default_rng(5)
        state = random_state(rng, 2)
        original = state.amplitudes.copy()
        sv.apply_rz(state, 1, 0.0)
        np.testing.assert_array_equal(state.amplitudes, original)

    def test_phase_only(self):
        state = sv.apply_h(sv.init_state(1), 0)
        probs_before = np.abs(state.amplitudes) ** 2
        sv.apply_rz(state, 0, 1.234)
        np.testing.assert_allclose(np.abs(state.amplitudes) ** 2, probs_before, atol=1e-15)

    def test_inverse_composition(self):
        rng = np.random.default_rng(6)
        state = random_state(rng, 3)
        original = state.amplitudes.copy()
        sv.apply_rz(sv.apply_rz(state, 2, np.pi), 2, -np.pi)
        np.testing.assert_allclose(state.amplitudes, original, atol=1e-12)

    def test_matrix_convention(self):
        # Rz(theta) = diag(e^{-i theta/2}, e^{+i theta/2})
        theta = 0.731
        state = sv.apply_rz(sv.apply_h(sv.init_state(1), 0), 0, theta)
        expected = INV_SQRT2 * np.array([np.exp(-0.5j * theta), np.exp(0.5j * theta)])
        np.testing.assert_allclose(state.amplitudes, expected, atol=1e-15)

    def test_nonfinite_theta(self):
        with pytest.raises(ValueError):
            sv.apply_rz(sv.init_state(1), 0, np.nan)
        with pytest.raises(ValueError):
            sv.apply_rz(sv.init_state(1), 0, np.inf)


class TestRy:
    def test_pi_flips(self):
        state = sv.apply_ry(sv.init_state(1), 0, np.pi)
        np.testing.assert_allclose(state.amplitudes, [0, 1], atol=1e-12)

    def test_half_pi(self):
        state = sv.apply_ry(sv.init_state(1), 0, np.pi / 2)
        np.testing.assert_allclose(state.amplitudes, [np.cos(np.pi / 4), np.sin(np.pi / 4)], atol=1e-15)

    def test_zero_angle_identity(self):
        rng = np.random.default_rng(7)
        state = random_state(rng, 2)
        original = state.amplitudes.copy()
        sv.apply_ry(state, 0, 0.0)
        np.testing.assert_array_equal(state.amplitudes, original)

    def test_inverse_composition(self):
        rng = np.random.default_rng(8)
        state = random_state(rng, 3)
        original = state.amplitudes.copy()
        sv.apply_ry(sv.apply_ry(state, 1, 0.83), 1, -0.83)
        np.testing.assert_allclose(state.amplitudes, original, atol=1e-12)


class TestCnot:
    def test_control_set_flips_target(self):
        # index 1 = |01> (control qubit 0 set): CNOT(0,1) -> index 3 = |11>
        state = sv.init_state(2)
        state.amplitudes[:] = [0, 1, 0, 0]
        sv.apply_cnot(state, 0, 1)
        np.testing.assert_array_equal(state.amplitudes, [0, 0, 0, 1])

    def test_control_clear_is_identity(self):
        state = sv.init_state(2)
        sv.apply_cnot(state, 0, 1)
        np.testing.assert_array_equal(state.amplitudes, [1, 0, 0, 0])

    def test_bell_state(self):
        state = sv.apply_h(sv.init_state(2), 0)
        sv.apply_cnot(state, 0, 1)
        np.testing.assert_allclose(state.amplitudes, [INV_SQRT2, 0, 0, INV_SQRT2], atol=1e-15)

    def test_involution(self):
        rng = np.random.default_rng(9)
        state = random_state(rng, 4)
        original = state.amplitudes.copy()
        sv.apply_cnot(sv.apply_cnot(state, 3, 1), 3, 1)
        np.testing.assert_allclose(state.amplitudes, original, atol=1e-15)

    def test_control_equals_target(self):
        with pytest.raises(ValueError):
            sv.apply_cnot(sv.init_state(2), 1, 1)


class TestInnerProduct:
    def test_self_overlap(self):
        rng = np.random.default_rng(10)
        state = random_state(rng, 3)
        assert abs(sv.inner_product(state, state) - 1.0) < 1e-12

    def test_orthogonal_basis_states(self):
        zero = sv.init_state(1)
        one = sv.apply_ry(sv.init_state(1), 0, np.pi)
        assert abs(sv.inner_product(zero, one)) < 1e-12

    def test_bell_overlap(self):
        bell = sv.apply_h(sv.init_state(2), 0)
        sv.apply_cnot(bell, 0, 1)
        assert abs(sv.inner_product(sv.init_state(2), bell) - INV_SQRT2) < 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            sv.inner_product(sv.init_state(1), sv.init_state(2))


class TestProperties:
    def test_norm_preserved_under_long_random_sequences(self):
        rng = np.random.default_rng(42)
        for trial in range(20):
            n = int(rng.integers(2, 7))
            state = random_state(rng, n)
            codes, angles = random_circuit(rng, n, 100)
            sv.apply_ops(state, codes, angles)
            assert abs(state.norm() - 1.0) < 1e-10

    def test_gate_then_inverse_restores(self):
        rng = np.random.default_rng(43)
        state = random_state(rng, 3)
        original = state.amplitudes.copy()
        theta = 1.37
        sv.apply_h(state, 0)
        sv.apply_rz(state, 1, theta)
        sv.apply_ry(state, 2, theta)
        sv.apply_cnot(state, 0, 2)
        sv.apply_cnot(state, 0, 2)
        sv.apply_ry(state, 2, -theta)
        sv.apply_rz(state, 1, -theta)
        sv.apply_h(state, 0)
        np.testing.assert_allclose(state.amplitudes, original, atol=1e-12)

    def test_oracle_equivalence_small_n(self, gate_backend):
        rng = np.random.default_rng(44)
        for trial in range(60):
            n = int(rng.integers(1, 5))
            codes, angles = random_circuit(rng, n, int(rng.integers(1, 31)))
            amps = sv.zero_amplitudes(n)
            gate_backend.apply_ops(amps, n, codes, angles)
            expected = circuit_matrix(codes, angles, n)[:, 0]
            np.testing.assert_allclose(amps, expected, atol=1e-12)


def test_backends_agree():
    from qksvm import _pure

    try:
        from qksvm import _core
    except ImportError:
        pytest.skip("compiled backend not built")
    rng = np.random.default_rng(45)
    for trial in range(20):
        n = int(rng.integers(1, 8))
        codes, angles = random_circuit(rng, n, 60)
        a = sv.zero_amplitudes(n)
        b = sv.zero_amplitudes(n)
        _pure.apply_ops(a, n, codes, angles)
        _core.apply_ops(b, n, codes, angles)
        np.testing.assert_allclose(a, b, atol=1e-14)
