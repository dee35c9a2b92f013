"""Feature-map layout pinned against the explicit matrix-product oracle."""

import numpy as np
import pytest

from qksvm import statevector as sv
from qksvm.featuremap import FeatureMapConfig, circuit_for, encode, inverse_ops
from oracles import circuit_matrix


def oracle_encode(x, cfg):
    circuit = circuit_for(cfg.n_qubits, cfg.d, cfg.n_layers)
    u = circuit_matrix(circuit.codes, circuit.angles(np.asarray(x, dtype=np.float64)), cfg.n_qubits)
    return u[:, 0]


class TestConfig:
    def test_defaults(self):
        cfg = FeatureMapConfig(5)
        assert (cfg.d, cfg.n_layers) == (3, 2)

    @pytest.mark.parametrize("kwargs", [{"n_qubits": 0}, {"n_qubits": 3, "d": 0}, {"n_qubits": 3, "n_layers": 0}])
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            FeatureMapConfig(**kwargs)


class TestEncode:
    @pytest.mark.parametrize("n", [2, 4, 8])
    def test_all_zero_features_give_zero_state(self, n):
        state = encode(np.zeros(n), FeatureMapConfig(n))
        expected = np.zeros(1 << n)
        expected[0] = 1.0
        np.testing.assert_allclose(state.amplitudes, expected, atol=1e-12)

    def test_all_zero_matches_oracle(self):
        cfg = FeatureMapConfig(3)
        np.testing.assert_allclose(
            encode(np.zeros(3), cfg).amplitudes, oracle_encode(np.zeros(3), cfg), atol=1e-12
        )

    def test_deterministic(self):
        rng = np.random.default_rng(0)
        x = rng.uniform(-1, 1, 5)
        cfg = FeatureMapConfig(5)
        a = encode(x, cfg).amplitudes
        b = encode(x, cfg).amplitudes
        np.testing.assert_array_equal(a, b)

    def test_matches_oracle_n3(self):
        rng = np.random.default_rng(1)
        cfg = FeatureMapConfig(3)
        for _ in range(25):
            x = rng.uniform(-1, 1, 3)
            np.testing.assert_allclose(encode(x, cfg).amplitudes, oracle_encode(x, cfg), atol=1e-12)

    @pytest.mark.parametrize("n", [1, 2, 4])
    @pytest.mark.parametrize("d,layers", [(3, 2), (1, 1), (2, 3)])
    def test_matches_oracle_other_shapes(self, n, d, layers):
        rng = np.random.default_rng(n * 10 + d + layers)
        cfg = FeatureMapConfig(n, d=d, n_layers=layers)
        for _ in range(5):
            x = rng.uniform(-1, 1, n)
            np.testing.assert_allclose(encode(x, cfg).amplitudes, oracle_encode(x, cfg), atol=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            encode(np.zeros(3), FeatureMapConfig(4))

    def test_out_of_range_feature(self):
        with pytest.raises(ValueError):
            encode(np.array([0.0, 1.2, 0.0]), FeatureMapConfig(3))

    def test_nan_feature(self):
        with pytest.raises(ValueError):
            encode(np.array([0.0, np.nan]), FeatureMapConfig(2))


class TestProperties:
    @pytest.mark.parametrize("n", [2, 4, 8])
    def test_unit_norm(self, n):
        rng = np.random.default_rng(n)
        cfg = FeatureMapConfig(n)
        for _ in range(100):
            state = encode(rng.uniform(-1, 1, n), cfg)
            assert abs(state.norm() - 1.0) < 1e-10

    def test_continuity_in_one_feature(self):
        rng = np.random.default_rng(3)
        cfg = FeatureMapConfig(4)
        x = rng.uniform(-0.9, 0.9, 4)
        base = encode(x, cfg).amplitudes
        for k in range(4):
            bumped = x.copy()
            bumped[k] += 1e-8
            delta = np.linalg.norm(encode(bumped, cfg).amplitudes - base)
            assert delta < 1e-6

    def test_layer_structure(self):
        # one layer of the n=2 map: H, H, Rz(x0), Ry(x0^3), Rz(x1), Ry(x1^3),
        # then the single pair block CNOT(0,1), Rz_1(mean^3), CNOT(0,1)
        cfg = FeatureMapConfig(2, n_layers=1)
        x = np.array([0.4, -0.7])
        state = sv.init_state(2)
        sv.apply_h(state, 0)
        sv.apply_h(state, 1)
        sv.apply_rz(state, 0, x[0])
        sv.apply_ry(state, 0, x[0] ** 3)
        sv.apply_rz(state, 1, x[1])
        sv.apply_ry(state, 1, x[1] ** 3)
        sv.apply_cnot(state, 0, 1)
        sv.apply_rz(state, 1, ((x[0] + x[1]) / 2.0) ** 3)
        sv.apply_cnot(state, 0, 1)
        np.testing.assert_allclose(encode(x, cfg).amplitudes, state.amplitudes, atol=1e-14)

    def test_pair_blocks_scheduled_even_k_first(self):
        codes = circuit_for(5, 3, 1).codes
        cnot_targets = [int(b) for code, a, b in codes if code == 3]
        # pairs (k-1, k) appear twice each (CNOT before and after the phase)
        assert cnot_targets == [2, 2, 4, 4, 1, 1, 3, 3]

    def test_inverse_restores_zero_state(self):
        rng = np.random.default_rng(4)
        cfg = FeatureMapConfig(6)
        circuit = circuit_for(cfg.n_qubits, cfg.d, cfg.n_layers)
        x = rng.uniform(-1, 1, 6)
        state = encode(x, cfg)
        inv_codes, inv_angles = inverse_ops(circuit, x)
        sv.apply_ops(state, inv_codes, inv_angles)
        expected = np.zeros(1 << 6)
        expected[0] = 1.0
        np.testing.assert_allclose(state.amplitudes, expected, atol=1e-12)
