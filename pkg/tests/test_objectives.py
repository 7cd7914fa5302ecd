"""Torque-deviation and modularity-reward fitness tests."""

import struct

import numpy as np
import pytest

from neatlab.errors import ConfigError, ContractError
from neatlab.objectives import QImportanceConfig, modularity_reward_fitness, torque_deviation


class TestTorqueDeviation:
    def test_uniform_usage(self):
        assert torque_deviation([3.0, 3.0, 3.0, 3.0]) == 0.0

    def test_unused_actuator(self):
        assert torque_deviation([5.0, 0.0]) == 1.0

    def test_hand_computed(self):
        assert torque_deviation([4.0, 2.0, 3.0, 1.0]) == pytest.approx(0.75, abs=1e-12)

    def test_all_zero_convention(self):
        assert torque_deviation([0.0, 0.0, 0.0]) == 0.0

    def test_single_actuator_rejected(self):
        with pytest.raises(ContractError):
            torque_deviation([5.0])

    def test_negative_rejected(self):
        with pytest.raises(ContractError):
            torque_deviation([1.0, -0.5])

    def test_range(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            x = rng.uniform(0, 10, size=int(rng.integers(2, 6)))
            assert 0.0 <= torque_deviation(x) <= 1.0

    def test_scale_invariance(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            x = rng.uniform(0, 5, size=4) + 0.01
            c = float(rng.uniform(0.1, 100))
            assert torque_deviation(c * x) == pytest.approx(torque_deviation(x), abs=1e-12)


class TestModularityRewardFitness:
    def test_zero_importance_is_bitwise_identity(self):
        cfg = QImportanceConfig(0.0)
        for r in (0.0, -0.0, 1.0, -532.25, 1e300, 0.1 + 0.2):
            out = modularity_reward_fitness(r, 0.73, cfg)
            assert struct.pack("<d", out) == struct.pack("<d", r)

    def test_hand_computed_inside_bounds(self):
        cfg = QImportanceConfig(0.2, 0.0, 300.0)
        assert modularity_reward_fitness(100.0, 0.5, cfg) == pytest.approx(110.0, abs=1e-12)

    def test_hand_computed_clamped(self):
        cfg = QImportanceConfig(0.1, 0.0, 300.0)
        assert modularity_reward_fitness(400.0, 1.0, cfg) == pytest.approx(430.0, abs=1e-12)

    def test_lower_bound_applies(self):
        cfg = QImportanceConfig(0.5, 10.0, 300.0)
        # R below a: F = R + Q*I*(a + a)
        assert modularity_reward_fitness(-50.0, 1.0, cfg) == pytest.approx(-40.0, abs=1e-12)

    def test_negative_q_clamped(self):
        cfg = QImportanceConfig(0.2, 0.0, 300.0)
        assert modularity_reward_fitness(100.0, -0.4, cfg) == 100.0

    def test_monotone_in_q_and_importance(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            r = float(rng.uniform(-100, 400))
            q1, q2 = sorted(rng.uniform(0, 1, size=2))
            i1, i2 = sorted(rng.uniform(0, 0.3, size=2))
            cfg1 = QImportanceConfig(i1, 0.0, 300.0)
            cfg2 = QImportanceConfig(i2, 0.0, 300.0)
            assert modularity_reward_fitness(r, q2, cfg1) >= modularity_reward_fitness(r, q1, cfg1)
            assert modularity_reward_fitness(r, q1, cfg2) >= modularity_reward_fitness(r, q1, cfg1)

    def test_invalid_configs_rejected(self):
        with pytest.raises(ConfigError):
            QImportanceConfig(-0.1)
        with pytest.raises(ConfigError):
            QImportanceConfig(0.1, 10.0, 5.0)
