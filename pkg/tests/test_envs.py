"""Environment physics, episode execution, and evaluation tests."""

import math

import numpy as np
import pytest

from neatlab import kernels
from neatlab.envs import (ACROBOT, LUNAR_LANDER_LITE, EnvSpec, acrobot_reset,
                          acrobot_step, evaluate, evaluate_population, get_env_spec,
                          lunar_reset, lunar_step, run_episode, run_episode_recorded)
from neatlab.errors import ConfigError, ContractError, SimulationError
from neatlab.genome import InnovationRegistry
from neatlab.neat import init_population
from neatlab.nets import build_feedforward, build_recurrent
from neatlab.rng import generator

from conftest import make_genome


def acrobot_energy(state):
    """Independent closed-form mechanical energy of the two-link pendulum."""
    th1, th2, w1, w2 = state
    m1 = m2 = 1.0
    l1 = 1.0
    lc1 = lc2 = 0.5
    i1 = i2 = 1.0
    g = 9.8
    d1 = m1 * lc1 ** 2 + m2 * (l1 ** 2 + lc2 ** 2 + 2 * l1 * lc2 * math.cos(th2)) + i1 + i2
    d2 = m2 * (lc2 ** 2 + l1 * lc2 * math.cos(th2)) + i2
    kinetic = 0.5 * d1 * w1 ** 2 + d2 * w1 * w2 + 0.5 * (m2 * lc2 ** 2 + i2) * w2 ** 2
    potential = -(m1 * lc1 + m2 * l1) * g * math.cos(th1) - m2 * lc2 * g * math.cos(th1 + th2)
    return kinetic + potential


def constant_net(spec: EnvSpec, value: float = 0.0):
    """Net with no connections: every output is tanh(bias) = tanh(value)."""
    g = make_genome(spec.obs_dim, spec.n_outputs, [],
                    biases={spec.obs_dim + j: value for j in range(spec.n_outputs)})
    return build_recurrent(g) if spec.network_kind == "recurrent" else build_feedforward(g)


class TestAcrobotPhysics:
    def test_hanging_rest_is_equilibrium(self):
        state, reward, done = acrobot_step((0.0, 0.0, 0.0, 0.0), 0)
        assert reward == -1.0 and not done
        assert max(abs(v) for v in state) < 1e-12

    def test_energy_conservation_zero_torque(self):
        for seed in range(10):
            state = acrobot_reset(seed)
            e0 = acrobot_energy(state)
            for _ in range(50):  # 10 simulated seconds
                state, _, _ = acrobot_step(state, 0)
                assert abs(acrobot_energy(state) - e0) / abs(e0) < 0.01

    def test_termination_predicate(self):
        # both links straight up: tip height 2 > 1 and (slowly) falling from rest
        state, _, done = acrobot_step((math.pi, 0.0, 0.0, 0.0), 0)
        assert done
        assert -math.cos(state[0]) - math.cos(state[0] + state[1]) > 1.0

    def test_velocity_clamps(self):
        state = (0.1, 0.2, 12.0, 28.0)
        for _ in range(5):
            state, _, _ = acrobot_step(state, 1)
        assert abs(state[2]) <= kernels.ACRO_MAX_W1 + 1e-12
        assert abs(state[3]) <= kernels.ACRO_MAX_W2 + 1e-12

    def test_bad_torque_rejected(self):
        with pytest.raises(ContractError):
            acrobot_step((0.0, 0.0, 0.0, 0.0), 0.5)

    def test_non_finite_state_rejected(self):
        with pytest.raises(SimulationError):
            acrobot_step((math.nan, 0.0, 0.0, 0.0), 0)

    def test_reset_noise_range(self):
        for seed in range(20):
            state = acrobot_reset(seed)
            assert all(-0.1 <= v < 0.1 for v in state)


class TestLunarPhysics:
    def test_zero_action_ballistic(self):
        s = (0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
        s2, _, done = lunar_step(s, (-1.0, 0.0))
        assert not done
        assert s2[3] == pytest.approx(kernels.LUNAR_GRAVITY * kernels.LUNAR_DT, abs=1e-12)
        assert s2[2] == 0.0 and s2[4] == 0.0 and s2[5] == 0.0

    def test_side_deadzone(self):
        s = (0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
        inside, _, _ = lunar_step(s, (-1.0, 0.4))
        none, _, _ = lunar_step(s, (-1.0, 0.0))
        assert inside == none
        outside, _, _ = lunar_step(s, (-1.0, 0.6))
        assert outside[5] != 0.0  # torque applied

    def test_gentle_pad_landing_bonus(self):
        s = (0.05, 0.001, 0.0, -0.02, 0.0, 0.0, 0.0, 0.0)
        s2, reward, done = lunar_step(s, (-1.0, 0.0))
        assert done == 1
        assert reward > kernels.LUNAR_LANDED_BONUS * 0.5  # bonus dominates shaping delta

    def test_fast_impact_crashes(self):
        s = (0.0, 0.02, 0.0, -1.5, 0.0, 0.0, 0.0, 0.0)
        s2, reward, done = lunar_step(s, (-1.0, 0.0))
        assert done == 2
        assert reward < 0.0

    def test_tumble_is_crash(self):
        s = (0.0, 1.0, 0.0, 0.0, 1.6, 0.0, 0.0, 0.0)
        _, _, done = lunar_step(s, (-1.0, 0.0))
        assert done == 2

    def test_shaping_telescopes_without_fuel_costs(self):
        state = lunar_reset(3)
        phi0 = kernels.lunar_phi(state[0], state[1], state[2], state[3], state[4],
                                 state[6], state[7])
        total = 0.0
        rng = np.random.default_rng(0)
        done = 0
        for _ in range(400):
            action = (float(rng.uniform(-1, 1)), float(rng.uniform(-1, 1)))
            state, reward, done = lunar_step(state, action, fuel_main=0.0, fuel_side=0.0)
            total += reward
            if done:
                break
        terminal = {0: 0.0, 1: kernels.LUNAR_LANDED_BONUS, 2: kernels.LUNAR_CRASH_PENALTY,
                    3: 0.0}[done]
        phi1 = kernels.lunar_phi(state[0], state[1], state[2], state[3], state[4],
                                 state[6], state[7])
        assert total - terminal == pytest.approx(phi1 - phi0, abs=1e-9)

    def test_non_finite_state_rejected(self):
        with pytest.raises(SimulationError):
            lunar_step((math.inf, 1, 0, 0, 0, 0, 0, 0), (0.0, 0.0))


class TestRunEpisode:
    def test_constant_net_zero_torque_acrobot(self):
        net = constant_net(ACROBOT)  # all outputs equal: argmax -> index 0... ties
        # equal outputs tie to index 0 (torque -1); use biased outputs for torque 0
        g = make_genome(6, 3, [], biases={7: 0.9})  # middle output largest -> torque 0
        net = build_recurrent(g)
        trace = run_episode(net, ACROBOT, episode_seed=5)
        assert trace.per_output_abs_actuation == (0.0,)
        assert trace.total_reward == -500.0
        assert trace.steps == 500

    def test_trace_reproducible(self):
        genome = init_population(6, 3, 2, InnovationRegistry(), generator(8))[0]
        net = build_recurrent(genome)
        t1 = run_episode(net, ACROBOT, 123)
        net2 = build_recurrent(genome)
        t2 = run_episode(net2, ACROBOT, 123)
        assert t1 == t2

    def test_fused_kernel_matches_step_loop_acrobot(self):
        genome = init_population(6, 3, 2, InnovationRegistry(), generator(21))[0]
        fast = run_episode(build_recurrent(genome), ACROBOT, 99)
        slow, rows = run_episode_recorded(build_recurrent(genome), ACROBOT, 99)
        assert fast.total_reward == slow.total_reward
        assert fast.steps == slow.steps == len(rows)
        assert fast.per_output_abs_actuation == slow.per_output_abs_actuation

    def test_fused_kernel_matches_step_loop_lunar(self):
        genome = init_population(8, 2, 2, InnovationRegistry(), generator(22))[1]
        fast = run_episode(build_feedforward(genome), LUNAR_LANDER_LITE, 44)
        slow, rows = run_episode_recorded(build_feedforward(genome), LUNAR_LANDER_LITE, 44)
        assert fast.total_reward == slow.total_reward
        assert fast.steps == slow.steps
        assert fast.per_output_abs_actuation == slow.per_output_abs_actuation

    def test_arity_mismatch_rejected(self):
        net = constant_net(LUNAR_LANDER_LITE)
        with pytest.raises(ContractError):
            run_episode(net, ACROBOT, 0)

    def test_recorded_rows_schema(self):
        net = constant_net(LUNAR_LANDER_LITE, 0.2)
        trace, rows = run_episode_recorded(net, LUNAR_LANDER_LITE, 7)
        assert len(rows) == trace.steps
        # step, 8 obs, 2 actions, reward
        assert len(rows[0]) == 1 + 8 + 2 + 1
        assert rows[0][0] == 0


class TestEvaluate:
    def test_single_episode_mean(self):
        genome = init_population(6, 3, 2, InnovationRegistry(), generator(3))[0]
        res = evaluate(genome, ACROBOT, n_episodes=1, eval_seed=17)
        assert res.mean_reward == res.episodes[0].total_reward

    def test_default_episode_counts(self):
        genome = init_population(6, 3, 2, InnovationRegistry(), generator(3))[0]
        res = evaluate(genome, ACROBOT, eval_seed=1)
        assert len(res.episodes) == 20
        genome2 = init_population(8, 2, 2, InnovationRegistry(), generator(3))[0]
        res2 = evaluate(genome2, LUNAR_LANDER_LITE, eval_seed=1)
        assert len(res2.episodes) == 10

    def test_mean_is_arithmetic_mean(self):
        genome = init_population(8, 2, 2, InnovationRegistry(), generator(9))[0]
        res = evaluate(genome, LUNAR_LANDER_LITE, n_episodes=4, eval_seed=2)
        assert res.mean_reward == pytest.approx(
            sum(t.total_reward for t in res.episodes) / 4, abs=1e-12)

    def test_actuation_monotone_in_episode_length(self):
        genome = init_population(6, 3, 2, InnovationRegistry(), generator(31))[0]
        short_spec = EnvSpec("acrobot", 6, 3, 1, 100, "recurrent", 20)
        long_spec = EnvSpec("acrobot", 6, 3, 1, 300, "recurrent", 20)
        short = run_episode(build_recurrent(genome), short_spec, 5)
        long = run_episode(build_recurrent(genome), long_spec, 5)
        assert long.per_output_abs_actuation[0] >= short.per_output_abs_actuation[0]

    def test_n_episodes_must_be_positive(self):
        genome = init_population(6, 3, 2, InnovationRegistry(), generator(3))[0]
        with pytest.raises(ContractError):
            evaluate(genome, ACROBOT, n_episodes=0, eval_seed=1)

    def test_population_evaluation_worker_independent(self):
        reg = InnovationRegistry()
        pop = init_population(8, 2, 6, reg, generator(14))
        seeds = list(range(6))
        serial = evaluate_population(pop, LUNAR_LANDER_LITE, 3, seeds, workers=1)
        threaded = evaluate_population(pop, LUNAR_LANDER_LITE, 3, seeds, workers=3)
        assert [r.mean_reward for r in serial] == [r.mean_reward for r in threaded]
        assert [r.mean_abs_actuation for r in serial] == [r.mean_abs_actuation for r in threaded]

    def test_unknown_env_rejected(self):
        with pytest.raises(ConfigError):
            get_env_spec("cartpole")
