"""Control environments and episode evaluation.

Two natively implemented tasks:

* ``acrobot`` -- classical two-link underactuated pendulum (RK4, dt = 0.2),
  reward -1 per step, done once the tip rises above the bar. 6 observations,
  one discrete actuator decoded by argmax over 3 output nodes, recurrent
  controller, 20-episode fitness averaging.
* ``lunar-lander-lite`` -- a documented simplified planar rigid-body lander
  (constants table in :mod:`neatlab.kernels`): shaped reward toward a pad
  landing, +100 / -100 terminals, 2 continuous actuators, feedforward
  controller, 10-episode averaging.

Episode randomness is confined to initial conditions drawn from an explicit
seed, so traces are bit-reproducible from (genome, spec, seed).
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ConfigError, ContractError, SimulationError
from .nets import FeedForwardNet, RecurrentNet, build_feedforward, build_recurrent
from .rng import STREAM_EPISODE, derive, uniforms


@dataclass(frozen=True)
class EnvSpec:
    name: str
    obs_dim: int
    n_outputs: int        # network output nodes
    n_actuators: int      # actuation-accounting dimension (torque deviation needs >= 2)
    episode_limit: int
    network_kind: str     # "feedforward" | "recurrent"
    episodes_per_eval: int


ACROBOT = EnvSpec("acrobot", 6, 3, 1, 500, "recurrent", 20)
LUNAR_LANDER_LITE = EnvSpec("lunar-lander-lite", 8, 2, 2, 400, "feedforward", 10)

ENV_SPECS = {spec.name: spec for spec in (ACROBOT, LUNAR_LANDER_LITE)}

ACROBOT_CONSTANTS = {
    "m1": kernels.ACRO_M1, "m2": kernels.ACRO_M2, "l1": kernels.ACRO_L1,
    "lc1": kernels.ACRO_LC1, "lc2": kernels.ACRO_LC2, "i1": kernels.ACRO_I1,
    "i2": kernels.ACRO_I2, "g": kernels.ACRO_G, "dt": kernels.ACRO_DT,
    "max_w1": kernels.ACRO_MAX_W1, "max_w2": kernels.ACRO_MAX_W2,
}

LUNAR_CONSTANTS = {
    "gravity": kernels.LUNAR_GRAVITY, "dt": kernels.LUNAR_DT,
    "main_accel": kernels.LUNAR_MAIN_ACCEL, "side_accel": kernels.LUNAR_SIDE_ACCEL,
    "side_torque": kernels.LUNAR_SIDE_TORQUE, "side_deadzone": kernels.LUNAR_SIDE_DEADZONE,
    "pad_halfwidth": kernels.LUNAR_PAD_HALFWIDTH, "crash_speed": kernels.LUNAR_CRASH_SPEED,
    "crash_tilt": kernels.LUNAR_CRASH_TILT, "rest_speed": kernels.LUNAR_REST_SPEED,
    "ground_friction": kernels.LUNAR_GROUND_FRICTION, "fuel_main": kernels.LUNAR_FUEL_MAIN,
    "fuel_side": kernels.LUNAR_FUEL_SIDE, "x_limit": kernels.LUNAR_X_LIMIT,
    "y_limit": kernels.LUNAR_Y_LIMIT,
}


def get_env_spec(name: str) -> EnvSpec:
    try:
        return ENV_SPECS[name]
    except KeyError:
        raise ConfigError(f"unknown environment {name!r}; choose from {sorted(ENV_SPECS)}") from None


@dataclass
class EpisodeTrace:
    total_reward: float
    steps: int
    per_output_abs_actuation: tuple[float, ...]


@dataclass
class EvalResult:
    mean_reward: float
    mean_abs_actuation: tuple[float, ...]
    episodes: list[EpisodeTrace]


# --- initial conditions -------------------------------------------------------

def acrobot_reset(seed: int) -> tuple[float, float, float, float]:
    """Angles and angular velocities drawn uniform in [-0.1, 0.1)."""
    u = uniforms(seed, 4)
    return tuple(-0.1 + 0.2 * x for x in u)


def lunar_reset(seed: int) -> tuple[float, float, float, float, float, float, float, float]:
    """Start level and airborne, offset to one side of the pad, with velocity noise."""
    u = uniforms(seed, 4)
    side = 1.0 if u[0] < 0.5 else -1.0
    x = side * (kernels.LUNAR_INIT_X_MIN
                + (kernels.LUNAR_INIT_X_MAX - kernels.LUNAR_INIT_X_MIN) * u[1])
    vx = -kernels.LUNAR_INIT_V + 2.0 * kernels.LUNAR_INIT_V * u[2]
    vy = -kernels.LUNAR_INIT_V + 2.0 * kernels.LUNAR_INIT_V * u[3]
    return (x, kernels.LUNAR_INIT_Y, vx, vy, 0.0, 0.0, 0.0, 0.0)


# --- single-step APIs (replay, tests, non-canonical pairings) -------------------

def acrobot_step(state, torque: float):
    """(state, torque in {-1, 0, 1}) -> (state', reward, done)."""
    th1, th2, w1, w2 = (float(v) for v in state)
    if not all(math.isfinite(v) for v in (th1, th2, w1, w2)):
        raise SimulationError("acrobot stepped from a non-finite state")
    if torque not in (-1.0, 0.0, 1.0, -1, 0, 1):
        raise ContractError(f"acrobot torque must be -1, 0 or 1, got {torque}")
    th1, th2, w1, w2, reward, done = kernels.acrobot_step_core(th1, th2, w1, w2, float(torque))
    return (th1, th2, w1, w2), reward, bool(done)


def acrobot_obs(state) -> np.ndarray:
    th1, th2, w1, w2 = state
    return np.array([math.cos(th1), math.sin(th1), math.cos(th2), math.sin(th2), w1, w2])


def lunar_step(state, action,
               fuel_main: float = kernels.LUNAR_FUEL_MAIN,
               fuel_side: float = kernels.LUNAR_FUEL_SIDE):
    """(state, action in [-1, 1]^2) -> (state', reward, done).

    State is (x, y, vx, vy, th, om, contact_left, contact_right). The fuel-cost
    weights are exposed so the shaping-telescoping property can be checked with
    them zeroed.
    """
    vals = tuple(float(v) for v in state)
    if not all(math.isfinite(v) for v in vals):
        raise SimulationError("lander stepped from a non-finite state")
    a0, a1 = float(action[0]), float(action[1])
    out = kernels.lunar_step_core(*vals, a0, a1, fuel_main, fuel_side)
    new_state, reward, done = out[:8], out[8], out[9]
    return new_state, reward, int(done)


def lunar_obs(state) -> np.ndarray:
    return np.asarray(state, dtype=np.float64)


def decode_acrobot_action(outputs) -> float:
    """Argmax over the 3 output nodes -> torque in {-1, 0, 1}; ties to lowest index."""
    best = 0
    for i in range(1, len(outputs)):
        if outputs[i] > outputs[best]:
            best = i
    return float(best - 1)


# --- episode execution ----------------------------------------------------------

def _check_net(net, spec: EnvSpec):
    if net.n_inputs != spec.obs_dim or net.n_outputs != spec.n_outputs:
        raise ContractError(
            f"network arity ({net.n_inputs} in / {net.n_outputs} out) does not match "
            f"{spec.name} ({spec.obs_dim} in / {spec.n_outputs} out)")


def run_episode(net, spec: EnvSpec, episode_seed: int) -> EpisodeTrace:
    """Reset environment and recurrent state, then roll one episode.

    Uses the fused kernels for the two canonical (environment, network-kind)
    pairings and a generic Python loop otherwise.
    """
    _check_net(net, spec)
    if spec.name == "acrobot" and isinstance(net, RecurrentNet):
        th1, th2, w1, w2 = acrobot_reset(episode_seed)
        total, steps, abs_torque = kernels.acrobot_episode(
            th1, th2, w1, w2, spec.episode_limit,
            net.n_nodes, net.n_inputs, net.comp_slots, net.in_ptr, net.in_src,
            net.in_w, net.bias, net.out_slots)
        return EpisodeTrace(float(total), int(steps), (float(abs_torque),))
    if spec.name == "lunar-lander-lite" and isinstance(net, FeedForwardNet):
        x, y, vx, vy, *_ = lunar_reset(episode_seed)
        total, steps, abs_main, abs_side = kernels.lunar_episode(
            x, y, vx, vy, spec.episode_limit, kernels.LUNAR_FUEL_MAIN, kernels.LUNAR_FUEL_SIDE,
            net.n_nodes, net.n_inputs, net.comp_slots, net.in_ptr, net.in_src,
            net.in_w, net.bias, net.out_slots)
        return EpisodeTrace(float(total), int(steps), (float(abs_main), float(abs_side)))
    trace, _rows = run_episode_recorded(net, spec, episode_seed)
    return trace


def run_episode_recorded(net, spec: EnvSpec, episode_seed: int):
    """Generic step-by-step rollout; also returns (step, obs..., action..., reward) rows.

    This is the slow path behind `replay` export. Its arithmetic matches the
    fused kernels step for step.
    """
    _check_net(net, spec)
    if isinstance(net, RecurrentNet):
        net.reset()
    rows = []
    total = 0.0
    if spec.name == "acrobot":
        state = acrobot_reset(episode_seed)
        actuation = [0.0]
        for step in range(spec.episode_limit):
            obs = acrobot_obs(state)
            torque = decode_acrobot_action(net.activate(obs))
            state, reward, done = acrobot_step(state, torque)
            total += reward
            actuation[0] += abs(torque)
            rows.append((step, *obs.tolist(), torque, reward))
            if done:
                break
    elif spec.name == "lunar-lander-lite":
        state = lunar_reset(episode_seed)
        actuation = [0.0, 0.0]
        for step in range(spec.episode_limit):
            obs = lunar_obs(state)
            out = net.activate(obs)
            a0, a1 = float(out[0]), float(out[1])
            state, reward, done = lunar_step(state, (a0, a1))
            total += reward
            actuation[0] += max(a0, 0.0)
            actuation[1] += abs(a1) if abs(a1) > kernels.LUNAR_SIDE_DEADZONE else 0.0
            rows.append((step, *obs.tolist(), a0, a1, reward))
            if done:
                break
    else:
        raise ConfigError(f"no rollout implemented for environment {spec.name!r}")
    return EpisodeTrace(total, len(rows), tuple(actuation)), rows


def build_net(genome, spec: EnvSpec):
    if spec.network_kind == "recurrent":
        return build_recurrent(genome)
    return build_feedforward(genome)


def evaluate(genome, spec: EnvSpec, n_episodes: int | None = None,
             eval_seed: int = 0) -> EvalResult:
    """Average reward and per-actuator |actuation| over seeded episodes.

    The phenotype is built once; episode seeds derive deterministically from
    ``eval_seed`` so the result is a pure function of (genome, spec, seed).
    """
    if n_episodes is None:
        n_episodes = spec.episodes_per_eval
    if n_episodes < 1:
        raise ContractError("n_episodes must be >= 1")
    net = build_net(genome, spec)
    episodes = []
    reward_sum = 0.0
    actuation_sum = np.zeros(spec.n_actuators, dtype=np.float64)
    for k in range(n_episodes):
        trace = run_episode(net, spec, derive(eval_seed, STREAM_EPISODE, k))
        episodes.append(trace)
        reward_sum += trace.total_reward
        actuation_sum += np.asarray(trace.per_output_abs_actuation)
    return EvalResult(
        mean_reward=reward_sum / n_episodes,
        mean_abs_actuation=tuple(float(v) for v in actuation_sum / n_episodes),
        episodes=episodes,
    )


def evaluate_population(genomes, spec: EnvSpec, n_episodes: int | None,
                        eval_seeds, workers: int = 1) -> list[EvalResult]:
    """Evaluate many genomes, optionally across threads.

    Each evaluation is a pure function of (genome, spec, seed) and the jitted
    episode kernels release the GIL, so results and their order are identical
    for every worker count.
    """
    tasks = list(zip(genomes, eval_seeds))
    if workers <= 1 or len(tasks) < 2:
        return [evaluate(g, spec, n_episodes, s) for g, s in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda t: evaluate(t[0], spec, n_episodes, t[1]), tasks))
