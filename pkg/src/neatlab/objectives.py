"""Scalar objectives: torque-output deviation and modularity-augmented fitness."""

from dataclasses import dataclass

from .errors import ConfigError, ContractError


@dataclass(frozen=True)
class QImportanceConfig:
    """Modularity-reward knobs: importance I and the (a, b) fitness clamp bounds."""

    importance: float
    lower_bound: float = 0.0    # a
    upper_bound: float = 300.0  # b

    def __post_init__(self):
        if self.importance < 0:
            raise ConfigError("q-importance must be >= 0")
        if self.lower_bound > self.upper_bound:
            raise ConfigError("lower fitness bound exceeds upper bound")


def torque_deviation(mean_abs_actuation) -> float:
    """Range-rule deviation from uniform actuator usage: (max - min) / max in [0, 1].

    0 means all actuators applied the same total |actuation|; 1 means at least
    one actuator was never used. All-zero usage is 0 by convention. Undefined
    (and an error) for fewer than two actuators.
    """
    x = [float(v) for v in mean_abs_actuation]
    if len(x) < 2:
        raise ContractError("torque deviation needs at least two actuators")
    if any(v < 0 for v in x):
        raise ContractError("actuation totals must be nonnegative")
    top = max(x)
    if top == 0.0:
        return 0.0
    return (top - min(x)) / top


def modularity_reward_fitness(reward: float, q: float, cfg: QImportanceConfig) -> float:
    """F = R + Q * I * (min{max{R, a}, b} + a).

    Q is clamped into [0, 1] first (degenerate graphs can report q < 0 upstream
    conventions aside). With I = 0 this returns R bit-exactly, so an I = 0
    pipeline is indistinguishable from plain reward selection.
    """
    if cfg.importance == 0.0:
        return float(reward)
    q = min(max(float(q), 0.0), 1.0)
    clamped = min(max(float(reward), cfg.lower_bound), cfg.upper_bound)
    return float(reward) + q * cfg.importance * (clamped + cfg.lower_bound)
