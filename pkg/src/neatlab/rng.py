"""Deterministic seed derivation.

All stochastic state in an experiment flows from one master seed through
splitmix64 mixing, so seeds are stable across platforms, process counts and
NumPy versions. Evaluation seeds are *derived by key* (run, generation,
individual index) rather than drawn from a stream, which is what makes
worker-count-independent reproducibility possible.
"""

import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _splitmix64(state: int) -> tuple[int, int]:
    """Advance a splitmix64 state; return (new_state, output)."""
    state = (state + _GOLDEN) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return state, z ^ (z >> 31)


def derive(*parts: int) -> int:
    """Fold integer key parts into one 64-bit seed.

    ``derive(master, run)``, ``derive(run_seed, STREAM_EVAL, gen, idx)`` etc.
    Distinct key tuples give independent-looking seeds; the same tuple always
    gives the same seed.
    """
    h = 0x6A09E667F3BCC909  # arbitrary fixed offset so derive() != derive(0)
    for p in parts:
        h ^= int(p) & _MASK
        h, _ = _splitmix64(h)
        _, h = _splitmix64(h)
    return h


def uniforms(seed: int, n: int) -> list[float]:
    """n deterministic floats in [0, 1) from a 64-bit seed."""
    out = []
    state = int(seed) & _MASK
    for _ in range(n):
        state, z = _splitmix64(state)
        out.append(z / 2.0**64)
    return out


def generator(seed: int) -> np.random.Generator:
    """NumPy Generator (PCG64) for the evolution-side decision stream."""
    return np.random.Generator(np.random.PCG64(int(seed) & _MASK))


# Stream tags keep seed keys from colliding across uses of the same run seed.
STREAM_INIT = 1
STREAM_EVOLVE = 2
STREAM_EVAL = 3
STREAM_EPISODE = 4
