#!/usr/bin/env python3
"""Benchmark the jitted kernels against the pure-Python fallback.

Run with no arguments to time both backends (each in a fresh subprocess, since
the backend is fixed at import) and print a comparison table:

    python3 benchmarks/bench_kernels.py

The workload covers the three hot paths: acrobot episodes (recurrent nets),
lander episodes (feedforward nets), and greedy modularity maximization.
"""

import json
import os
import subprocess
import sys
import time

REPEATS = {"acrobot_episodes": 30, "lunar_episodes": 30, "greedy_q": 5}


def workload() -> dict:
    import numpy as np

    from neatlab.accel import backend_name
    from neatlab.envs import ACROBOT, LUNAR_LANDER_LITE, run_episode
    from neatlab.genome import InnovationRegistry
    from neatlab.graphmod import UndirectedGraph, approx_max_q
    from neatlab.neat import NeatConfig, init_population, mutate
    from neatlab.nets import build_feedforward, build_recurrent
    from neatlab.rng import generator

    rng = generator(7)
    registry = InnovationRegistry()
    acro_genome = init_population(6, 3, 2, registry, rng)[0]
    lunar_genome = init_population(8, 2, 2, registry, rng)[0]
    cfg = NeatConfig(add_node_rate=0.9, add_connection_rate=0.9)
    for _ in range(10):  # grow some topology so nets are realistic
        acro_genome = mutate(acro_genome, cfg, registry, rng)
        lunar_genome = mutate(lunar_genome, cfg, registry, rng)

    graph_rng = np.random.default_rng(3)
    graphs = []
    while len(graphs) < 20:
        n = 25
        edges = [(i, j) for i in range(n) for j in range(i + 1, n)
                 if graph_rng.random() < 0.15]
        if edges:
            graphs.append(UndirectedGraph(n, edges))

    def time_case(fn, repeats):
        fn()  # warm-up triggers JIT compilation; excluded from timing
        start = time.perf_counter()
        for _ in range(repeats):
            fn()
        return (time.perf_counter() - start) / repeats

    acro_net = build_recurrent(acro_genome)
    lunar_net = build_feedforward(lunar_genome)
    results = {
        "backend": backend_name(),
        "acrobot_episodes": time_case(lambda: run_episode(acro_net, ACROBOT, 11),
                                      REPEATS["acrobot_episodes"]),
        "lunar_episodes": time_case(lambda: run_episode(lunar_net, LUNAR_LANDER_LITE, 12),
                                    REPEATS["lunar_episodes"]),
        "greedy_q": time_case(lambda: [approx_max_q(g) for g in graphs],
                              REPEATS["greedy_q"]) / len(graphs),
    }
    return results


def main():
    if os.environ.get("NEATLAB_BENCH_CHILD"):
        print(json.dumps(workload()))
        return
    rows = []
    for flag in ("1", "0"):
        env = dict(os.environ, NEATLAB_NUMBA=flag, NEATLAB_BENCH_CHILD="1")
        out = subprocess.run([sys.executable, os.path.abspath(__file__)], env=env,
                             capture_output=True, text=True, check=True)
        rows.append(json.loads(out.stdout.strip().splitlines()[-1]))
    fast, slow = rows
    print(f"{'case':<24}{fast['backend']:>14}{slow['backend']:>14}{'speedup':>10}")
    for case in ("acrobot_episodes", "lunar_episodes", "greedy_q"):
        a, b = fast[case], slow[case]
        print(f"{case:<24}{a * 1e3:>11.3f} ms{b * 1e3:>11.3f} ms{b / a:>9.1f}x")


if __name__ == "__main__":
    main()
