"""Genome inspection: structure counts, modularity partition, optional evaluation."""

from .envs import evaluate, get_env_spec
from .errors import ZeroEdgeGraphError
from .genome import Genome, load_genome
from .graphmod import approx_max_q, genome_to_graph
from .objectives import torque_deviation


def analyze_genome(path, env: str | None = None, episodes: int | None = None,
                   eval_seed: int = 0) -> str:
    """Human-readable report for a saved genome file."""
    genome, metadata = load_genome(path)
    return analyze_loaded(genome, metadata, source=str(path), env=env,
                          episodes=episodes, eval_seed=eval_seed)


def analyze_loaded(genome: Genome, metadata: dict, source: str, env: str | None = None,
                   episodes: int | None = None, eval_seed: int = 0) -> str:
    n_in = len(genome.input_ids())
    n_hidden = len(genome.hidden_ids())
    n_out = len(genome.output_ids())
    n_conns = len(genome.connections)
    n_enabled = sum(1 for c in genome.connections.values() if c.enabled)
    lines = [
        f"genome: {source}",
        f"nodes: {len(genome.nodes)} ({n_in} input / {n_hidden} hidden / {n_out} output)",
        f"connections: {n_conns} ({n_enabled} enabled)",
    ]

    graph = genome_to_graph(genome)
    try:
        result = approx_max_q(graph)
    except ZeroEdgeGraphError:
        lines.append("modularity: q = 0 (degenerate: no enabled connections)")
    else:
        lines.append(f"modularity: q = {result.q:.6f} over {result.partition.module_count} modules")
        node_ids = sorted(genome.nodes)
        modules: dict[int, list[int]] = {}
        for idx, module in enumerate(result.partition.assignment):
            modules.setdefault(module, []).append(node_ids[idx])
        for module in sorted(modules):
            lines.append(f"  module {module}: nodes {modules[module]}")

    if metadata:
        lines.append("metadata: " + ", ".join(f"{k}={v}" for k, v in sorted(metadata.items())))

    if env is not None:
        spec = get_env_spec(env)
        res = evaluate(genome, spec, episodes, eval_seed)
        lines.append(f"evaluation on {env} ({len(res.episodes)} episodes, seed {eval_seed}):")
        lines.append(f"  mean reward: {res.mean_reward:.3f}")
        lines.append("  mean |actuation| per actuator: "
                     + ", ".join(f"{v:.3f}" for v in res.mean_abs_actuation))
        if spec.n_actuators >= 2:
            lines.append(f"  torque deviation: {torque_deviation(res.mean_abs_actuation):.4f}")
    return "\n".join(lines)
