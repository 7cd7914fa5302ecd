"""Shared fixtures and the acceptance-criteria summary reporter."""

import numpy as np
import pytest

from neatlab.genome import ConnectionGene, Genome, NodeGene


def pytest_terminal_summary(terminalreporter):
    """Print one PASS/FAIL line per acceptance criterion at the end of the run."""
    entries = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance" in nodeid and getattr(rep, "when", None) == "call":
                entries.append((nodeid.split("::")[-1], "PASS" if outcome == "passed" else "FAIL"))
    if entries:
        terminalreporter.write_sep("=", "acceptance criteria")
        for name, outcome in sorted(entries):
            terminalreporter.write_line(f"{outcome}  {name}")


def make_genome(n_inputs, n_outputs, connections, biases=None):
    """Small genome builder: connections are (innovation, src, dst, weight[, enabled])."""
    g = Genome()
    for i in range(n_inputs):
        g.nodes[i] = NodeGene(i, "input")
    for j in range(n_outputs):
        g.nodes[n_inputs + j] = NodeGene(n_inputs + j, "output")
    for conn in connections:
        inno, src, dst, weight = conn[:4]
        enabled = conn[4] if len(conn) > 4 else True
        for nid in (src, dst):
            if nid not in g.nodes:
                g.nodes[nid] = NodeGene(nid, "hidden")
        g.connections[inno] = ConnectionGene(inno, src, dst, weight, enabled)
    if biases:
        for nid, bias in biases.items():
            g.nodes[nid].bias = bias
    return g


def random_graph_edges(rng: np.random.Generator, n: int, p: float):
    """Seeded Erdos-Renyi edge list, redrawn until at least one edge exists."""
    while True:
        edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
        if edges:
            return edges


@pytest.fixture
def two_triangle_genome():
    """Genome whose enabled-connection graph is two triangles joined by one bridge."""
    g = Genome()
    g.nodes[0] = NodeGene(0, "input")
    for nid in (1, 2, 3):
        g.nodes[nid] = NodeGene(nid, "hidden")
    for nid in (4, 5):
        g.nodes[nid] = NodeGene(nid, "output")
    wiring = [(0, 1), (0, 2), (1, 2),    # triangle over nodes {0, 1, 2}
              (3, 4), (3, 5), (4, 5),    # triangle over nodes {3, 4, 5}
              (2, 3)]                    # bridge
    for inno, (src, dst) in enumerate(wiring):
        g.connections[inno] = ConnectionGene(inno, src, dst, 0.5)
    g.validate(feedforward=True)
    return g
