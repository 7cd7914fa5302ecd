"""NEAT genotypes: node/connection genes, innovation bookkeeping, JSON persistence."""

import json
from dataclasses import dataclass

from .errors import ContractError

INPUT = "input"
HIDDEN = "hidden"
OUTPUT = "output"


@dataclass
class NodeGene:
    id: int
    kind: str
    bias: float = 0.0  # stays 0 for input nodes

    def copy(self) -> "NodeGene":
        return NodeGene(self.id, self.kind, self.bias)


@dataclass
class ConnectionGene:
    innovation: int
    src: int
    dst: int
    weight: float
    enabled: bool = True

    def copy(self) -> "ConnectionGene":
        return ConnectionGene(self.innovation, self.src, self.dst, self.weight, self.enabled)


class Genome:
    """A network genotype: nodes keyed by id, connections keyed by innovation."""

    __slots__ = ("nodes", "connections", "fitness")

    def __init__(self, nodes=None, connections=None, fitness=None):
        self.nodes: dict[int, NodeGene] = dict(nodes) if nodes else {}
        self.connections: dict[int, ConnectionGene] = dict(connections) if connections else {}
        self.fitness: float | None = fitness

    def copy(self) -> "Genome":
        return Genome(
            {i: n.copy() for i, n in self.nodes.items()},
            {i: c.copy() for i, c in self.connections.items()},
            self.fitness,
        )

    def input_ids(self) -> list[int]:
        return sorted(i for i, n in self.nodes.items() if n.kind == INPUT)

    def output_ids(self) -> list[int]:
        return sorted(i for i, n in self.nodes.items() if n.kind == OUTPUT)

    def hidden_ids(self) -> list[int]:
        return sorted(i for i, n in self.nodes.items() if n.kind == HIDDEN)

    def enabled_connections(self) -> list[ConnectionGene]:
        return [c for _, c in sorted(self.connections.items()) if c.enabled]

    def has_connection(self, src: int, dst: int) -> bool:
        return any(c.src == src and c.dst == dst for c in self.connections.values())

    def size(self) -> tuple[int, int]:
        """(node count, enabled connection count)."""
        return len(self.nodes), sum(1 for c in self.connections.values() if c.enabled)

    def validate(self, feedforward: bool = False):
        """Raise ContractError on structural violations."""
        seen_pairs = set()
        for c in self.connections.values():
            if c.src not in self.nodes or c.dst not in self.nodes:
                raise ContractError(f"connection {c.src}->{c.dst} references a missing node")
            if self.nodes[c.dst].kind == INPUT:
                raise ContractError(f"connection {c.src}->{c.dst} feeds an input node")
            if (c.src, c.dst) in seen_pairs:
                raise ContractError(f"duplicate connection pair {c.src}->{c.dst}")
            seen_pairs.add((c.src, c.dst))
        for n in self.nodes.values():
            if n.kind == INPUT and n.bias != 0.0:
                raise ContractError(f"input node {n.id} carries a bias")
        if feedforward and has_enabled_cycle(self):
            raise ContractError("enabled-connection digraph has a cycle in feedforward mode")


def would_close_cycle(genome: Genome, src: int, dst: int) -> bool:
    """True if an enabled edge src->dst would create a cycle among enabled genes."""
    if src == dst:
        return True
    # cycle iff dst already reaches src
    out = {}
    for c in genome.connections.values():
        if c.enabled:
            out.setdefault(c.src, []).append(c.dst)
    stack = [dst]
    seen = set()
    while stack:
        node = stack.pop()
        if node == src:
            return True
        if node in seen:
            continue
        seen.add(node)
        stack.extend(out.get(node, ()))
    return False


def has_enabled_cycle(genome: Genome) -> bool:
    indeg = {i: 0 for i in genome.nodes}
    out = {i: [] for i in genome.nodes}
    for c in genome.connections.values():
        if c.enabled:
            out[c.src].append(c.dst)
            indeg[c.dst] += 1
    queue = [i for i, d in indeg.items() if d == 0]
    visited = 0
    while queue:
        node = queue.pop()
        visited += 1
        for nxt in out[node]:
            indeg[nxt] -= 1
            if indeg[nxt] == 0:
                queue.append(nxt)
    return visited < len(genome.nodes)


class InnovationRegistry:
    """Run-global historical markings.

    The same structural signature -- a (src, dst) connection, or the split of
    a given connection gene -- receives the same numbers whenever it reappears
    within a run, which is what lets crossover align genes across genomes.
    """

    def __init__(self):
        self._conn: dict[tuple[int, int], int] = {}
        self._split: dict[int, tuple[int, int, int]] = {}
        self._next_innovation = 0
        self._next_node_id = 0

    def reserve_node_ids(self, upto: int):
        """Mark ids < upto as taken (used when seeding input/output nodes)."""
        self._next_node_id = max(self._next_node_id, upto)

    def fresh_node_id(self) -> int:
        nid = self._next_node_id
        self._next_node_id += 1
        return nid

    def fresh_innovation(self) -> int:
        inno = self._next_innovation
        self._next_innovation += 1
        return inno

    def connection_innovation(self, src: int, dst: int) -> int:
        key = (src, dst)
        if key not in self._conn:
            self._conn[key] = self.fresh_innovation()
        return self._conn[key]

    def node_split(self, conn_innovation: int, src: int, dst: int) -> tuple[int, int, int]:
        """(new node id, src->new innovation, new->dst innovation) for a split."""
        if conn_innovation not in self._split:
            nid = self.fresh_node_id()
            in_inno = self.connection_innovation(src, nid)
            out_inno = self.connection_innovation(nid, dst)
            self._split[conn_innovation] = (nid, in_inno, out_inno)
        return self._split[conn_innovation]


# --- JSON persistence ---------------------------------------------------------
# Schema: {"nodes": [{id, kind, bias}], "connections":
# [{innovation, from, to, weight, enabled}], "metadata": {...}}

def genome_to_dict(genome: Genome, metadata: dict | None = None) -> dict:
    return {
        "nodes": [
            {"id": n.id, "kind": n.kind, "bias": n.bias}
            for _, n in sorted(genome.nodes.items())
        ],
        "connections": [
            {"innovation": c.innovation, "from": c.src, "to": c.dst,
             "weight": c.weight, "enabled": c.enabled}
            for _, c in sorted(genome.connections.items())
        ],
        "metadata": dict(metadata or {}),
    }


def genome_from_dict(doc: dict) -> tuple[Genome, dict]:
    genome = Genome()
    for nd in doc["nodes"]:
        genome.nodes[int(nd["id"])] = NodeGene(int(nd["id"]), str(nd["kind"]), float(nd["bias"]))
    for cd in doc["connections"]:
        gene = ConnectionGene(int(cd["innovation"]), int(cd["from"]), int(cd["to"]),
                              float(cd["weight"]), bool(cd["enabled"]))
        genome.connections[gene.innovation] = gene
    genome.validate()
    return genome, dict(doc.get("metadata", {}))


def save_genome(genome: Genome, path, metadata: dict | None = None):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(genome_to_dict(genome, metadata), fh, indent=2)
        fh.write("\n")


def load_genome(path) -> tuple[Genome, dict]:
    with open(path, encoding="utf-8") as fh:
        return genome_from_dict(json.load(fh))
