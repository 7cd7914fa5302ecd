"""Compile genomes into executable networks.

Networks are flattened to CSR-style arrays (per computed node: incoming
source slots and weights) so activation runs inside the jitted kernels.
Feedforward nets are immutable and safe to share; recurrent nets carry a
state vector and belong to one worker at a time.
"""

import numpy as np

from .errors import ContractError, CycleError
from .genome import INPUT, Genome
from .kernels import feedforward_values, recurrent_values


class _CompiledNet:
    __slots__ = ("n_nodes", "n_inputs", "comp_slots", "in_ptr", "in_src", "in_w",
                 "bias", "out_slots", "slot_of")

    def __init__(self, genome: Genome, comp_ids: list[int]):
        input_ids = genome.input_ids()
        slot_of = {nid: i for i, nid in enumerate(input_ids)}
        for nid in comp_ids:
            slot_of[nid] = len(slot_of)
        incoming: dict[int, list[tuple[int, float]]] = {nid: [] for nid in comp_ids}
        for _, conn in sorted(genome.connections.items()):
            if conn.enabled:
                incoming[conn.dst].append((slot_of[conn.src], conn.weight))
        in_ptr = [0]
        in_src: list[int] = []
        in_w: list[float] = []
        bias = []
        for nid in comp_ids:
            for src_slot, w in sorted(incoming[nid]):
                in_src.append(src_slot)
                in_w.append(w)
            in_ptr.append(len(in_src))
            bias.append(genome.nodes[nid].bias)
        self.n_nodes = len(slot_of)
        self.n_inputs = len(input_ids)
        self.comp_slots = np.array([slot_of[n] for n in comp_ids], dtype=np.int64)
        self.in_ptr = np.array(in_ptr, dtype=np.int64)
        self.in_src = np.array(in_src, dtype=np.int64)
        self.in_w = np.array(in_w, dtype=np.float64)
        self.bias = np.array(bias, dtype=np.float64)
        self.out_slots = np.array([slot_of[n] for n in genome.output_ids()], dtype=np.int64)
        self.slot_of = slot_of

    def _check_arity(self, inputs) -> np.ndarray:
        x = np.asarray(inputs, dtype=np.float64)
        if x.shape != (self.n_inputs,):
            raise ContractError(f"expected {self.n_inputs} inputs, got shape {x.shape}")
        return x

    @property
    def n_outputs(self) -> int:
        return len(self.out_slots)


class FeedForwardNet(_CompiledNet):
    """Stateless evaluation plan in topological order."""

    def activate(self, inputs) -> np.ndarray:
        x = self._check_arity(inputs)
        values = np.zeros(self.n_nodes, dtype=np.float64)
        feedforward_values(values, self.n_inputs, self.comp_slots,
                           self.in_ptr, self.in_src, self.in_w, self.bias, x)
        return values[self.out_slots].copy()


class RecurrentNet(_CompiledNet):
    """Synchronous single-step network: all nodes read the previous step's values."""

    __slots__ = ("state", "_scratch")

    def __init__(self, genome: Genome, comp_ids: list[int]):
        super().__init__(genome, comp_ids)
        self.state = np.zeros(self.n_nodes, dtype=np.float64)
        self._scratch = np.zeros(self.n_nodes, dtype=np.float64)

    def reset(self):
        self.state[:] = 0.0
        self._scratch[:] = 0.0

    def activate(self, inputs) -> np.ndarray:
        x = self._check_arity(inputs)
        recurrent_values(self.state, self._scratch, self.n_inputs, self.comp_slots,
                         self.in_ptr, self.in_src, self.in_w, self.bias, x)
        self.state, self._scratch = self._scratch, self.state
        return self.state[self.out_slots].copy()


def _topological_comp_order(genome: Genome) -> list[int]:
    """Non-input node ids in evaluation order; CycleError naming an edge on failure."""
    comp = [nid for nid in sorted(genome.nodes) if genome.nodes[nid].kind != INPUT]
    indeg = {nid: 0 for nid in comp}
    out: dict[int, list[int]] = {nid: [] for nid in genome.nodes}
    for c in genome.connections.values():
        if c.enabled and genome.nodes[c.src].kind != INPUT:
            out[c.src].append(c.dst)
            indeg[c.dst] += 1
    ready = sorted(nid for nid, d in indeg.items() if d == 0)
    order = []
    while ready:
        nid = ready.pop(0)
        order.append(nid)
        changed = False
        for nxt in out[nid]:
            indeg[nxt] -= 1
            if indeg[nxt] == 0:
                ready.append(nxt)
                changed = True
        if changed:
            ready.sort()
    if len(order) < len(comp):
        remaining = {nid for nid in comp if indeg[nid] > 0}
        start = min(remaining)
        path = [start]
        seen = {start}
        node = start
        while True:  # walk along in-cycle predecessors until one repeats
            pred = min(c.src for c in genome.connections.values()
                       if c.enabled and c.dst == node and c.src in remaining)
            if pred in seen:
                raise CycleError((pred, node))
            path.append(pred)
            seen.add(pred)
            node = pred
    return order


def build_feedforward(genome: Genome) -> FeedForwardNet:
    """Evaluation plan reproducing node-wise tanh(bias + sum w*x_source)."""
    return FeedForwardNet(genome, _topological_comp_order(genome))


def build_recurrent(genome: Genome) -> RecurrentNet:
    """Recurrent network with per-node state carried across steps (reset to 0)."""
    comp = [nid for nid in sorted(genome.nodes) if genome.nodes[nid].kind != INPUT]
    return RecurrentNet(genome, comp)


def activate(net, inputs) -> np.ndarray:
    """Run one activation of either network kind; output order = output-node order."""
    return net.activate(inputs)
