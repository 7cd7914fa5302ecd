"""NEAT evolution: mutation, historical-marking crossover, speciation, reproduction.

Hyperparameter defaults are standard NEAT values exposed on :class:`NeatConfig`.
All operators draw from an explicit ``numpy.random.Generator`` and touch the
shared :class:`~neatlab.genome.InnovationRegistry` only from the (sequential)
reproduction path, so a run is bit-reproducible from its seed.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ContractError, ExtinctionError
from .genome import (HIDDEN, INPUT, OUTPUT, ConnectionGene, Genome, InnovationRegistry,
                     NodeGene, would_close_cycle)


@dataclass
class NeatConfig:
    weight_mutate_rate: float = 0.8
    weight_replace_rate: float = 0.1    # within a weight mutation: full redraw
    weight_perturb_scale: float = 0.5   # perturbation is uniform +/- this
    weight_limit: float = 8.0
    bias_mutate_rate: float = 0.3
    bias_replace_rate: float = 0.1
    bias_perturb_scale: float = 0.5
    add_connection_rate: float = 0.3
    add_node_rate: float = 0.15
    toggle_enable_rate: float = 0.05
    crossover_rate: float = 0.75
    disabled_inherit_prob: float = 0.75
    compat_excess: float = 1.0          # c1
    compat_disjoint: float = 1.0        # c2
    compat_weight: float = 0.5          # c3
    compat_threshold: float = 3.0
    small_genome_limit: int = 20        # below this many genes, N := 1 in delta
    survival_fraction: float = 0.2
    stagnation_limit: int = 15
    elitism_min_species_size: int = 5   # species larger than this keep their champion
    feedforward: bool = True


def init_population(n_inputs: int, n_outputs: int, size: int,
                    registry: InnovationRegistry, rng: np.random.Generator) -> list[Genome]:
    """Fully-connected input->output genomes with weights uniform in [-1, 1].

    Input nodes get ids 0..n_inputs-1, outputs the next n_outputs ids; every
    genome shares the same innovation numbers for the same (src, dst) wiring.
    """
    if size < 2:
        raise ContractError("population size must be at least 2")
    registry.reserve_node_ids(n_inputs + n_outputs)
    population = []
    for _ in range(size):
        genome = Genome()
        for i in range(n_inputs):
            genome.nodes[i] = NodeGene(i, INPUT)
        for j in range(n_outputs):
            genome.nodes[n_inputs + j] = NodeGene(n_inputs + j, OUTPUT)
        for i in range(n_inputs):
            for j in range(n_outputs):
                inno = registry.connection_innovation(i, n_inputs + j)
                genome.connections[inno] = ConnectionGene(
                    inno, i, n_inputs + j, float(rng.uniform(-1.0, 1.0)))
        population.append(genome)
    return population


def _perturb(value, rate, replace_rate, scale, limit, rng):
    if rng.random() >= rate:
        return value, False
    if rng.random() < replace_rate:
        value = float(rng.uniform(-1.0, 1.0))
    else:
        value = value + float(rng.uniform(-scale, scale))
    return min(max(value, -limit), limit), True


def mutate(genome: Genome, cfg: NeatConfig, registry: InnovationRegistry,
           rng: np.random.Generator) -> Genome:
    """Return a mutated copy: weight/bias tweaks, toggle, add-connection, add-node.

    Failed structural proposals (duplicate edges, cycle-creating edges in
    feedforward mode) are skipped silently. With all rates at 0 the copy is
    identical to the parent.
    """
    g = genome.copy()
    g.fitness = None

    for _, conn in sorted(g.connections.items()):
        conn.weight, _ = _perturb(conn.weight, cfg.weight_mutate_rate,
                                  cfg.weight_replace_rate, cfg.weight_perturb_scale,
                                  cfg.weight_limit, rng)
    for _, node in sorted(g.nodes.items()):
        if node.kind == INPUT:
            continue
        node.bias, _ = _perturb(node.bias, cfg.bias_mutate_rate,
                                cfg.bias_replace_rate, cfg.bias_perturb_scale,
                                cfg.weight_limit, rng)

    if g.connections and rng.random() < cfg.toggle_enable_rate:
        innos = sorted(g.connections)
        conn = g.connections[innos[int(rng.integers(len(innos)))]]
        if conn.enabled:
            conn.enabled = False
        elif not (cfg.feedforward and would_close_cycle(g, conn.src, conn.dst)):
            conn.enabled = True

    if rng.random() < cfg.add_connection_rate:
        _try_add_connection(g, cfg, registry, rng)

    if rng.random() < cfg.add_node_rate:
        _try_add_node(g, registry, rng)

    return g


def _try_add_connection(g: Genome, cfg: NeatConfig, registry: InnovationRegistry,
                        rng: np.random.Generator, attempts: int = 20):
    node_ids = sorted(g.nodes)
    targets = [i for i in node_ids if g.nodes[i].kind != INPUT]
    if not targets:
        return
    for _ in range(attempts):
        src = node_ids[int(rng.integers(len(node_ids)))]
        dst = targets[int(rng.integers(len(targets)))]
        if g.has_connection(src, dst):
            continue
        # recurrent mode accepts self-loops and cycles; feedforward rejects both
        if cfg.feedforward and would_close_cycle(g, src, dst):
            continue
        inno = registry.connection_innovation(src, dst)
        g.connections[inno] = ConnectionGene(inno, src, dst, float(rng.uniform(-1.0, 1.0)))
        return


def _try_add_node(g: Genome, registry: InnovationRegistry, rng: np.random.Generator):
    enabled = [c for _, c in sorted(g.connections.items()) if c.enabled]
    if not enabled:
        return
    old = enabled[int(rng.integers(len(enabled)))]
    nid, in_inno, out_inno = registry.node_split(old.innovation, old.src, old.dst)
    if nid in g.nodes or in_inno in g.connections or out_inno in g.connections:
        # the same connection was split before in this lineage; make a fresh node
        nid = registry.fresh_node_id()
        in_inno = registry.fresh_innovation()
        out_inno = registry.fresh_innovation()
    old.enabled = False
    g.nodes[nid] = NodeGene(nid, HIDDEN)
    g.connections[in_inno] = ConnectionGene(in_inno, old.src, nid, 1.0)
    g.connections[out_inno] = ConnectionGene(out_inno, nid, old.dst, old.weight)


def crossover(a: Genome, b: Genome, rng: np.random.Generator,
              cfg: NeatConfig | None = None) -> Genome:
    """Recombine two genomes by aligning genes on their historical markings.

    Matching innovations take the gene from a random parent; disjoint and
    excess genes come from the fitter parent (equal fitness: a random parent
    per gene, so each one-sided gene is included with probability 1/2). A gene
    disabled in either parent stays disabled in the child with probability
    0.75. In feedforward mode, cycle-closing genes are inherited disabled.
    """
    cfg = cfg or NeatConfig()
    if a.fitness is None or b.fitness is None:
        raise ContractError("crossover requires both parents to have assigned fitness")
    if a.fitness > b.fitness:
        fitter = 0
    elif b.fitness > a.fitness:
        fitter = 1
    else:
        fitter = -1

    child = Genome()
    chosen: list[ConnectionGene] = []
    for inno in sorted(set(a.connections) | set(b.connections)):
        ca = a.connections.get(inno)
        cb = b.connections.get(inno)
        if ca is not None and cb is not None:
            gene = (ca if rng.random() < 0.5 else cb).copy()
            if not (ca.enabled and cb.enabled):
                gene.enabled = rng.random() >= cfg.disabled_inherit_prob
        else:
            owner = 0 if ca is not None else 1
            if fitter == -1:
                if rng.random() < 0.5:
                    continue
            elif owner != fitter:
                continue
            gene = (ca or cb).copy()
        chosen.append(gene)

    needed = set()
    for gene in chosen:
        needed.add(gene.src)
        needed.add(gene.dst)
    for parent in (a, b):
        for nid, node in parent.nodes.items():
            if node.kind != HIDDEN:
                needed.add(nid)
    for nid in sorted(needed):
        na = a.nodes.get(nid)
        nb = b.nodes.get(nid)
        if na is not None and nb is not None:
            child.nodes[nid] = (na if rng.random() < 0.5 else nb).copy()
        else:
            child.nodes[nid] = (na or nb).copy()

    if cfg.feedforward:
        # equal-fitness inheritance can union edges of two different DAGs
        for gene in chosen:
            if gene.enabled and would_close_cycle(child, gene.src, gene.dst):
                gene.enabled = False
            child.connections[gene.innovation] = gene
    else:
        for gene in chosen:
            child.connections[gene.innovation] = gene
    return child


def compatibility_distance(a: Genome, b: Genome, cfg: NeatConfig | None = None) -> float:
    """delta = (c1*E + c2*D)/N + c3*Wbar over connection genes."""
    cfg = cfg or NeatConfig()
    innos_a = sorted(a.connections)
    innos_b = sorted(b.connections)
    if not innos_a and not innos_b:
        return 0.0
    max_a = innos_a[-1] if innos_a else -1
    max_b = innos_b[-1] if innos_b else -1
    matching = set(innos_a) & set(innos_b)
    excess = disjoint = 0
    weight_diff = 0.0
    for inno in innos_a:
        if inno in matching:
            weight_diff += abs(a.connections[inno].weight - b.connections[inno].weight)
        elif inno > max_b:
            excess += 1
        else:
            disjoint += 1
    for inno in innos_b:
        if inno in matching:
            continue
        if inno > max_a:
            excess += 1
        else:
            disjoint += 1
    wbar = weight_diff / len(matching) if matching else 0.0
    n = max(len(innos_a), len(innos_b))
    if n < cfg.small_genome_limit:
        n = 1
    return (cfg.compat_excess * excess + cfg.compat_disjoint * disjoint) / n \
        + cfg.compat_weight * wbar


class Species:
    """A structural niche: representative, members, and stagnation history."""

    _counter = 0

    def __init__(self, representative: Genome):
        Species._counter += 1
        self.sid = Species._counter
        self.representative = representative
        self.members: list[Genome] = []
        self.best_fitness_history: list[float] = []
        self.best_ever = -np.inf
        self.stagnation = 0

    def champion(self) -> Genome:
        best = self.members[0]
        for g in self.members[1:]:
            if g.fitness > best.fitness:
                best = g
        return best


def speciate(population: list[Genome], previous_species: list[Species],
             threshold: float, cfg: NeatConfig, rng: np.random.Generator) -> list[Species]:
    """Assign each genome to the first compatible species, founding new ones as needed.

    Representatives are re-drawn at random from each species' previous-generation
    members; species left empty after assignment are dropped.
    """
    if threshold <= 0:
        raise ContractError("compatibility threshold must be positive")
    species = list(previous_species)
    for sp in species:
        if sp.members:
            sp.representative = sp.members[int(rng.integers(len(sp.members)))]
        sp.members = []
    for genome in population:
        for sp in species:
            if compatibility_distance(genome, sp.representative, cfg) < threshold:
                sp.members.append(genome)
                break
        else:
            sp = Species(genome)
            sp.members.append(genome)
            species.append(sp)
    return [sp for sp in species if sp.members]


def _largest_remainder(weights: list[float], total: int) -> list[int]:
    """Apportion `total` seats proportionally to nonnegative weights."""
    wsum = sum(weights)
    if wsum <= 0:
        weights = [1.0] * len(weights)
        wsum = float(len(weights))
    raw = [w / wsum * total for w in weights]
    counts = [int(r) for r in raw]
    remainder = total - sum(counts)
    order = sorted(range(len(raw)), key=lambda i: (-(raw[i] - counts[i]), i))
    for i in order[:remainder]:
        counts[i] += 1
    return counts


def reproduce(species_list: list[Species], cfg: NeatConfig, registry: InnovationRegistry,
              rng: np.random.Generator, population_size: int) -> list[Genome]:
    """Produce the next generation via fitness sharing, elitism, and stagnation culls.

    Per-species offspring quotas are proportional to the species' mean
    min-shifted fitness (member fitness divided by species size); species
    stagnant for `stagnation_limit` generations are removed unless they hold
    the population best. Species with more than `elitism_min_species_size`
    members carry their champion over unmodified.
    """
    for sp in species_list:
        for g in sp.members:
            if g.fitness is None:
                raise ContractError("reproduce requires evaluated members")

    pop_best = None
    for sp in species_list:
        ch = sp.champion()
        if pop_best is None or ch.fitness > pop_best.fitness:
            pop_best = ch

    survivors = []
    for sp in species_list:
        current_best = sp.champion().fitness
        sp.best_fitness_history.append(current_best)
        if current_best > sp.best_ever:
            sp.best_ever = current_best
            sp.stagnation = 0
        else:
            sp.stagnation += 1
        if sp.stagnation >= cfg.stagnation_limit and pop_best not in sp.members:
            continue
        survivors.append(sp)
    if not survivors:
        raise ExtinctionError("all species were culled by stagnation")

    fmin = min(g.fitness for sp in survivors for g in sp.members)
    weights = [sum(g.fitness - fmin for g in sp.members) / len(sp.members)
               for sp in survivors]
    quotas = _largest_remainder(weights, population_size)

    next_population: list[Genome] = []
    for sp, quota in zip(survivors, quotas):
        if quota == 0:
            continue
        ranked = sorted(range(len(sp.members)), key=lambda i: (-sp.members[i].fitness, i))
        members = [sp.members[i] for i in ranked]
        produced = 0
        if len(members) > cfg.elitism_min_species_size:
            elite = members[0].copy()
            elite.fitness = None
            next_population.append(elite)
            produced += 1
        pool = members[:max(1, int(np.ceil(cfg.survival_fraction * len(members))))]
        while produced < quota:
            if len(pool) >= 2 and rng.random() < cfg.crossover_rate:
                i = int(rng.integers(len(pool)))
                j = int(rng.integers(len(pool) - 1))
                if j >= i:
                    j += 1
                child = crossover(pool[i], pool[j], rng, cfg)
            else:
                child = pool[int(rng.integers(len(pool)))].copy()
            next_population.append(mutate(child, cfg, registry, rng))
            produced += 1
    return next_population
