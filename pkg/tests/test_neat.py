"""NEAT operator tests: init, mutation, crossover, speciation, reproduction."""

import numpy as np
import pytest

from neatlab.errors import ContractError, ExtinctionError
from neatlab.genome import InnovationRegistry, genome_to_dict
from neatlab.neat import (NeatConfig, Species, compatibility_distance, crossover,
                          init_population, mutate, reproduce, speciate)
from neatlab.nets import build_feedforward
from neatlab.rng import generator

from conftest import make_genome


def quiet_config(**overrides) -> NeatConfig:
    """All mutation rates zeroed; individual operators enabled per test."""
    base = dict(weight_mutate_rate=0.0, bias_mutate_rate=0.0, add_connection_rate=0.0,
                add_node_rate=0.0, toggle_enable_rate=0.0)
    base.update(overrides)
    return NeatConfig(**base)


class TestInitPopulation:
    def test_acrobot_shape_topology(self):
        reg = InnovationRegistry()
        pop = init_population(6, 3, 400, reg, generator(1))
        assert len(pop) == 400
        for g in (pop[0], pop[-1]):
            assert len(g.nodes) == 9
            assert len(g.connections) == 18
        # shared wiring shares innovation numbers across the population
        assert sorted(pop[0].connections) == sorted(pop[1].connections)

    def test_minimum_size(self):
        pop = init_population(2, 1, 2, InnovationRegistry(), generator(1))
        assert len(pop) == 2
        with pytest.raises(ContractError):
            init_population(2, 1, 1, InnovationRegistry(), generator(1))

    def test_same_seed_bit_identical(self):
        pops = [init_population(4, 2, 10, InnovationRegistry(), generator(33))
                for _ in range(2)]
        docs = [[genome_to_dict(g) for g in pop] for pop in pops]
        assert docs[0] == docs[1]

    def test_weights_in_unit_range(self):
        pop = init_population(8, 2, 20, InnovationRegistry(), generator(5))
        weights = [c.weight for g in pop for c in g.connections.values()]
        assert all(-1.0 <= w <= 1.0 for w in weights)


class TestMutate:
    def test_zero_rates_identity(self):
        g = make_genome(2, 1, [(0, 0, 2, 0.3), (1, 1, 2, -0.4)])
        out = mutate(g, quiet_config(), InnovationRegistry(), generator(0))
        assert genome_to_dict(out) == genome_to_dict(g)

    def test_add_node_split_rule(self):
        g = make_genome(1, 1, [(0, 0, 1, 0.7)])
        reg = InnovationRegistry()
        reg.reserve_node_ids(2)
        reg.connection_innovation(0, 1)
        out = mutate(g, quiet_config(add_node_rate=1.0), reg, generator(0))
        assert not out.connections[0].enabled
        new_node = out.hidden_ids()[0]
        incoming = [c for c in out.connections.values() if c.dst == new_node]
        outgoing = [c for c in out.connections.values() if c.src == new_node]
        assert incoming[0].weight == 1.0
        assert outgoing[0].weight == 0.7

    def test_feedforward_rejects_cycle_proposals(self):
        # only remaining candidates are the duplicate (0->1) and the cycle (1->1)
        g = make_genome(1, 1, [(0, 0, 1, 0.5)])
        out = mutate(g, quiet_config(add_connection_rate=1.0), InnovationRegistry(),
                     generator(0))
        assert len(out.connections) == 1

    def test_recurrent_mode_allows_self_loop(self):
        g = make_genome(1, 1, [(0, 0, 1, 0.5)])
        reg = InnovationRegistry()
        reg.reserve_node_ids(2)
        reg.connection_innovation(0, 1)
        out = mutate(g, quiet_config(add_connection_rate=1.0, feedforward=False),
                     reg, generator(0))
        assert len(out.connections) == 2
        added = [c for c in out.connections.values() if c.innovation != 0][0]
        assert (added.src, added.dst) == (1, 1)

    def test_weight_mutation_respects_limit(self):
        g = make_genome(1, 1, [(0, 0, 1, 0.0)])
        cfg = quiet_config(weight_mutate_rate=1.0, weight_limit=8.0)
        rng = generator(4)
        for _ in range(200):
            g = mutate(g, cfg, InnovationRegistry(), rng)
        assert -8.0 <= g.connections[0].weight <= 8.0

    def test_mutate_does_not_touch_parent(self):
        g = make_genome(1, 1, [(0, 0, 1, 0.5)])
        mutate(g, NeatConfig(), InnovationRegistry(), generator(0))
        assert g.connections[0].weight == 0.5


class TestCrossover:
    def test_identical_parents_identity(self):
        a = make_genome(2, 1, [(0, 0, 2, 0.1), (1, 1, 2, 0.2)])
        b = a.copy()
        a.fitness = b.fitness = 1.0
        child = crossover(a, b, generator(0))
        assert genome_to_dict(child) == genome_to_dict(make_genome(
            2, 1, [(0, 0, 2, 0.1), (1, 1, 2, 0.2)]))

    def test_excess_from_fitter_parent(self):
        a = make_genome(2, 1, [(0, 0, 2, 0.1), (1, 1, 2, 0.2), (9, 0, 3, 0.9)])
        b = make_genome(2, 1, [(0, 0, 2, 0.5), (1, 1, 2, 0.6)])
        a.fitness, b.fitness = 2.0, 1.0
        for seed in range(5):
            child = crossover(a, b, generator(seed))
            assert 9 in child.connections
        a.fitness, b.fitness = 1.0, 2.0
        for seed in range(5):
            child = crossover(a, b, generator(seed))
            assert 9 not in child.connections

    def test_matching_always_inherited(self):
        a = make_genome(2, 1, [(1, 0, 2, 0.1), (2, 1, 2, 0.2), (3, 0, 3, 0.3)])
        b = make_genome(2, 1, [(1, 0, 2, 0.4), (2, 1, 2, 0.5), (3, 0, 3, 0.6)])
        a.fitness, b.fitness = 1.0, 1.0
        for seed in range(5):
            child = crossover(a, b, generator(seed))
            assert set(child.connections) == {1, 2, 3}
            for inno, gene in child.connections.items():
                assert gene.weight in (a.connections[inno].weight,
                                       b.connections[inno].weight)

    def test_unset_fitness_is_error(self):
        a = make_genome(1, 1, [(0, 0, 1, 0.1)])
        b = a.copy()
        a.fitness = 1.0
        with pytest.raises(ContractError):
            crossover(a, b, generator(0))

    def test_disabled_in_parent_mostly_disabled_in_child(self):
        a = make_genome(1, 1, [(0, 0, 1, 0.1, False)])
        b = make_genome(1, 1, [(0, 0, 1, 0.2, True)])
        a.fitness = b.fitness = 1.0
        rng = generator(12)
        disabled = sum(not crossover(a, b, rng).connections[0].enabled
                       for _ in range(400))
        assert 240 <= disabled <= 360  # ~75% of 400

    def test_feedforward_child_is_acyclic(self):
        # equal fitness opposite-direction genes could union into a cycle
        a = make_genome(1, 1, [(0, 0, 2, 1.0), (1, 2, 3, 1.0), (2, 3, 1, 1.0)])
        b = make_genome(1, 1, [(0, 0, 2, 1.0), (3, 3, 2, 1.0), (4, 2, 3, -1.0)])
        a.fitness = b.fitness = 1.0
        for seed in range(20):
            child = crossover(a, b, generator(seed))
            build_feedforward(child)  # raises CycleError if the guard failed


class TestCompatibilityDistance:
    def test_identical_zero(self):
        a = make_genome(2, 1, [(0, 0, 2, 0.5)])
        assert compatibility_distance(a, a.copy()) == 0.0

    def test_weight_difference_term(self):
        a = make_genome(2, 2, [(0, 0, 2, 1.0), (1, 0, 3, 0.0), (2, 1, 2, 0.0)])
        b = make_genome(2, 2, [(0, 0, 2, 0.0), (1, 0, 3, 0.0), (2, 1, 2, 0.0)])
        d = compatibility_distance(a, b, NeatConfig(compat_weight=0.5))
        assert d == pytest.approx(0.5 * (1.0 / 3.0), abs=1e-12)

    def test_disjoint_term_small_genome(self):
        a = make_genome(2, 2, [(0, 0, 2, 0.5), (1, 0, 3, 0.5), (2, 1, 2, 0.5)])
        b = make_genome(2, 2, [(0, 0, 2, 0.5)])
        # innovations 1, 2 are excess relative to b's max; craft disjoint instead
        b.connections[3] = b.connections[0].copy()
        b.connections[3].innovation = 3
        b.connections[3].src, b.connections[3].dst = 1, 3
        d = compatibility_distance(a, b, NeatConfig(compat_weight=0.0))
        assert d == pytest.approx(3.0)  # innovations 1, 2 disjoint + 3 excess over N=1


class TestSpeciation:
    def test_identical_population_one_species(self):
        pop = [make_genome(2, 1, [(0, 0, 2, 0.5)]) for _ in range(10)]
        species = speciate(pop, [], 3.0, NeatConfig(), generator(0))
        assert len(species) == 1
        assert len(species[0].members) == 10

    def test_distant_clusters_split(self):
        near = [make_genome(2, 1, [(0, 0, 2, 0.5)]) for _ in range(5)]
        # ten extra genes below the small-genome limit: delta = 10 > threshold
        extra = [(j, 2 + j, 2, 0.5) for j in range(1, 11)]
        far = [make_genome(2, 1, [(0, 0, 2, 0.5)] + extra) for _ in range(5)]
        species = speciate(near + far, [], 3.0, NeatConfig(), generator(0))
        assert len(species) == 2
        assert sorted(len(sp.members) for sp in species) == [5, 5]

    def test_infinite_threshold_single_species(self):
        pop = [make_genome(2, 1, [(i, 0, 2, float(i))]) for i in range(1, 4)]
        species = speciate(pop, [], float("inf"), NeatConfig(), generator(0))
        assert len(species) == 1

    def test_nonpositive_threshold_rejected(self):
        with pytest.raises(ContractError):
            speciate([], [], 0.0, NeatConfig(), generator(0))


def _evaluated_species(genomes, fitnesses):
    sp = Species(genomes[0])
    for g, f in zip(genomes, fitnesses):
        g.fitness = f
        sp.members.append(g)
    return sp


class TestReproduce:
    def test_population_size_preserved(self):
        pop = [make_genome(2, 1, [(0, 0, 2, 0.1 * i)]) for i in range(12)]
        sp = _evaluated_species(pop, [float(i) for i in range(12)])
        nxt = reproduce([sp], NeatConfig(), InnovationRegistry(), generator(0), 12)
        assert len(nxt) == 12

    def test_elitism_preserves_champion(self):
        pop = [make_genome(2, 1, [(0, 0, 2, 0.1 * i)]) for i in range(10)]
        sp = _evaluated_species(pop, [float(i) for i in range(10)])
        champion_doc = genome_to_dict(pop[9])
        champion_doc["metadata"] = {}
        nxt = reproduce([sp], NeatConfig(), InnovationRegistry(), generator(0), 10)
        docs = [genome_to_dict(g) for g in nxt]
        assert champion_doc in docs

    def test_equal_species_equal_quotas(self):
        # species distinguishable by their single innovation number
        pop_a = [make_genome(2, 1, [(0, 0, 2, 0.5)]) for _ in range(6)]
        pop_b = [make_genome(2, 1, [(1, 1, 2, 0.5)]) for _ in range(6)]
        sp_a = _evaluated_species(pop_a, [5.0] * 6)
        sp_b = _evaluated_species(pop_b, [5.0] * 6)
        nxt = reproduce([sp_a, sp_b], quiet_config(crossover_rate=0.0),
                        InnovationRegistry(), generator(3), 13)
        assert len(nxt) == 13
        from_a = sum(0 in g.connections for g in nxt)
        from_b = sum(1 in g.connections for g in nxt)
        assert abs(from_a - from_b) <= 1

    def test_stagnant_species_culled(self):
        cfg = NeatConfig(stagnation_limit=2)
        weak = _evaluated_species(
            [make_genome(2, 1, [(0, 0, 2, 0.5)]) for _ in range(4)], [1.0] * 4)
        strong = _evaluated_species(
            [make_genome(2, 1, [(0, 0, 2, 0.6)]) for _ in range(4)], [9.0] * 4)
        weak.best_ever = 5.0      # past peak: no improvement any more
        weak.stagnation = 1
        strong.best_ever = 1.0    # still improving
        nxt = reproduce([weak, strong], cfg, InnovationRegistry(), generator(0), 8)
        assert len(nxt) == 8
        assert weak.stagnation >= cfg.stagnation_limit

    def test_best_holder_survives_stagnation(self):
        cfg = NeatConfig(stagnation_limit=1)
        sp = _evaluated_species(
            [make_genome(2, 1, [(0, 0, 2, 0.5)]) for _ in range(4)], [1.0] * 4)
        sp.best_ever = 5.0
        sp.stagnation = 3
        nxt = reproduce([sp], cfg, InnovationRegistry(), generator(0), 4)
        assert len(nxt) == 4

    def test_no_species_raises_extinction(self):
        with pytest.raises(ExtinctionError):
            reproduce([], NeatConfig(), InnovationRegistry(), generator(0), 4)

    def test_unevaluated_member_rejected(self):
        sp = _evaluated_species([make_genome(2, 1, [(0, 0, 2, 0.5)])], [1.0])
        sp.members[0].fitness = None
        with pytest.raises(ContractError):
            reproduce([sp], NeatConfig(), InnovationRegistry(), generator(0), 2)
