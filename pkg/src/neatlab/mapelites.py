"""MAP-Elites over (modularity Q, torque deviation D) descriptors.

A 20x20 grid over [0,1]^2 keeps the best-fitness genome whose descriptors fall
in each cell. Variation reuses the NEAT operators: per child, crossover with
probability 0.3 then mutation with probability 0.75, forcing mutation when
neither triggered (a verbatim copy would waste its evaluation).
"""

from dataclasses import dataclass

from .envs import EnvSpec, evaluate_population
from .errors import ConfigError, ContractError
from .genome import Genome, InnovationRegistry
from .graphmod import genome_modularity
from .neat import NeatConfig, crossover, init_population, mutate
from .objectives import torque_deviation
from .rng import STREAM_EVAL, STREAM_EVOLVE, derive, generator


@dataclass
class MapElitesConfig:
    grid_size: int = 20
    init_population: int = 100
    batch_size: int = 12
    crossover_prob: float = 0.3
    mutation_prob: float = 0.75
    generations: int = 2000
    force_mutation: bool = True   # test hook; disabling skips no-op children instead
    max_evaluations: int | None = None

    def validate(self):
        if self.grid_size < 1 or self.batch_size < 1 or self.init_population < 2:
            raise ConfigError("map-elites grid/batch/init sizes out of range")
        if not (0.0 <= self.crossover_prob <= 1.0 and 0.0 <= self.mutation_prob <= 1.0):
            raise ConfigError("operator probabilities must lie in [0, 1]")
        if self.generations < 0:
            raise ConfigError("generations must be >= 0")
        if self.max_evaluations is not None and self.max_evaluations < self.init_population:
            raise ConfigError("evaluation budget smaller than the initial population")


@dataclass
class Elite:
    genome: Genome
    fitness: float
    q: float
    d: float
    eval_seed: int
    generation: int = 0


class ArchiveGrid:
    """Grid over (q, d) in [0,1]^2; cells hold their best-so-far occupant."""

    def __init__(self, grid_size: int = 20):
        self.grid_size = grid_size
        self.cells: dict[tuple[int, int], Elite] = {}

    def cell_index(self, value: float) -> int:
        """floor(grid * value), with the top edge folded into the last cell."""
        return min(int(self.grid_size * value), self.grid_size - 1)

    def insert(self, genome: Genome, fitness: float, q: float, d: float,
               eval_seed: int = 0, generation: int = 0) -> bool:
        """Place in the (q, d) cell iff it is empty or strictly beaten on fitness."""
        if not (0.0 <= q <= 1.0 and 0.0 <= d <= 1.0):
            raise ContractError(f"descriptors ({q}, {d}) outside [0, 1]^2")
        key = (self.cell_index(q), self.cell_index(d))
        occupant = self.cells.get(key)
        if occupant is not None and fitness <= occupant.fitness:
            return False
        self.cells[key] = Elite(genome, fitness, q, d, eval_seed, generation)
        return True

    def coverage(self) -> int:
        return len(self.cells)

    def best(self) -> Elite | None:
        best = None
        for key in sorted(self.cells):
            elite = self.cells[key]
            if best is None or elite.fitness > best.fitness:
                best = elite
        return best

    def items(self) -> list[tuple[tuple[int, int], Elite]]:
        return [(key, self.cells[key]) for key in sorted(self.cells)]


def descriptors(genome: Genome, eval_result) -> tuple[float, float]:
    """(greedy-max Q clamped to [0,1], torque deviation of mean |actuation|)."""
    return genome_modularity(genome), torque_deviation(eval_result.mean_abs_actuation)


def map_elites_run(spec: EnvSpec, seed: int, neat_cfg: NeatConfig | None = None,
                   me_cfg: MapElitesConfig | None = None, episodes: int | None = None,
                   workers: int = 1, registry: InnovationRegistry | None = None):
    """Run MAP-Elites; returns (archive, history).

    History rows are (generation, evaluations_used, coverage, best_fitness),
    one per generation including the seeding batch (generation 0). Per-child
    evaluation seeds are pre-assigned from (run seed, generation, child index),
    so results do not depend on the worker count.
    """
    if spec.n_actuators < 2:
        raise ContractError(f"{spec.name} has one actuator; the D descriptor is undefined")
    neat_cfg = neat_cfg or NeatConfig(feedforward=(spec.network_kind == "feedforward"))
    me_cfg = me_cfg or MapElitesConfig()
    me_cfg.validate()
    registry = registry or InnovationRegistry()
    rng = generator(derive(seed, STREAM_EVOLVE))
    archive = ArchiveGrid(me_cfg.grid_size)
    history: list[tuple[int, int, int, float]] = []

    genomes = init_population(spec.obs_dim, spec.n_outputs, me_cfg.init_population,
                              registry, rng)
    seeds = [derive(seed, STREAM_EVAL, 0, i) for i in range(len(genomes))]
    results = evaluate_population(genomes, spec, episodes, seeds, workers)
    for genome, res, es in zip(genomes, results, seeds):
        genome.fitness = res.mean_reward
        q, d = descriptors(genome, res)
        archive.insert(genome, res.mean_reward, q, d, es, generation=0)
    evals_used = len(genomes)
    history.append((0, evals_used, archive.coverage(), archive.best().fitness))

    for gen in range(1, me_cfg.generations + 1):
        if me_cfg.max_evaluations is not None \
                and evals_used + me_cfg.batch_size > me_cfg.max_evaluations:
            break
        occupied = [elite for _, elite in archive.items()]
        children = []
        for _child in range(me_cfg.batch_size):
            p1 = occupied[int(rng.integers(len(occupied)))].genome
            applied = False
            if rng.random() < me_cfg.crossover_prob:
                p2 = occupied[int(rng.integers(len(occupied)))].genome
                child = crossover(p1, p2, rng, neat_cfg)
                applied = True
            else:
                child = p1.copy()
                child.fitness = None
            if rng.random() < me_cfg.mutation_prob:
                child = mutate(child, neat_cfg, registry, rng)
                applied = True
            if not applied:
                if not me_cfg.force_mutation:
                    continue
                child = mutate(child, neat_cfg, registry, rng)
            children.append(child)
        if children:
            seeds = [derive(seed, STREAM_EVAL, gen, i) for i in range(len(children))]
            results = evaluate_population(children, spec, episodes, seeds, workers)
            for child, res, es in zip(children, results, seeds):
                child.fitness = res.mean_reward
                q, d = descriptors(child, res)
                archive.insert(child, res.mean_reward, q, d, es, generation=gen)
            evals_used += len(children)
        history.append((gen, evals_used, archive.coverage(), archive.best().fitness))
    return archive, history
