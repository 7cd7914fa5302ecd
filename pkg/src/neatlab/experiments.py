"""Experiment harness: configs, multi-run orchestration, CSV artifacts.

Three experiment families:

* dynamics      -- evolve on plain reward; track the champion's fitness and
                   greedy-max Q per generation (modularity/fitness dynamics).
* sweep         -- the same pipeline with the modularity-augmented fitness,
                   once per listed Q-importance value (importance 0 reproduces
                   the dynamics run byte for byte under the same master seed).
* map-elites    -- quality-diversity archive over (Q, D) with CSV/SVG exports.

Seeding: run seeds derive from (master_seed, run_index) and evaluation seeds
from (run_seed, generation, individual), so artifacts are byte-identical for
any worker count. All floats are written with repr() and round-trip exactly.
"""

import dataclasses
import json
import os
from dataclasses import dataclass, field

from .envs import EnvSpec, evaluate_population, get_env_spec
from .errors import ConfigError
from .genome import InnovationRegistry, save_genome
from .graphmod import genome_modularity
from .mapelites import MapElitesConfig, map_elites_run
from .neat import NeatConfig, init_population, reproduce, speciate
from .objectives import QImportanceConfig, modularity_reward_fitness
from .rng import STREAM_EVAL, STREAM_EVOLVE, derive, generator
from .stats import mean, sample_std

RUN_COLUMNS = ("generation", "best_fitness", "best_genome_q", "mean_fitness",
               "species_count", "mean_node_count", "mean_enabled_connections")
SUMMARY_COLUMNS = ("generation", "best_fitness_mean", "best_fitness_std",
                   "best_q_mean", "best_q_std")

DEFAULT_GENERATIONS = {"acrobot": 150, "lunar-lander-lite": 200}


@dataclass
class ExperimentConfig:
    env: str = "lunar-lander-lite"
    population_size: int = 150
    generations: int | None = None   # None -> per-environment default
    runs: int = 5
    master_seed: int = 1
    q_importance: tuple[float, ...] = (0.0, 0.1, 0.125, 0.15, 0.175, 0.2)
    episodes_per_eval: int | None = None
    fitness_lower_bound: float = 0.0    # (a, b) in the modularity-reward fitness
    fitness_upper_bound: float = 300.0
    out_dir: str = "out"
    workers: int = 1
    neat: NeatConfig = field(default_factory=NeatConfig)
    map_elites: MapElitesConfig = field(default_factory=MapElitesConfig)

    def validate(self):
        get_env_spec(self.env)
        if self.runs < 1:
            raise ConfigError("runs must be >= 1")
        if self.population_size < 2:
            raise ConfigError("population size must be >= 2")
        if any(i < 0 for i in self.q_importance):
            raise ConfigError("q-importance values must be >= 0")
        if self.generations is not None and self.generations < 1:
            raise ConfigError("generations must be >= 1")
        if self.fitness_lower_bound > self.fitness_upper_bound:
            raise ConfigError("fitness lower bound exceeds upper bound")

    def resolved_generations(self) -> int:
        if self.generations is not None:
            return self.generations
        return DEFAULT_GENERATIONS[self.env]

    def spec(self) -> EnvSpec:
        return get_env_spec(self.env)

    def to_dict(self) -> dict:
        doc = dataclasses.asdict(self)
        doc["q_importance"] = list(self.q_importance)
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        doc = dict(doc)
        neat = NeatConfig(**doc.pop("neat", {}))
        me = MapElitesConfig(**doc.pop("map_elites", {}))
        if "q_importance" in doc:
            doc["q_importance"] = tuple(doc["q_importance"])
        unknown = set(doc) - {f.name for f in dataclasses.fields(cls)}
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        return cls(neat=neat, map_elites=me, **doc)

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


@dataclass
class RunRecord:
    """One per-generation row of a NEAT run.

    ``best_fitness`` is the raw mean reward of the best-so-far genome (ranked
    by selection fitness), so the column is nondecreasing. ``best_genome_q``
    is the greedy-max Q of the *current* generation's best genome, which is
    what the modularity-dynamics plots track. ``mean_fitness`` is the
    population's raw-reward mean.
    """

    generation: int
    best_fitness: float
    best_genome_q: float
    mean_fitness: float
    species_count: int
    mean_node_count: float
    mean_enabled_connections: float

    def row(self) -> tuple:
        return (self.generation, self.best_fitness, self.best_genome_q,
                self.mean_fitness, self.species_count, self.mean_node_count,
                self.mean_enabled_connections)


# --- CSV helpers ---------------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    with open(path, encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    if not lines:
        return [], []
    return lines[0].split(","), [ln.split(",") for ln in lines[1:]]


class _RowFlusher:
    """Writes run-record rows as they arrive so partial runs leave usable CSVs."""

    def __init__(self, path, header):
        self._fh = open(path, "w", encoding="utf-8", newline="\n")
        self._fh.write(",".join(header) + "\n")

    def __call__(self, record: RunRecord):
        self._fh.write(",".join(_fmt(v) for v in record.row()) + "\n")
        self._fh.flush()

    def close(self):
        self._fh.close()


# --- generational driver ---------------------------------------------------------

def evolve_run(spec: EnvSpec, neat_cfg: NeatConfig, population_size: int,
               generations: int, run_seed: int, episodes: int | None = None,
               q_importance: QImportanceConfig | None = None, workers: int = 1,
               on_record=None):
    """One NEAT run; returns (records, champion genome, champion metadata).

    Selection uses raw mean reward, or the modularity-augmented fitness when a
    Q-importance config with importance > 0 is given (Q is then recomputed for
    every candidate each evaluation). The champion is the best-so-far genome by
    selection fitness; reported per generation are its raw reward and Q.
    """
    neat_cfg = dataclasses.replace(neat_cfg, feedforward=(spec.network_kind == "feedforward"))
    use_bonus = q_importance is not None and q_importance.importance > 0.0
    registry = InnovationRegistry()
    rng = generator(derive(run_seed, STREAM_EVOLVE))
    population = init_population(spec.obs_dim, spec.n_outputs, population_size,
                                 registry, rng)
    species: list = []
    records: list[RunRecord] = []
    champion = None
    champion_fitness = None   # selection fitness of the champion
    champion_reward = None
    champion_q = None
    champion_generation = -1

    for gen in range(generations):
        seeds = [derive(run_seed, STREAM_EVAL, gen, i) for i in range(len(population))]
        results = evaluate_population(population, spec, episodes, seeds, workers)
        rewards = [res.mean_reward for res in results]
        for genome, res in zip(population, results):
            if use_bonus:
                genome.fitness = modularity_reward_fitness(
                    res.mean_reward, genome_modularity(genome), q_importance)
            else:
                genome.fitness = float(res.mean_reward)

        best_i = 0
        for i in range(1, len(population)):
            if population[i].fitness > population[best_i].fitness:
                best_i = i
        generation_best_q = genome_modularity(population[best_i])
        if champion is None or population[best_i].fitness > champion_fitness:
            champion = population[best_i].copy()
            champion.fitness = population[best_i].fitness
            champion_fitness = population[best_i].fitness
            champion_reward = rewards[best_i]
            champion_q = generation_best_q
            champion_generation = gen

        species = speciate(population, species, neat_cfg.compat_threshold, neat_cfg, rng)
        record = RunRecord(
            generation=gen,
            best_fitness=float(champion_reward),
            best_genome_q=float(generation_best_q),
            mean_fitness=mean(rewards),
            species_count=len(species),
            mean_node_count=mean(len(g.nodes) for g in population),
            mean_enabled_connections=mean(
                sum(1 for c in g.connections.values() if c.enabled) for g in population),
        )
        records.append(record)
        if on_record is not None:
            on_record(record)
        if gen < generations - 1:
            population = reproduce(species, neat_cfg, registry, rng, population_size)

    meta = {"env": spec.name, "generation": champion_generation,
            "fitness": champion_reward, "q_score": champion_q}
    return records, champion, meta


# --- experiments ------------------------------------------------------------------

def _summarize(all_records: list[list[RunRecord]]):
    generations = len(all_records[0])
    summary_rows = []
    for g in range(generations):
        fits = [records[g].best_fitness for records in all_records]
        qs = [records[g].best_genome_q for records in all_records]
        summary_rows.append((g, mean(fits), sample_std(fits), mean(qs), sample_std(qs)))
    final_rows = [(i, records[-1].best_fitness, records[-1].best_genome_q)
                  for i, records in enumerate(all_records)]
    return summary_rows, final_rows


def _run_family(config: ExperimentConfig, out_dir: str,
                q_importance: QImportanceConfig | None):
    """Shared multi-run loop for the dynamics experiment and one sweep branch."""
    spec = config.spec()
    generations = config.resolved_generations()
    os.makedirs(out_dir, exist_ok=True)
    all_records = []
    champions = []
    for run_idx in range(config.runs):
        run_seed = derive(config.master_seed, run_idx)
        flusher = _RowFlusher(os.path.join(out_dir, f"run_{run_idx:02d}.csv"), RUN_COLUMNS)
        try:
            records, champion, meta = evolve_run(
                spec, config.neat, config.population_size, generations, run_seed,
                episodes=config.episodes_per_eval, q_importance=q_importance,
                workers=config.workers, on_record=flusher)
        finally:
            flusher.close()
        save_genome(champion, os.path.join(out_dir, f"best_genome_run_{run_idx:02d}.json"),
                    metadata=meta)
        all_records.append(records)
        champions.append(meta)
    summary_rows, final_rows = _summarize(all_records)
    write_csv(os.path.join(out_dir, "summary.csv"), SUMMARY_COLUMNS, summary_rows)
    write_csv(os.path.join(out_dir, "final_distribution.csv"),
              ("run", "best_fitness", "best_genome_q"), final_rows)
    return all_records, champions


def run_dynamics_experiment(config: ExperimentConfig):
    """Plain-fitness NEAT runs; emits per-run CSVs, summary, final distributions."""
    config.validate()
    return _run_family(config, config.out_dir, q_importance=None)


def importance_dir(out_dir: str, importance: float) -> str:
    return os.path.join(out_dir, f"i_{importance:g}")


def run_importance_sweep(config: ExperimentConfig):
    """Dynamics pipeline per Q-importance value, plus a cross-importance summary.

    Run seeds depend only on (master_seed, run index), so the importance-0
    branch reproduces the plain dynamics experiment byte for byte and branches
    are pairwise comparable.
    """
    config.validate()
    if not config.q_importance:
        raise ConfigError("sweep requires at least one q-importance value")
    os.makedirs(config.out_dir, exist_ok=True)
    sweep_rows = []
    results = {}
    for importance in config.q_importance:
        bounds = QImportanceConfig(importance, config.fitness_lower_bound,
                                   config.fitness_upper_bound)
        branch_dir = importance_dir(config.out_dir, importance)
        all_records, champions = _run_family(config, branch_dir, q_importance=bounds)
        final_f = [records[-1].best_fitness for records in all_records]
        final_q = [records[-1].best_genome_q for records in all_records]
        sweep_rows.append((importance, mean(final_f), sample_std(final_f),
                           mean(final_q), sample_std(final_q)))
        results[importance] = all_records
    write_csv(os.path.join(config.out_dir, "sweep_summary.csv"),
              ("importance", "final_fitness_mean", "final_fitness_std",
               "final_q_mean", "final_q_std"), sweep_rows)
    return results


def run_map_elites_experiment(config: ExperimentConfig):
    """One MAP-Elites run; emits archive CSV, SVG heatmap, and history CSV."""
    from .plots import heatmap_svg  # deferred: plots imports this module's CSV helpers

    config.validate()
    spec = config.spec()
    os.makedirs(config.out_dir, exist_ok=True)
    archive, history = map_elites_run(
        spec, config.master_seed, neat_cfg=config.neat, me_cfg=config.map_elites,
        episodes=config.episodes_per_eval, workers=config.workers)

    genome_dir = os.path.join(config.out_dir, "genomes")
    os.makedirs(genome_dir, exist_ok=True)
    archive_rows = []
    for (qi, di), elite in archive.items():
        fname = os.path.join("genomes", f"elite_q{qi:02d}_d{di:02d}.json")
        save_genome(elite.genome, os.path.join(config.out_dir, fname),
                    metadata={"env": spec.name, "generation": elite.generation,
                              "fitness": elite.fitness, "q_score": elite.q,
                              "torque_deviation": elite.d, "eval_seed": elite.eval_seed})
        archive_rows.append((qi, di, elite.q, elite.d, elite.fitness, fname))
    write_csv(os.path.join(config.out_dir, "archive.csv"),
              ("q_cell", "d_cell", "q", "d", "fitness", "genome_file"), archive_rows)
    write_csv(os.path.join(config.out_dir, "history.csv"),
              ("generation", "evaluations", "coverage", "best_fitness"), history)
    with open(os.path.join(config.out_dir, "heatmap.svg"), "w", encoding="utf-8") as fh:
        fh.write(heatmap_svg(archive))
    return archive, history
