"""neatlab: NEAT neuroevolution with modularity instrumentation.

Building blocks: graph modularity scoring and maximization (:mod:`.graphmod`),
NEAT genomes and operators (:mod:`.genome`, :mod:`.neat`), compiled phenotypes
(:mod:`.nets`), native control environments (:mod:`.envs`), the deviation and
modularity-reward objectives (:mod:`.objectives`), a (Q, D) MAP-Elites archive
(:mod:`.mapelites`) and the experiment harness (:mod:`.experiments`).
"""

from .accel import NUMBA_ENABLED, backend_name
from .envs import (ACROBOT, ENV_SPECS, LUNAR_LANDER_LITE, EnvSpec, EpisodeTrace,
                   EvalResult, evaluate, evaluate_population, get_env_spec, run_episode)
from .errors import (ConfigError, ContractError, CycleError, ExtinctionError,
                     FormatError, GraphSizeError, NeatLabError, SimulationError,
                     ZeroEdgeGraphError)
from .experiments import (ExperimentConfig, RunRecord, evolve_run,
                          run_dynamics_experiment, run_importance_sweep,
                          run_map_elites_experiment)
from .genome import (ConnectionGene, Genome, InnovationRegistry, NodeGene,
                     load_genome, save_genome)
from .graphmod import (ModularityResult, Partition, UndirectedGraph, approx_max_q,
                       brute_force_max_q, genome_modularity, genome_to_graph, q_score)
from .mapelites import ArchiveGrid, MapElitesConfig, descriptors, map_elites_run
from .neat import (NeatConfig, Species, compatibility_distance, crossover,
                   init_population, mutate, reproduce, speciate)
from .nets import FeedForwardNet, RecurrentNet, activate, build_feedforward, build_recurrent
from .objectives import QImportanceConfig, modularity_reward_fitness, torque_deviation

__version__ = "0.1.0"
