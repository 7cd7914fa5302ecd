"""Command-line interface.

Subcommands: evolve (dynamics experiment), sweep (Q-importance), map-elites,
analyze, replay, plot. Flags override config-file values. Exit codes:
0 success, 1 runtime error, 2 usage or I/O error.
"""

import argparse
import json
import sys

from .analyze import analyze_genome
from .envs import get_env_spec, run_episode_recorded, build_net
from .errors import ConfigError, FormatError, NeatLabError
from .experiments import (ExperimentConfig, run_dynamics_experiment,
                          run_importance_sweep, run_map_elites_experiment, write_csv)
from .genome import load_genome
from .plots import render_plots


def _add_experiment_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--config", help="JSON config file (flags override its values)")
    parser.add_argument("--env", choices=["acrobot", "lunar-lander-lite"])
    parser.add_argument("--pop", type=int, help="population size")
    parser.add_argument("--gens", type=int, help="generations")
    parser.add_argument("--runs", type=int, help="independent runs")
    parser.add_argument("--seed", type=int, help="master seed")
    parser.add_argument("--q-importance", help="comma-separated importance values")
    parser.add_argument("--episodes", type=int, help="episodes per evaluation")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--workers", type=int, help="parallel evaluation threads")


def _build_config(args) -> ExperimentConfig:
    if args.config:
        config = ExperimentConfig.from_file(args.config)
    else:
        config = ExperimentConfig()
    overrides = {
        "env": args.env, "population_size": args.pop, "generations": args.gens,
        "runs": args.runs, "master_seed": args.seed,
        "episodes_per_eval": args.episodes, "out_dir": args.out, "workers": args.workers,
    }
    if args.q_importance is not None:
        try:
            overrides["q_importance"] = tuple(float(v) for v in args.q_importance.split(","))
        except ValueError:
            raise ConfigError(f"--q-importance expects comma-separated numbers, "
                              f"got {args.q_importance!r}") from None
    for name, value in overrides.items():
        if value is not None:
            setattr(config, name, value)
    config.validate()
    return config


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="neatlab",
                                     description="NEAT modularity laboratory")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, text in (("evolve", "run the modularity/fitness dynamics experiment"),
                       ("sweep", "run the Q-importance sweep"),
                       ("map-elites", "run MAP-Elites over (Q, D)")):
        p = sub.add_parser(name, help=text)
        _add_experiment_flags(p)

    p = sub.add_parser("analyze", help="report structure and modularity of a saved genome")
    p.add_argument("genome", help="genome JSON file")
    p.add_argument("--env", choices=["acrobot", "lunar-lander-lite"],
                   help="also evaluate on this environment")
    p.add_argument("--episodes", type=int)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("replay", help="roll one episode and export the step trace as CSV")
    p.add_argument("genome")
    p.add_argument("--env", required=True, choices=["acrobot", "lunar-lander-lite"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="trace CSV path")

    p = sub.add_parser("plot", help="render summary.csv into SVG curves")
    p.add_argument("summary", help="summary CSV produced by evolve/sweep")
    p.add_argument("--out", help="output directory (defaults next to the CSV)")
    return parser


def _cmd_replay(args) -> int:
    genome, _meta = load_genome(args.genome)
    spec = get_env_spec(args.env)
    net = build_net(genome, spec)
    trace, rows = run_episode_recorded(net, spec, args.seed)
    n_actions = 1 if spec.name == "acrobot" else spec.n_outputs
    header = (["step"] + [f"obs{i}" for i in range(spec.obs_dim)]
              + [f"action{i}" for i in range(n_actions)] + ["reward"])
    write_csv(args.out, header, rows)
    print(f"wrote {len(rows)} steps to {args.out} "
          f"(total reward {trace.total_reward:.3f})")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "evolve":
            config = _build_config(args)
            run_dynamics_experiment(config)
            print(f"dynamics experiment written to {config.out_dir}")
        elif args.command == "sweep":
            config = _build_config(args)
            run_importance_sweep(config)
            print(f"importance sweep written to {config.out_dir}")
        elif args.command == "map-elites":
            config = _build_config(args)
            run_map_elites_experiment(config)
            print(f"map-elites artifacts written to {config.out_dir}")
        elif args.command == "analyze":
            print(analyze_genome(args.genome, env=args.env, episodes=args.episodes,
                                 eval_seed=args.seed))
        elif args.command == "replay":
            return _cmd_replay(args)
        elif args.command == "plot":
            for path in render_plots(args.summary, args.out):
                print(f"wrote {path}")
    except (OSError, json.JSONDecodeError, FormatError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NeatLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
