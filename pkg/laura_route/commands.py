# Copyright (c) 2025, LAURA Route contributors
# For license information, please see license.txt

"""
Command line entry point: laura-route {generate, solve, bench, verify}.
"""

import argparse
import logging
import sys
from dataclasses import replace

from laura_route.api.bench import run_experiment
from laura_route.api.generators import build_generator
from laura_route.api.plotting import plot_route
from laura_route.api.prompts import format_route, parse_route_response
from laura_route.config import Algorithm, GeneratorSpec, SuiteConfig, load_suite, load_toml
from laura_route.core.evo_core.evo_core import verify
from laura_route.core.laura_engine.laura_engine import run_laura, run_ledma, write_trace_csv
from laura_route.core.solvers.solvers import run_baseline
from laura_route.core.wsn_model.wsn_model import evaluate_route, generate_scenario, load_scenario, save_scenario
from laura_route.exceptions import LauraError, VerificationError
from laura_route.utils import dump_json, get_app_version, log_message

logger = logging.getLogger(__name__)


def _load_config(path) -> SuiteConfig:
	"""Suite settings from a TOML file; the [suite] table may be omitted for solve."""
	if not path:
		return SuiteConfig()
	document = load_toml(path)
	document.setdefault("suite", {})
	return SuiteConfig.from_dict(document)


# ============================================================================
# Subcommands
# ============================================================================


def cmd_generate(args) -> int:
	config = _load_config(args.config)
	scenario = generate_scenario(args.n, radius_m=args.radius, seed=args.seed, defaults=config.scenario)
	save_scenario(scenario, args.out)
	log_message(f"Scenario with {scenario.n} nodes written to {args.out}", "success")
	return 0


def cmd_solve(args) -> int:
	config = _load_config(args.config)
	if args.generator:
		config.generator = GeneratorSpec.parse(args.generator)
	scenario = load_scenario(args.scenario)
	algorithm = args.algo

	if algorithm in Algorithm.LLM_BACKED:
		if args.backend:
			if args.backend not in config.backends:
				log_message(f"No [llm.{args.backend}] table in --config", "error")
				return 2
			algorithm = f"{algorithm}@{args.backend}"
		spec, llm = config.generator_for(algorithm)
		if not spec.is_mock and llm is None:
			log_message("The llm generator needs an [llm] table in --config", "error")
			return 2
		generator = build_generator(spec, seed=args.seed, llm=llm, exact=config.exact)
		if args.algo == Algorithm.LAURA:
			report = run_laura(scenario, replace(config.laura, seed=args.seed), generator)
			if args.trace:
				write_trace_csv(report, args.trace)
				log_message(f"Trace written to {args.trace}", indent=1)
		else:
			report = run_ledma(scenario, config.ledma_samples, generator)
		best = report.best
		document = report.to_dict()
	else:
		if args.backend:
			log_message(f"--backend only applies to {' and '.join(Algorithm.LLM_BACKED)}", "error")
			return 2
		run = run_baseline(scenario, algorithm, seed=args.seed, genetic=config.genetic, exact=config.exact)
		best = run.best
		document = run.to_dict()

	document["algorithm"] = algorithm
	document["n"] = scenario.n
	if best is not None:
		profile = evaluate_route(scenario, best.route)
		document["profile"] = {
			"per_node_aoi": list(profile.per_node_aoi),
			"max_aoi": profile.max_aoi,
			"mean_aoi": profile.mean_aoi,
			"mission_time": profile.mission_time,
			"travel_objective": profile.travel_objective,
		}
	dump_json(document, args.out)

	if best is None:
		log_message(f"{algorithm} found no valid route; report written to {args.out}", "warning")
		return 1

	log_message(f"{algorithm}: {format_route(best.route)} max AoI {best.omega:.6f} s", "success")
	if args.plot:
		plot_route(scenario, best.route, args.plot, title=algorithm)
		log_message(f"Route plot written to {args.plot}", indent=1)
	return 0


def cmd_bench(args) -> int:
	config = load_suite(args.suite)
	summary = run_experiment(config, args.out)
	out = args.out or config.output_dir
	for group in summary.groups:
		mean = "n/a" if group.mean_omega is None else f"{group.mean_omega:.3f}"
		variance = "n/a" if group.variance_omega is None else f"{group.variance_omega:.3f}"
		log_message(
			f"{group.algorithm:<8} N={group.n:<3} mean={mean} var={variance} "
			f"runs={group.runs} failed={group.failed_runs}",
			indent=1,
		)
	log_message(f"{len(summary.records)} records written to {out}", "success")
	return 0


def cmd_verify(args) -> int:
	scenario = load_scenario(args.scenario)
	try:
		candidate = parse_route_response(args.route, scenario.n)
		if args.omega is not None:
			candidate = replace(candidate, omega_claim=args.omega)
		individual = verify(scenario, candidate)
	except VerificationError as e:
		log_message(f"{e.kind}: {e.detail}", "error")
		return 1

	log_message(f"Valid route, max AoI {individual.omega:.6f} s", "success")
	return 0


# ============================================================================
# Parser
# ============================================================================


def build_parser() -> argparse.ArgumentParser:
	parser = argparse.ArgumentParser(
		prog="laura-route",
		description="UAV routing for minimum maximum Age of Information",
	)
	parser.add_argument("--version", action="version", version=f"%(prog)s {get_app_version()}")
	parser.add_argument("--verbose", "-v", action="store_true", help="Log debug detail")
	sub = parser.add_subparsers(dest="command", required=True)

	generate = sub.add_parser("generate", help="Generate a random scenario")
	generate.add_argument("--n", type=int, required=True, help="Number of sensor nodes")
	generate.add_argument("--radius", type=float, help="Disk radius in meters")
	generate.add_argument("--seed", type=int, default=0)
	generate.add_argument("--config", help="TOML file whose [scenario] table sets the physical parameters")
	generate.add_argument("--out", required=True, help="Scenario JSON to write")
	generate.set_defaults(handler=cmd_generate)

	solve = sub.add_parser("solve", help="Solve one scenario with one algorithm")
	solve.add_argument("--scenario", required=True)
	solve.add_argument("--algo", required=True, choices=Algorithm.ALL)
	solve.add_argument("--config", help="TOML file with [laura], [genetic], [exact], [llm] tables")
	solve.add_argument("--seed", type=int, default=0)
	solve.add_argument("--generator", help="Generator designation, e.g. llm or mock:faulty:0.2")
	solve.add_argument("--backend", help="Named [llm.<name>] table to use for laura or ledma")
	solve.add_argument("--out", required=True, help="Report JSON to write")
	solve.add_argument("--plot", help="SVG file for the best route")
	solve.add_argument("--trace", help="Per-attempt CSV trace (laura only)")
	solve.set_defaults(handler=cmd_solve)

	bench = sub.add_parser("bench", help="Run an experiment suite")
	bench.add_argument("--suite", required=True)
	bench.add_argument("--out", help="Output directory (overrides the suite's output_dir)")
	bench.set_defaults(handler=cmd_bench)

	check = sub.add_parser("verify", help="Verify a route against a scenario")
	check.add_argument("--scenario", required=True)
	check.add_argument("--route", required=True, help='Route such as "[0, 2, 1, 0]"')
	check.add_argument("--omega", type=float, help="Claimed maximum AoI to check as well")
	check.set_defaults(handler=cmd_verify)

	return parser


def main(argv=None) -> int:
	args = build_parser().parse_args(argv)
	logging.basicConfig(
		level=logging.DEBUG if args.verbose else logging.WARNING,
		format="%(levelname)s %(name)s: %(message)s",
	)
	try:
		return args.handler(args)
	except LauraError as e:
		log_message(str(e), "error")
		return 2
	except OSError as e:
		log_message(f"I/O error: {e}", "error")
		return 2


if __name__ == "__main__":
	sys.exit(main())
