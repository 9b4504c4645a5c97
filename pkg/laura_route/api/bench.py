# Copyright (c) 2025, LAURA Route contributors
# For license information, please see license.txt

"""
Experiment harness.

A suite generates cases_per_count random scenarios per node count and lets
every scheduled algorithm solve each of them runs_per_case times. Each
(algorithm, n, case, run) cell gets its own seed, so cells can run on a
thread pool in any order and still produce the same records.

LLM-backed algorithms may name a backend, as in "laura@deepseek-v3". The
whole label is the record's algorithm and part of its seed, so adding a
backend leaves the streams of every other label untouched.
"""

from __future__ import annotations

import csv
import logging
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import nullcontext
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from laura_route.api.generators import build_generator
from laura_route.api.plotting import plot_route
from laura_route.config import Algorithm, SuiteConfig, split_label
from laura_route.core.evo_core.evo_core import Individual
from laura_route.core.laura_engine.laura_engine import run_laura, run_ledma, write_trace_csv
from laura_route.core.solvers.solvers import run_baseline
from laura_route.core.wsn_model.wsn_model import Scenario, generate_scenario, route_objective
from laura_route.exceptions import GatewayError, ParameterError
from laura_route.utils import derive_seed, dump_json

logger = logging.getLogger(__name__)

CSV_COLUMNS = (
	"algorithm",
	"n",
	"case",
	"run",
	"seed",
	"best_omega",
	"travel_objective",
	"epsilon",
	"wall_time_s",
	"failed",
)


# ============================================================================
# Records and summaries
# ============================================================================


def _float_cell(value: float | None) -> str:
	return "" if value is None else repr(float(value))


def _parse_float(text: str) -> float | None:
	return None if text == "" else float(text)


@dataclass(frozen=True)
class RunRecord:
	"""One (algorithm, n, case, run) cell of a suite"""

	algorithm: str
	n: int
	case: int
	run: int
	seed: int
	best_omega: float | None
	travel_objective: float | None
	epsilon: float
	wall_time_s: float
	failed: bool = False

	@property
	def key(self) -> tuple[str, int, int, int]:
		return (self.algorithm, self.n, self.case, self.run)

	def to_row(self) -> list[str]:
		return [
			self.algorithm,
			str(self.n),
			str(self.case),
			str(self.run),
			str(self.seed),
			_float_cell(self.best_omega),
			_float_cell(self.travel_objective),
			_float_cell(self.epsilon),
			_float_cell(self.wall_time_s),
			"true" if self.failed else "false",
		]

	@classmethod
	def from_row(cls, row: dict) -> RunRecord:
		try:
			return cls(
				algorithm=row["algorithm"],
				n=int(row["n"]),
				case=int(row["case"]),
				run=int(row["run"]),
				seed=int(row["seed"]),
				best_omega=_parse_float(row["best_omega"]),
				travel_objective=_parse_float(row["travel_objective"]),
				epsilon=float(row["epsilon"]),
				wall_time_s=float(row["wall_time_s"]),
				failed=row["failed"] == "true",
			)
		except (KeyError, ValueError) as e:
			raise ParameterError(f"Malformed record row {row}: {e}")


@dataclass
class AlgorithmSummary:
	"""Aggregate of one (algorithm, node count) group; failed runs are excluded from the statistics"""

	algorithm: str
	n: int
	mean_omega: float | None
	variance_omega: float | None
	mean_epsilon: float | None
	runs: int
	failed_runs: int

	def to_dict(self) -> dict:
		return dict(self.__dict__)


@dataclass
class ExperimentSummary:
	groups: list[AlgorithmSummary] = field(default_factory=list)
	records: list[RunRecord] = field(default_factory=list)
	cases: list[dict] = field(default_factory=list)

	def group(self, algorithm: str, n: int) -> AlgorithmSummary:
		for group in self.groups:
			if group.algorithm == algorithm and group.n == n:
				return group
		raise KeyError((algorithm, n))

	def to_dict(self) -> dict:
		return {
			"groups": [group.to_dict() for group in self.groups],
			"cases": list(self.cases),
			"record_count": len(self.records),
		}


def summarize(values) -> tuple[float, float]:
	"""
	Arithmetic mean and population variance (divide by n).

	Raises:
		ParameterError: for an empty input
	"""
	data = np.asarray(list(values), dtype=float)
	if data.size == 0:
		raise ParameterError("Cannot summarize an empty list")
	return float(data.mean()), float(data.var())


def aggregate(records: list[RunRecord], algorithms: list[str], node_counts: list[int]) -> list[AlgorithmSummary]:
	groups = []
	for algorithm in algorithms:
		for n in node_counts:
			members = [r for r in records if r.algorithm == algorithm and r.n == n]
			ok = [r for r in members if not r.failed and r.best_omega is not None]
			mean = variance = epsilon = None
			if ok:
				mean, variance = summarize(r.best_omega for r in ok)
				epsilon, _ = summarize(r.epsilon for r in ok)
			groups.append(
				AlgorithmSummary(
					algorithm=algorithm,
					n=n,
					mean_omega=mean,
					variance_omega=variance,
					mean_epsilon=epsilon,
					runs=len(members),
					failed_runs=len(members) - len(ok),
				)
			)
	return groups


def write_records_csv(records: list[RunRecord], path: str | Path) -> Path:
	path = Path(path)
	path.parent.mkdir(parents=True, exist_ok=True)
	with path.open("w", newline="") as handle:
		writer = csv.writer(handle)
		writer.writerow(CSV_COLUMNS)
		for record in records:
			writer.writerow(record.to_row())
	return path


def read_records_csv(path: str | Path) -> list[RunRecord]:
	with Path(path).open(newline="") as handle:
		reader = csv.DictReader(handle)
		if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
			raise ParameterError(f"{path} does not have the record columns {', '.join(CSV_COLUMNS)}")
		return [RunRecord.from_row(row) for row in reader]


# ============================================================================
# Suite execution
# ============================================================================


@dataclass(frozen=True)
class _Cell:
	algorithm: str
	n: int
	case: int
	run: int
	seed: int


class _Runner:
	def __init__(self, config: SuiteConfig, output_dir: Path):
		self.config = config
		self.output_dir = output_dir
		self.llm_gate = threading.Semaphore(config.llm_concurrency)

	def solve(self, cell: _Cell, scenario: Scenario) -> tuple[RunRecord, Individual | None]:
		config = self.config
		started = time.perf_counter()
		epsilon = 0.0
		failed = False

		try:
			name, _ = split_label(cell.algorithm)
			if name in Algorithm.LLM_BACKED:
				spec, llm = config.generator_for(cell.algorithm)
				generator = build_generator(spec, seed=cell.seed, llm=llm, exact=config.exact)
				gate = nullcontext() if spec.is_mock else self.llm_gate
				with gate:
					if name == Algorithm.LAURA:
						report = run_laura(scenario, replace(config.laura, seed=cell.seed), generator)
					else:
						report = run_ledma(scenario, config.ledma_samples, generator)
				best = report.best
				epsilon = report.hallucination_rate
				failed = report.failed or best is None
				if config.emit_traces and name == Algorithm.LAURA:
					write_trace_csv(
						report,
						self.output_dir / "traces" / f"{cell.algorithm}_n{cell.n}_case{cell.case}_run{cell.run}.csv",
					)
			else:
				best = run_baseline(
					scenario, name, seed=cell.seed, genetic=config.genetic, exact=config.exact
				).best
		except GatewayError as e:
			logger.warning(f"{cell.algorithm} n={cell.n} case={cell.case} run={cell.run} failed: {e}")
			best, epsilon, failed = None, 1.0, True

		if failed:
			logger.warning(f"{cell.algorithm} n={cell.n} case={cell.case} run={cell.run} marked failed")

		record = RunRecord(
			algorithm=cell.algorithm,
			n=cell.n,
			case=cell.case,
			run=cell.run,
			seed=cell.seed,
			best_omega=None if best is None else best.omega,
			travel_objective=None if best is None else route_objective(scenario, best.route),
			epsilon=epsilon,
			wall_time_s=time.perf_counter() - started,
			failed=failed,
		)
		return record, best


def run_experiment(config: SuiteConfig, output_dir: str | Path | None = None) -> ExperimentSummary:
	"""
	Run a suite and write its artifacts.

	Writes records.csv, summary.json, suite.json and, when enabled, route
	plots under plots/ and LAURA traces under traces/.

	Args:
		config: validated suite configuration
		output_dir: overrides config.output_dir

	Returns:
		ExperimentSummary: groups in (algorithm, n) order, records sorted by key
	"""
	config.validate()
	out = Path(output_dir or config.output_dir)
	out.mkdir(parents=True, exist_ok=True)

	scenarios: dict[tuple[int, int], Scenario] = {}
	cases = []
	for n in config.node_counts:
		for case in range(config.cases_per_count):
			scenario_seed = config.base_seed + case
			scenarios[(n, case)] = generate_scenario(n, seed=scenario_seed, defaults=config.scenario)
			cases.append({"n": n, "case": case, "scenario_seed": scenario_seed})

	cells = [
		_Cell(algorithm, n, case, run, derive_seed(config.base_seed, n, case, run, algorithm))
		for algorithm in config.algorithms
		for n in config.node_counts
		for case in range(config.cases_per_count)
		for run in range(config.runs_per_case)
	]
	logger.info(
		f"Suite: {len(cells)} runs over node counts {config.node_counts}, "
		f"algorithms {', '.join(config.algorithms)}, {config.workers} worker(s)"
	)

	runner = _Runner(config, out)
	with ThreadPoolExecutor(max_workers=config.workers) as pool:
		results = list(pool.map(lambda cell: runner.solve(cell, scenarios[(cell.n, cell.case)]), cells))

	results.sort(key=lambda item: item[0].key)
	records = [record for record, _ in results]
	summary = ExperimentSummary(
		groups=aggregate(records, config.algorithms, config.node_counts),
		records=records,
		cases=cases,
	)

	write_records_csv(records, out / "records.csv")
	dump_json(summary.to_dict(), out / "summary.json")
	dump_json(config.to_dict(), out / "suite.json")

	if config.emit_plots:
		for record, best in results:
			if record.case == 0 and record.run == 0 and best is not None:
				plot_route(
					scenarios[(record.n, 0)],
					best.route,
					out / "plots" / f"{record.algorithm}_n{record.n}.svg",
					title=record.algorithm,
				)

	failed = sum(1 for record in records if record.failed)
	logger.info(f"Suite finished: {len(records)} records, {failed} failed, artifacts in {out}")
	return summary
