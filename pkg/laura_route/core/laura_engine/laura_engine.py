# Copyright (c) 2025, LAURA Route contributors
# For license information, please see license.txt

"""
LLM-driven evolutionary search.

run_laura keeps a verified, elitist population and asks a generator for one
offspring per iteration, feeding verification errors back for up to M
attempts. run_ledma is the feedback-free baseline: independent samples, best
valid one wins. Both report every generator proposal as an AttemptLog entry,
from which the hallucination rate is derived.
"""

from __future__ import annotations

import csv
import logging
import time
from abc import ABC, abstractmethod
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from laura_route.config import Algorithm, LauraConfig
from laura_route.core.evo_core.evo_core import (
	CandidateIndividual,
	Individual,
	Population,
	admit_and_truncate,
	best,
	select_parents,
	verify,
)
from laura_route.core.solvers.solvers import solve_random
from laura_route.core.wsn_model.wsn_model import Scenario
from laura_route.exceptions import GatewayError, ParameterError, VerificationError, VerificationKind

logger = logging.getLogger(__name__)

Clock = Callable[[], float]


class AttemptOutcome:
	"""Attempt outcome constants"""

	ACCEPTED = "accepted"
	REJECTED = "rejected"

	# rejection kind for proposals that never arrived because the gateway failed
	TRANSPORT = "Transport"


# ============================================================================
# Generator port
# ============================================================================


class GeneratorPort(ABC):
	"""
	Source of candidate routes.

	Implementations must not mutate the scenario or the parents. They may keep
	conversation state between calls; one engine drives a generator at a time.
	"""

	@abstractmethod
	def propose_initial(self, scenario: Scenario, count: int) -> list[CandidateIndividual]:
		"""Return up to `count` candidates for the initial population."""

	@abstractmethod
	def propose_offspring(
		self,
		scenario: Scenario,
		parents: Sequence[Individual],
		error_feedback: VerificationError | None = None,
	) -> CandidateIndividual:
		"""Return one offspring; error_feedback is set when the previous attempt failed."""


# ============================================================================
# Reports
# ============================================================================


@dataclass(frozen=True)
class AttemptLog:
	"""
	One generator proposal.

	iteration is 0 for initial-population slots (attempt is then the slot
	number) and 1..N_g for offspring requests (attempt in 1..M). best_omega
	is the population best right after this attempt was handled.

	Iteration 0 therefore carries K entries, one per initial slot, all
	stemming from a single propose_initial call. The bound of at most M
	entries per iteration holds for iterations 1..N_g only.
	"""

	iteration: int
	attempt: int
	outcome: str
	kind: str | None = None
	latency: float = 0.0
	best_omega: float | None = None

	@property
	def rejected(self) -> bool:
		return self.outcome == AttemptOutcome.REJECTED

	@property
	def label(self) -> str:
		return self.outcome if not self.rejected else f"{self.outcome}:{self.kind}"

	def to_dict(self, include_timing: bool = True) -> dict:
		data = {
			"iteration": self.iteration,
			"attempt": self.attempt,
			"outcome": self.outcome,
			"kind": self.kind,
			"best_omega": self.best_omega,
		}
		if include_timing:
			data["latency"] = self.latency
		return data


@dataclass
class SolverReport:
	"""Result and diagnostics of one LAURA or LEDMA run"""

	algorithm: str
	best: Individual | None
	final_population: Population
	best_trace: list[float] = field(default_factory=list)
	attempts: list[AttemptLog] = field(default_factory=list)
	hallucination_rate: float = 0.0
	generator_calls: int = 0
	transport_failures: int = 0
	wall_time: float = 0.0

	@property
	def best_omega(self) -> float | None:
		return None if self.best is None else self.best.omega

	@property
	def failed(self) -> bool:
		"""True when no generator call ever reached the model."""
		return self.generator_calls > 0 and self.transport_failures == self.generator_calls

	def to_dict(self, include_timing: bool = True) -> dict:
		data = {
			"algorithm": self.algorithm,
			"best": None if self.best is None else self.best.to_dict(),
			"best_trace": list(self.best_trace),
			"hallucination_rate": self.hallucination_rate,
			"generator_calls": self.generator_calls,
			"transport_failures": self.transport_failures,
			"failed": self.failed,
			"final_population": self.final_population.to_dict(),
			"attempts": [entry.to_dict(include_timing) for entry in self.attempts],
		}
		if include_timing:
			data["wall_time"] = self.wall_time
		return data


def hallucination_rate(attempts: Sequence[AttemptLog]) -> float:
	"""Rejected share of all attempts; 0.0 for an empty list."""
	if not attempts:
		return 0.0
	return sum(1 for entry in attempts if entry.rejected) / len(attempts)


def write_trace_csv(report: SolverReport, path: str | Path) -> Path:
	"""Write one row per attempt: iteration, attempt, outcome, best_omega."""
	path = Path(path)
	path.parent.mkdir(parents=True, exist_ok=True)
	with path.open("w", newline="") as handle:
		writer = csv.writer(handle)
		writer.writerow(["iteration", "attempt", "outcome", "best_omega"])
		for entry in report.attempts:
			writer.writerow(
				[
					entry.iteration,
					entry.attempt,
					entry.label,
					"" if entry.best_omega is None else repr(entry.best_omega),
				]
			)
	return path


# ============================================================================
# Engines
# ============================================================================


class _CallCounter:
	def __init__(self):
		self.calls = 0
		self.transport_failures = 0


def _initialise(
	scenario: Scenario,
	config: LauraConfig,
	generator: GeneratorPort,
	rng: np.random.Generator,
	counter: _CallCounter,
	attempts: list[AttemptLog],
	clock: Clock,
) -> Population:
	population = Population(capacity=config.population_size)
	size = config.population_size

	started = clock()
	missing_kind = VerificationKind.UNPARSEABLE
	counter.calls += 1
	try:
		candidates = list(generator.propose_initial(scenario, size))[:size]
	except GatewayError as e:
		counter.transport_failures += 1
		missing_kind = AttemptOutcome.TRANSPORT
		candidates = []
		logger.warning(f"Initial population request failed: {e}")
	except VerificationError as e:
		candidates = []
		logger.warning(f"Initial population reply rejected: {e}")
	latency = clock() - started

	outcomes = []
	for candidate in candidates:
		try:
			population.add(verify(scenario, candidate, config.omega_tolerance))
			outcomes.append((AttemptOutcome.ACCEPTED, None))
		except VerificationError as e:
			outcomes.append((AttemptOutcome.REJECTED, e.kind))
			logger.debug(f"Initial candidate rejected: {e}")
	outcomes.extend([(AttemptOutcome.REJECTED, missing_kind)] * (size - len(candidates)))

	backfill = size - len(population)
	for _ in range(backfill):
		population.add(solve_random(scenario, rng))
	if backfill:
		logger.warning(f"Back-filled {backfill} of {size} initial individuals with random routes")

	current = best(population).omega
	for slot, (outcome, kind) in enumerate(outcomes, start=1):
		attempts.append(AttemptLog(0, slot, outcome, kind, latency / size, current))
	return population


def run_laura(
	scenario: Scenario,
	config: LauraConfig,
	generator: GeneratorPort,
	clock: Clock = time.perf_counter,
) -> SolverReport:
	"""
	Run the verified evolutionary loop.

	Args:
		scenario: problem instance
		config: K, N_p, N_g, M, omega tolerance and seed
		generator: source of initial candidates and offspring
		clock: time source for latency fields

	Returns:
		SolverReport: best_trace[0] is the initial population's best, then one
		entry per iteration
	"""
	config.validate()
	started = clock()
	rng = np.random.default_rng(config.seed)
	counter = _CallCounter()
	attempts: list[AttemptLog] = []

	logger.info(
		f"LAURA run: n={scenario.n} K={config.population_size} N_p={config.parent_count} "
		f"N_g={config.iterations} M={config.max_attempts} seed={config.seed}"
	)

	population = _initialise(scenario, config, generator, rng, counter, attempts, clock)
	trace = [best(population).omega]

	for iteration in range(1, config.iterations + 1):
		parents = select_parents(population, config.parent_count, rng)
		feedback = None

		for attempt in range(1, config.max_attempts + 1):
			attempt_started = clock()
			counter.calls += 1
			try:
				candidate = generator.propose_offspring(scenario, parents, feedback)
				offspring = verify(scenario, candidate, config.omega_tolerance)
			except VerificationError as e:
				feedback = e
				attempts.append(
					AttemptLog(
						iteration,
						attempt,
						AttemptOutcome.REJECTED,
						e.kind,
						clock() - attempt_started,
						best(population).omega,
					)
				)
				logger.debug(f"Iteration {iteration} attempt {attempt} rejected: {e}")
				continue
			except GatewayError as e:
				counter.transport_failures += 1
				attempts.append(
					AttemptLog(
						iteration,
						attempt,
						AttemptOutcome.REJECTED,
						AttemptOutcome.TRANSPORT,
						clock() - attempt_started,
						best(population).omega,
					)
				)
				logger.warning(f"Iteration {iteration} attempt {attempt}: generator unreachable: {e}")
				continue

			admit_and_truncate(population, offspring)
			attempts.append(
				AttemptLog(
					iteration,
					attempt,
					AttemptOutcome.ACCEPTED,
					None,
					clock() - attempt_started,
					best(population).omega,
				)
			)
			break
		else:
			logger.debug(f"Iteration {iteration}: no admission after {config.max_attempts} attempts")

		trace.append(best(population).omega)

	report = SolverReport(
		algorithm=Algorithm.LAURA,
		best=best(population),
		final_population=population,
		best_trace=trace,
		attempts=attempts,
		hallucination_rate=hallucination_rate(attempts),
		generator_calls=counter.calls,
		transport_failures=counter.transport_failures,
		wall_time=clock() - started,
	)
	logger.info(f"LAURA done: best={report.best_omega:.6f} epsilon={report.hallucination_rate:.3f}")
	return report


def run_ledma(
	scenario: Scenario,
	samples: int,
	generator: GeneratorPort,
	clock: Clock = time.perf_counter,
) -> SolverReport:
	"""
	Sample `samples` independent candidates without feedback or evolution.

	Only the structural checks decide validity; a wrong omega claim is not a
	rejection since omega is recomputed anyway. With no valid sample the
	report's best is None.
	"""
	if samples < 1:
		raise ParameterError(f"samples must be >= 1, got {samples}")

	started = clock()
	counter = _CallCounter()
	attempts: list[AttemptLog] = []
	population = Population(capacity=samples)
	winner: Individual | None = None
	trace: list[float] = []

	for sample in range(1, samples + 1):
		sample_started = clock()
		counter.calls += 1
		kind = None
		try:
			candidates = generator.propose_initial(scenario, 1)
			if not candidates:
				raise VerificationError(VerificationKind.UNPARSEABLE, "the reply contained no route")
			individual = verify(scenario, candidates[0], omega_tolerance=None)
		except VerificationError as e:
			kind = e.kind
		except GatewayError as e:
			counter.transport_failures += 1
			kind = AttemptOutcome.TRANSPORT
			logger.warning(f"LEDMA sample {sample}: generator unreachable: {e}")

		if kind is None:
			population.add(individual)
			if winner is None or individual.omega < winner.omega:
				winner = individual
			trace.append(winner.omega)

		attempts.append(
			AttemptLog(
				sample,
				1,
				AttemptOutcome.ACCEPTED if kind is None else AttemptOutcome.REJECTED,
				kind,
				clock() - sample_started,
				None if winner is None else winner.omega,
			)
		)

	report = SolverReport(
		algorithm=Algorithm.LEDMA,
		best=winner,
		final_population=population,
		best_trace=trace,
		attempts=attempts,
		hallucination_rate=hallucination_rate(attempts),
		generator_calls=counter.calls,
		transport_failures=counter.transport_failures,
		wall_time=clock() - started,
	)
	if winner is None:
		logger.warning(f"LEDMA produced no valid route in {samples} samples")
	else:
		logger.info(f"LEDMA done: best={winner.omega:.6f} epsilon={report.hallucination_rate:.3f}")
	return report
