# Copyright (c) 2025, LAURA Route contributors
# For license information, please see license.txt

"""
Population machinery shared by the LLM-driven engine and the genetic
baseline: candidate verification, fitness, parent selection and elitist
population update.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from laura_route.core.wsn_model.wsn_model import DATA_CENTER, Route, Scenario, evaluate_route
from laura_route.exceptions import ParameterError, StateError, VerificationError, VerificationKind
from laura_route.utils import throw

logger = logging.getLogger(__name__)

DEFAULT_OMEGA_TOLERANCE = 1e-6


# ============================================================================
# Data Classes
# ============================================================================


@dataclass(frozen=True)
class CandidateIndividual:
	"""Unvalidated route and optional self-reported maximum AoI"""

	route_claim: tuple[int, ...]
	omega_claim: float | None = None

	def __post_init__(self):
		object.__setattr__(self, "route_claim", tuple(self.route_claim))


@dataclass(frozen=True)
class Individual:
	"""A verified route paired with its locally recomputed maximum AoI"""

	route: Route
	omega: float

	@property
	def fitness(self) -> float:
		return fitness(self.omega)

	def to_dict(self) -> dict:
		return {"route": list(self.route.sequence), "omega": self.omega, "fitness": self.fitness}


@dataclass
class _Member:
	individual: Individual
	admitted: int


@dataclass
class Population:
	"""
	Fixed-capacity elitist population.

	Members are kept in admission order; the order is the tie-breaker for
	both best() and truncation.
	"""

	capacity: int
	_members: list[_Member] = field(default_factory=list, init=False, repr=False)
	_admissions: int = field(default=0, init=False, repr=False)

	def __post_init__(self):
		if self.capacity < 1:
			throw(f"Population capacity must be >= 1, got {self.capacity}")

	@property
	def members(self) -> list[Individual]:
		return [member.individual for member in self._members]

	def __len__(self):
		return len(self._members)

	def add(self, individual: Individual) -> Population:
		"""Append without truncation; used while the population is filling up."""
		if len(self._members) >= self.capacity:
			throw("Population is full; use admit_and_truncate", StateError)
		self._members.append(_Member(individual, self._admissions))
		self._admissions += 1
		return self

	def to_dict(self) -> dict:
		return {"capacity": self.capacity, "members": [m.to_dict() for m in self.members]}


# ============================================================================
# Verification
# ============================================================================


def _excerpt(values, limit: int = 12) -> str:
	values = list(values)
	shown = ", ".join(str(v) for v in values[:limit])
	return f"[{shown}{', ...' if len(values) > limit else ''}]"


def check_structure(scenario: Scenario, route_claim) -> Route:
	"""
	Run the structural checks on a claimed route and return it as a Route.

	Order: endpoints, length, duplicates, missing nodes. The first failing
	check raises; later checks are not evaluated.
	"""
	claim = list(route_claim)
	n = scenario.n

	if not claim or claim[0] != DATA_CENTER or claim[-1] != DATA_CENTER:
		first = claim[0] if claim else None
		last = claim[-1] if claim else None
		raise VerificationError(
			VerificationKind.BAD_ENDPOINTS,
			f"route must start and end at the data center (node 0), but it starts at {first} "
			f"and ends at {last}",
		)

	if len(claim) != n + 2:
		raise VerificationError(
			VerificationKind.WRONG_LENGTH,
			f"route has {len(claim)} entries but must have {n + 2}: node 0, each of the {n} "
			f"sensor nodes exactly once, then node 0",
		)

	interior = claim[1:-1]
	counts = Counter(interior)
	duplicates = sorted(node_id for node_id, count in counts.items() if count > 1)
	if duplicates:
		missing = sorted(set(range(1, n + 1)) - set(interior))
		raise VerificationError(
			VerificationKind.DUPLICATE_NODE,
			f"node {duplicates[0]} is visited {counts[duplicates[0]]} times"
			+ (f"; duplicated nodes {duplicates}" if len(duplicates) > 1 else "")
			+ (f"; missing nodes {_excerpt(missing)}" if missing else ""),
		)

	missing = sorted(set(range(1, n + 1)) - set(interior))
	if missing:
		unknown = sorted(set(interior) - set(range(1, n + 1)))
		raise VerificationError(
			VerificationKind.MISSING_NODE,
			f"node {missing[0]} is never visited"
			+ (f"; missing nodes {_excerpt(missing)}" if len(missing) > 1 else "")
			+ (f"; unknown node ids {_excerpt(unknown)}" if unknown else ""),
		)

	return Route(tuple(claim))


def verify(
	scenario: Scenario,
	candidate: CandidateIndividual,
	omega_tolerance: float | None = DEFAULT_OMEGA_TOLERANCE,
) -> Individual:
	"""
	Verify a candidate and return it as an Individual.

	Checks run in order: endpoints at the data center, every node exactly
	once, then (if the candidate reports one and a tolerance is given) the
	claimed maximum AoI against the recomputed value.

	Args:
		scenario: problem instance
		candidate: route claim with optional omega claim
		omega_tolerance: relative tolerance for the omega check; None skips it

	Returns:
		Individual: omega is always the recomputed value, never the claim

	Raises:
		VerificationError: for the first check that fails
	"""
	route = check_structure(scenario, candidate.route_claim)
	omega = evaluate_route(scenario, route).max_aoi

	claim = candidate.omega_claim
	if claim is not None and omega_tolerance is not None:
		if not (math.isfinite(claim) and math.isclose(claim, omega, rel_tol=omega_tolerance, abs_tol=1e-12)):
			raise VerificationError(
				VerificationKind.OBJECTIVE_MISMATCH,
				f"claimed maximum AoI {claim:.6f} s does not match the recomputed {omega:.6f} s",
			)

	return Individual(route=route, omega=omega)


# ============================================================================
# Fitness, selection and update
# ============================================================================


def fitness(omega: float) -> float:
	"""exp(-omega); lower maximum AoI means higher fitness. Underflows to 0 above ~745."""
	return math.exp(-omega)


def select_parents(population: Population, n_p: int, rng: np.random.Generator) -> list[Individual]:
	"""Draw n_p distinct members uniformly at random, without replacement."""
	size = len(population)
	if not 1 <= n_p <= size:
		raise ParameterError(f"Cannot select {n_p} parents from a population of {size}")
	members = population.members
	picks = rng.choice(size, size=n_p, replace=False)
	return [members[int(i)] for i in picks]


def admit_and_truncate(population: Population, newcomer: Individual) -> Population:
	"""
	Add `newcomer`, then drop the single worst member if over capacity.

	Comparison is on omega directly (equivalent to fitness, without its
	underflow). When the newcomer ties the worst incumbent the newcomer is the
	one dropped; among tied incumbents the latest admitted goes.
	"""
	members = population._members
	entry = _Member(newcomer, population._admissions)
	population._admissions += 1
	members.append(entry)

	if len(members) <= population.capacity:
		return population

	worst_omega = max(member.individual.omega for member in members)
	if newcomer.omega >= worst_omega:
		members.pop()
		logger.debug(f"Newcomer omega={newcomer.omega:.6f} rejected at truncation")
		return population

	tied = [i for i, member in enumerate(members) if member.individual.omega == worst_omega]
	removed = members.pop(tied[-1])
	logger.debug(f"Truncated member omega={removed.individual.omega:.6f}")
	return population


def best(population: Population) -> Individual:
	"""Member with minimal omega; earliest admission wins ties."""
	if not len(population):
		throw("Population is empty", StateError)
	return min(population._members, key=lambda member: (member.individual.omega, member.admitted)).individual
