# Copyright (c) 2025, LAURA Route contributors
# For license information, please see license.txt

"""
Baseline and oracle solvers.

Every solver optimises the same first-leg-free travel objective: the
outbound leg from the data center never enters any node's AoI, so it is a
path problem that may start anywhere and must end at the data center. All
returned individuals go through verify(), so they are valid by construction.
"""

from __future__ import annotations

import itertools
import logging
import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from laura_route.config import Algorithm, ExactConfig, GeneticConfig
from laura_route.core.evo_core.evo_core import CandidateIndividual, Individual, verify
from laura_route.core.wsn_model.wsn_model import DATA_CENTER, Route, Scenario
from laura_route.exceptions import CapacityError, ParameterError
from laura_route.utils import throw

logger = logging.getLogger(__name__)


class SolveMethod:
	"""Exact solver method constants"""

	AUTO = "auto"
	EXHAUSTIVE = "exhaustive"
	HELD_KARP = "held_karp"


@dataclass
class SolverRun:
	"""Outcome of one solver invocation"""

	best: Individual
	history: list[float] = field(default_factory=list)
	evaluations: int = 0
	wall_time: float = 0.0

	def to_dict(self, include_timing: bool = True) -> dict:
		data = {
			"best": self.best.to_dict(),
			"history": list(self.history),
			"evaluations": self.evaluations,
		}
		if include_timing:
			data["wall_time"] = self.wall_time
		return data


def _individual(scenario: Scenario, interior) -> Individual:
	return verify(scenario, CandidateIndividual((DATA_CENTER, *(int(i) for i in interior), DATA_CENTER)))


# ============================================================================
# Constructive baselines
# ============================================================================


def solve_greedy(scenario: Scenario) -> Individual:
	"""
	Nearest-neighbour chain starting at the data center.

	Ties go to the lowest node id.
	"""
	times = scenario.flight_time_matrix
	unvisited = np.arange(1, scenario.n + 1)
	current = DATA_CENTER
	order = []

	while unvisited.size:
		# argmin returns the first minimum and unvisited stays sorted by id
		nearest = int(unvisited[np.argmin(times[current, unvisited])])
		order.append(nearest)
		unvisited = unvisited[unvisited != nearest]
		current = nearest

	return _individual(scenario, order)


def solve_random(scenario: Scenario, rng: np.random.Generator) -> Individual:
	"""Uniformly random visiting order."""
	return _individual(scenario, rng.permutation(np.arange(1, scenario.n + 1)).tolist())


# ============================================================================
# Genetic baseline
# ============================================================================


def order_crossover(
	p1: Route,
	p2: Route,
	cut: tuple[int, int] | None = None,
	rng: np.random.Generator | None = None,
) -> Route:
	"""
	Order crossover (OX) on route interiors.

	The child keeps p1's interior positions i..j (1-based, inclusive) in
	place. The remaining positions, starting after j and wrapping around,
	take p2's interior nodes in p2 order starting after j, skipping nodes
	already in the kept segment.

	Args:
		p1: parent providing the kept segment
		p2: parent providing the fill order
		cut: (i, j) with 1 <= i < j <= N; drawn from rng when omitted
		rng: required when cut is omitted

	Returns:
		Route: a valid child over the same node set
	"""
	a, b = list(p1.interior), list(p2.interior)
	if sorted(a) != sorted(b):
		throw("order_crossover parents must visit the same node set")
	n = len(a)
	if n < 2:
		return Route(p1.sequence)

	if cut is None:
		if rng is None:
			throw("order_crossover needs either a cut or an rng")
		i, j = sorted(int(x) for x in rng.choice(np.arange(1, n + 1), size=2, replace=False))
	else:
		i, j = cut
		if not 1 <= i < j <= n:
			throw(f"Cut ({i}, {j}) must satisfy 1 <= i < j <= {n}")

	child = [None] * n
	child[i - 1 : j] = a[i - 1 : j]
	kept = set(child[i - 1 : j])
	fill = [node for node in b[j:] + b[:j] if node not in kept]
	positions = list(range(j, n)) + list(range(0, i - 1))
	for position, node in zip(positions, fill, strict=True):
		child[position] = node

	return Route.from_interior(child)


def swap_mutation(route: Route, rng: np.random.Generator) -> Route:
	"""Exchange two distinct interior positions."""
	interior = list(route.interior)
	if len(interior) < 2:
		return route
	x, y = (int(v) for v in rng.choice(len(interior), size=2, replace=False))
	interior[x], interior[y] = interior[y], interior[x]
	return Route.from_interior(interior)


def _tournament(population: list[Individual], size: int, rng: np.random.Generator) -> Individual:
	picks = rng.choice(len(population), size=min(size, len(population)), replace=False)
	return min((population[int(i)] for i in picks), key=lambda individual: individual.omega)


def solve_genetic(scenario: Scenario, config: GeneticConfig | None = None) -> SolverRun:
	"""
	Classical generational GA with one elite carried over.

	Tournament selection, order crossover with probability crossover_rate,
	swap mutation with probability mutation_rate. history[g] is the best
	omega after generation g (history[0] is the initial population).
	"""
	config = config or GeneticConfig()
	config.validate()
	started = time.perf_counter()
	rng = np.random.default_rng(config.seed)
	size = config.population_size

	population = [solve_random(scenario, rng) for _ in range(size)]
	evaluations = size
	elite = min(population, key=lambda individual: individual.omega)
	history = [elite.omega]

	for _ in range(config.generations):
		offspring = [elite]
		while len(offspring) < size:
			first = _tournament(population, config.tournament_size, rng)
			second = _tournament(population, config.tournament_size, rng)
			child = first.route
			if rng.random() < config.crossover_rate:
				child = order_crossover(first.route, second.route, rng=rng)
			if rng.random() < config.mutation_rate:
				child = swap_mutation(child, rng)
			offspring.append(verify(scenario, CandidateIndividual(child.sequence)))
			evaluations += 1

		population = offspring
		elite = min(population, key=lambda individual: individual.omega)
		history.append(elite.omega)

	wall_time = time.perf_counter() - started
	logger.debug(
		f"Genetic finished: n={scenario.n} generations={config.generations} best={elite.omega:.6f} "
		f"evaluations={evaluations}"
	)
	return SolverRun(best=elite, history=history, evaluations=evaluations, wall_time=wall_time)


# ============================================================================
# Exact oracles
# ============================================================================

_PERMUTATIONS: dict[int, np.ndarray] = {}


def _permutations(n: int) -> np.ndarray:
	if n not in _PERMUTATIONS:
		table = np.array(list(itertools.permutations(range(1, n + 1))), dtype=np.int16)
		table.setflags(write=False)
		_PERMUTATIONS[n] = table
	return _PERMUTATIONS[n]


def exhaustive_order(scenario: Scenario) -> tuple[float, list[int]]:
	"""
	Scan every visiting order.

	Permutations are generated in lexicographic order and argmin keeps the
	first minimum, so ties resolve to the lexicographically smallest route.

	Returns:
		(objective, interior): optimal travel objective and visiting order
	"""
	times = scenario.flight_time_matrix
	perms = _permutations(scenario.n)
	costs = times[perms[:, :-1], perms[:, 1:]].sum(axis=1) + times[perms[:, -1], DATA_CENTER]
	index = int(np.argmin(costs))
	return float(costs[index]), perms[index].tolist()


def held_karp_order(scenario: Scenario) -> tuple[float, list[int]]:
	"""
	Bitmask dynamic programme for the first-leg-free path.

	dp[S][j] is the cheapest path that visits exactly the node set S, may
	start at any node of S and ends at j. Arcs out of the data center cost
	nothing, so the optimum is min_j dp[all][j] + t(j, data center).

	Returns:
		(objective, interior): optimal travel objective and visiting order
	"""
	n = scenario.n
	times = scenario.flight_time_matrix
	cost = np.asarray(times[1:, 1:])
	home = np.asarray(times[1:, DATA_CENTER])

	full = 1 << n
	dp = np.full((full, n), np.inf)
	parent = np.full((full, n), -1, dtype=np.int8)
	bits = np.arange(n)
	for j in range(n):
		dp[1 << j, j] = 0.0

	for mask in range(1, full):
		if mask & (mask - 1) == 0:
			continue
		members = bits[(mask >> bits) & 1 == 1]
		prev = mask ^ (1 << members)
		candidates = dp[prev] + cost[:, members].T
		choice = np.argmin(candidates, axis=1)
		dp[mask, members] = candidates[np.arange(members.size), choice]
		parent[mask, members] = choice

	totals = dp[full - 1] + home
	last = int(np.argmin(totals))
	objective = float(totals[last])

	order = [last]
	mask = full - 1
	while mask & (mask - 1):
		previous = int(parent[mask, order[-1]])
		mask ^= 1 << order[-1]
		order.append(previous)
	order.reverse()

	return objective, [index + 1 for index in order]


def solve_exact(
	scenario: Scenario,
	method: str = SolveMethod.AUTO,
	config: ExactConfig | None = None,
) -> Individual:
	"""
	Optimal route for the travel objective (and therefore for max AoI).

	Args:
		scenario: problem instance
		method: auto (exhaustive up to its cap, Held-Karp beyond), exhaustive
			or held_karp
		config: node-count caps

	Returns:
		Individual: optimal route; omega = tau_sum + optimal travel objective

	Raises:
		CapacityError: N exceeds the cap of the selected method
	"""
	config = config or ExactConfig()
	n = scenario.n

	if method == SolveMethod.AUTO:
		if n <= config.exhaustive_cap:
			method = SolveMethod.EXHAUSTIVE
		elif n <= config.held_karp_cap:
			method = SolveMethod.HELD_KARP
		else:
			throw(f"N={n} exceeds the Held-Karp cap of {config.held_karp_cap} nodes", CapacityError)

	if method == SolveMethod.EXHAUSTIVE:
		if n > config.exhaustive_cap:
			throw(f"N={n} exceeds the exhaustive cap of {config.exhaustive_cap} nodes", CapacityError)
		objective, interior = exhaustive_order(scenario)
	elif method == SolveMethod.HELD_KARP:
		if n > config.held_karp_cap:
			throw(f"N={n} exceeds the Held-Karp cap of {config.held_karp_cap} nodes", CapacityError)
		objective, interior = held_karp_order(scenario)
	else:
		raise ParameterError(f"Unknown exact method '{method}'")

	logger.debug(f"Exact ({method}) n={n} objective={objective:.6f}")
	return _individual(scenario, interior)


# ============================================================================
# Uniform entry point
# ============================================================================


def run_baseline(
	scenario: Scenario,
	algorithm: str,
	seed: int = 0,
	genetic: GeneticConfig | None = None,
	exact: ExactConfig | None = None,
) -> SolverRun:
	"""
	Run one of the non-LLM solvers and wrap the result as a SolverRun.

	Args:
		scenario: problem instance
		algorithm: greedy, random, genetic or exact
		seed: seeds random and overrides genetic.seed
		genetic: genetic settings
		exact: exact solver caps

	Returns:
		SolverRun
	"""
	started = time.perf_counter()

	if algorithm == Algorithm.GENETIC:
		return solve_genetic(scenario, replace(genetic or GeneticConfig(), seed=seed))

	if algorithm == Algorithm.GREEDY:
		best = solve_greedy(scenario)
		evaluations = 1
	elif algorithm == Algorithm.RANDOM:
		best = solve_random(scenario, np.random.default_rng(seed))
		evaluations = 1
	elif algorithm == Algorithm.EXACT:
		exact = exact or ExactConfig()
		best = solve_exact(scenario, config=exact)
		n = scenario.n
		evaluations = math.factorial(n) if n <= exact.exhaustive_cap else (1 << n) * n
	else:
		raise ParameterError(f"'{algorithm}' is not a baseline solver")

	return SolverRun(
		best=best,
		history=[best.omega],
		evaluations=evaluations,
		wall_time=time.perf_counter() - started,
	)
