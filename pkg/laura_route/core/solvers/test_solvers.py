# Copyright (c) 2025, LAURA Route contributors
# See license.txt

import math
import unittest
from collections import Counter
from dataclasses import replace

import numpy as np

from laura_route.config import Algorithm, ExactConfig, GeneticConfig
from laura_route.core.solvers.solvers import (
	SolveMethod,
	exhaustive_order,
	held_karp_order,
	order_crossover,
	run_baseline,
	solve_exact,
	solve_genetic,
	solve_greedy,
	solve_random,
	swap_mutation,
)
from laura_route.core.wsn_model.wsn_model import (
	Route,
	build_scenario,
	generate_scenario,
	load_scenario,
	route_objective,
)
from laura_route.exceptions import CapacityError, ParameterError
from laura_route.utils import get_fixture_path

SMALL_GA = GeneticConfig(population_size=20, generations=40, seed=3)


def triangle():
	return load_scenario(get_fixture_path("triangle_scenario.json"))


class TestGreedyAndRandom(unittest.TestCase):
	def test_greedy_triangle(self):
		result = solve_greedy(triangle())
		self.assertEqual(result.route.sequence, (0, 1, 2, 0))
		self.assertEqual(result.omega, 11.0)

	def test_greedy_tie_goes_to_lowest_id(self):
		scenario = build_scenario([(0.0, 10.0), (10.0, 0.0), (0.0, -10.0)])
		self.assertEqual(solve_greedy(scenario).route.interior[0], 1)

	def test_random_is_uniform(self):
		scenario = generate_scenario(3, seed=1)
		rng = np.random.default_rng(10)
		counts = Counter(solve_random(scenario, rng).route.sequence for _ in range(6000))
		self.assertEqual(len(counts), 6)
		for count in counts.values():
			self.assertAlmostEqual(count, 1000, delta=150)


class TestOrderCrossover(unittest.TestCase):
	def test_known_cut(self):
		child = order_crossover(
			Route.from_interior([1, 2, 3, 4, 5]),
			Route.from_interior([5, 4, 3, 2, 1]),
			cut=(2, 4),
		)
		self.assertEqual(child.interior, (5, 2, 3, 4, 1))

	def test_random_cuts_give_valid_children(self):
		rng = np.random.default_rng(0)
		for _ in range(300):
			n = int(rng.integers(2, 30))
			p1 = Route.from_interior(rng.permutation(np.arange(1, n + 1)).tolist())
			p2 = Route.from_interior(rng.permutation(np.arange(1, n + 1)).tolist())
			child = order_crossover(p1, p2, rng=rng)
			self.assertEqual(sorted(child.interior), list(range(1, n + 1)))

	def test_identical_parents(self):
		parent = Route.from_interior([3, 1, 2, 4])
		self.assertEqual(order_crossover(parent, parent, cut=(1, 3)), parent)

	def test_invalid_inputs(self):
		with self.assertRaises(ParameterError):
			order_crossover(Route.from_interior([1, 2]), Route.from_interior([1, 2, 3]), cut=(1, 2))
		with self.assertRaises(ParameterError):
			order_crossover(Route.from_interior([1, 2, 3]), Route.from_interior([3, 2, 1]), cut=(3, 2))
		with self.assertRaises(ParameterError):
			order_crossover(Route.from_interior([1, 2, 3]), Route.from_interior([3, 2, 1]))

	def test_single_node(self):
		parent = Route((0, 1, 0))
		self.assertEqual(order_crossover(parent, parent), parent)
		self.assertEqual(swap_mutation(parent, np.random.default_rng(0)), parent)

	def test_swap_mutation_changes_two_positions(self):
		route = Route.from_interior(range(1, 9))
		mutated = swap_mutation(route, np.random.default_rng(4))
		changed = [a != b for a, b in zip(route.interior, mutated.interior, strict=True)]
		self.assertEqual(sum(changed), 2)


class TestExact(unittest.TestCase):
	def test_triangle(self):
		result = solve_exact(triangle())
		self.assertEqual(result.route.sequence, (0, 2, 1, 0))
		self.assertEqual(result.omega, 9.0)
		self.assertEqual(solve_exact(triangle(), method=SolveMethod.HELD_KARP).omega, 9.0)

	def test_single_node(self):
		scenario = generate_scenario(1, seed=2)
		for method in (SolveMethod.EXHAUSTIVE, SolveMethod.HELD_KARP):
			self.assertEqual(solve_exact(scenario, method=method).route.sequence, (0, 1, 0))

	def test_held_karp_matches_exhaustive(self):
		for seed in range(100):
			scenario = generate_scenario(8, seed=seed)
			brute, _ = exhaustive_order(scenario)
			dp, interior = held_karp_order(scenario)
			self.assertTrue(math.isclose(brute, dp, rel_tol=1e-9), f"seed {seed}: {brute} != {dp}")
			self.assertTrue(math.isclose(route_objective(scenario, Route.from_interior(interior)), dp, rel_tol=1e-9))

	def test_held_karp_fifteen_nodes(self):
		scenario = generate_scenario(15, seed=42)
		optimal = solve_exact(scenario)
		self.assertEqual(sorted(optimal.route.interior), list(range(1, 16)))
		self.assertLessEqual(optimal.omega, solve_greedy(scenario).omega + 1e-9)
		self.assertLessEqual(optimal.omega, solve_genetic(scenario, SMALL_GA).best.omega + 1e-9)
		objective, _ = held_karp_order(scenario)
		self.assertTrue(math.isclose(optimal.omega, scenario.tau_sum + objective, rel_tol=1e-9))

	def test_relabelling_does_not_change_the_optimum(self):
		rng = np.random.default_rng(12)
		for method, n, seeds in ((SolveMethod.EXHAUSTIVE, 7, range(10)), (SolveMethod.HELD_KARP, 12, range(5))):
			for seed in seeds:
				base = generate_scenario(n, seed=seed)
				coords = [(node.position.x, node.position.y) for node in base.nodes]
				shuffled = [coords[i] for i in rng.permutation(len(coords))]
				original = solve_exact(build_scenario(coords), method=method).omega
				relabelled = solve_exact(build_scenario(shuffled), method=method).omega
				self.assertTrue(math.isclose(original, relabelled, rel_tol=1e-9), f"{method} seed {seed}")

	def test_exact_dominates_heuristics(self):
		rng = np.random.default_rng(21)
		for seed in range(20):
			scenario = generate_scenario(int(rng.integers(3, 9)), seed=seed)
			optimal = solve_exact(scenario).omega
			self.assertLessEqual(optimal, solve_greedy(scenario).omega + 1e-9)
			self.assertLessEqual(optimal, solve_random(scenario, rng).omega + 1e-9)
			self.assertLessEqual(optimal, solve_genetic(scenario, SMALL_GA).best.omega + 1e-9)

	def test_caps(self):
		with self.assertRaises(CapacityError) as ctx:
			solve_exact(generate_scenario(19, seed=0))
		self.assertIn("18", str(ctx.exception))
		with self.assertRaises(CapacityError) as ctx:
			solve_exact(generate_scenario(10, seed=0), method=SolveMethod.EXHAUSTIVE)
		self.assertIn("9", str(ctx.exception))
		with self.assertRaises(CapacityError):
			solve_exact(generate_scenario(6, seed=0), config=ExactConfig(exhaustive_cap=4, held_karp_cap=5))
		with self.assertRaises(ParameterError):
			solve_exact(triangle(), method="simplex")


class TestGenetic(unittest.TestCase):
	def test_deterministic(self):
		scenario = generate_scenario(12, seed=5)
		first = solve_genetic(scenario, SMALL_GA)
		second = solve_genetic(scenario, SMALL_GA)
		self.assertEqual(first.history, second.history)
		self.assertEqual(first.best, second.best)

	def test_history_is_non_increasing(self):
		run = solve_genetic(generate_scenario(15, seed=9), SMALL_GA)
		self.assertEqual(len(run.history), SMALL_GA.generations + 1)
		for earlier, later in zip(run.history, run.history[1:]):
			self.assertLessEqual(later, earlier)
		self.assertEqual(run.history[-1], run.best.omega)
		self.assertEqual(run.evaluations, 20 + 40 * 19)

	def test_reaches_near_optimum_on_small_instances(self):
		scenario = generate_scenario(7, seed=31)
		run = solve_genetic(scenario, GeneticConfig(population_size=30, generations=100, seed=1))
		optimal = solve_exact(scenario).omega
		self.assertLessEqual(run.best.omega, optimal * 1.10)


class TestRunBaseline(unittest.TestCase):
	def test_every_baseline(self):
		scenario = generate_scenario(6, seed=4)
		for algorithm in (Algorithm.GREEDY, Algorithm.RANDOM, Algorithm.EXACT, Algorithm.GENETIC):
			with self.subTest(algorithm=algorithm):
				run = run_baseline(scenario, algorithm, seed=7, genetic=SMALL_GA)
				self.assertEqual(run.history[-1], run.best.omega)
				self.assertGreaterEqual(run.wall_time, 0.0)
				self.assertNotIn("wall_time", run.to_dict(include_timing=False))

	def test_seed_overrides_genetic_config(self):
		scenario = generate_scenario(8, seed=4)
		a = run_baseline(scenario, Algorithm.GENETIC, seed=1, genetic=SMALL_GA)
		b = run_baseline(scenario, Algorithm.GENETIC, seed=1, genetic=replace(SMALL_GA, seed=99))
		self.assertEqual(a.history, b.history)

	def test_exact_evaluation_count(self):
		self.assertEqual(run_baseline(generate_scenario(5, seed=0), Algorithm.EXACT).evaluations, 120)

	def test_llm_algorithms_rejected(self):
		with self.assertRaises(ParameterError):
			run_baseline(triangle(), Algorithm.LAURA)
