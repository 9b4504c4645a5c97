# Copyright (c) 2025, LAURA Route contributors
# See license.txt

import unittest

import numpy as np

from laura_route.api.generators import (
	FaultyGenerator,
	LlmGenerator,
	OxGenerator,
	PerfectGenerator,
	build_generator,
)
from laura_route.api.llm_client import ChatExchange
from laura_route.api.prompts import SYSTEM_MESSAGE, PromptSection
from laura_route.config import GeneratorSpec, LlmEndpointConfig
from laura_route.core.evo_core.evo_core import verify
from laura_route.core.wsn_model.wsn_model import build_scenario, generate_scenario, load_scenario
from laura_route.exceptions import ParameterError, VerificationError, VerificationKind
from laura_route.utils import get_fixture_path


def triangle():
	return load_scenario(get_fixture_path("triangle_scenario.json"))


class FakeChat:
	def __init__(self, *replies):
		self.replies = list(replies)
		self.requests = []

	def __call__(self, config, messages):
		self.requests.append(messages)
		return ChatExchange(tuple(messages), self.replies.pop(0), 0.01)


class TestBuildGenerator(unittest.TestCase):
	def test_designations(self):
		self.assertIsInstance(build_generator("mock:perfect"), PerfectGenerator)
		self.assertIsInstance(build_generator("mock:ox"), OxGenerator)
		faulty = build_generator("mock:faulty:0.25", seed=3)
		self.assertIsInstance(faulty, FaultyGenerator)
		self.assertIsInstance(faulty.inner, OxGenerator)
		self.assertEqual(faulty.rate, 0.25)
		self.assertIsInstance(build_generator(GeneratorSpec.parse("mock:faulty-perfect:1")).inner, PerfectGenerator)
		self.assertIsInstance(build_generator("llm", llm=LlmEndpointConfig()), LlmGenerator)

	def test_bad_designations(self):
		with self.assertRaises(ParameterError):
			build_generator("llm")
		with self.assertRaises(ParameterError):
			build_generator("mock:faulty:1.5")
		with self.assertRaises(ParameterError):
			build_generator("oracle")


class TestMockGenerators(unittest.TestCase):
	def test_perfect(self):
		candidate = PerfectGenerator().propose_offspring(triangle(), [])
		self.assertEqual(candidate.route_claim, (0, 2, 1, 0))
		self.assertEqual(candidate.omega_claim, 9.0)

	def test_ox_proposals_verify(self):
		scenario = generate_scenario(9, seed=2)
		generator = OxGenerator(np.random.default_rng(0))
		population = [verify(scenario, c) for c in generator.propose_initial(scenario, 6)]
		for _ in range(100):
			child = verify(scenario, generator.propose_offspring(scenario, population[:3]))
			self.assertEqual(sorted(child.route.interior), list(range(1, 10)))

	def test_ox_deterministic(self):
		scenario = generate_scenario(9, seed=2)
		first = build_generator("mock:ox", seed=11).propose_initial(scenario, 4)
		second = build_generator("mock:ox", seed=11).propose_initial(scenario, 4)
		self.assertEqual(first, second)

	def test_faulty_rates(self):
		scenario = generate_scenario(6, seed=1)
		clean = FaultyGenerator(OxGenerator(np.random.default_rng(0)), 0.0, np.random.default_rng(1))
		for candidate in clean.propose_initial(scenario, 50):
			verify(scenario, candidate)

		broken = FaultyGenerator(OxGenerator(np.random.default_rng(0)), 1.0, np.random.default_rng(1))
		for candidate in broken.propose_initial(scenario, 50):
			with self.assertRaises(VerificationError) as ctx:
				verify(scenario, candidate)
			self.assertEqual(ctx.exception.kind, VerificationKind.DUPLICATE_NODE)
		self.assertEqual(broken.faults, 50)

	def test_faulty_single_node(self):
		scenario = build_scenario([(10.0, 0.0)])
		broken = FaultyGenerator(PerfectGenerator(), 1.0, np.random.default_rng(0))
		with self.assertRaises(VerificationError) as ctx:
			verify(scenario, broken.propose_offspring(scenario, []))
		self.assertEqual(ctx.exception.kind, VerificationKind.WRONG_LENGTH)


class TestLlmGenerator(unittest.TestCase):
	def test_initial_population(self):
		chat = FakeChat("Sure.\n[0, 1, 2, 0] omega = 11\n[0, 2, 1, 0] omega = 9")
		generator = LlmGenerator(LlmEndpointConfig(), chat=chat)
		candidates = generator.propose_initial(triangle(), 2)
		self.assertEqual([c.route_claim for c in candidates], [(0, 1, 2, 0), (0, 2, 1, 0)])
		system, user = chat.requests[0]
		self.assertEqual(system, ("system", SYSTEM_MESSAGE))
		self.assertIn("Propose 2 different routes", user[1])

	def test_retry_extends_last_prompt(self):
		scenario = triangle()
		parents = [verify(scenario, PerfectGenerator().propose_offspring(scenario, []))]
		chat = FakeChat("[0, 1, 1, 0]", "[0, 2, 1, 0] omega = 9.0")
		generator = LlmGenerator(LlmEndpointConfig(), chat=chat)

		first = generator.propose_offspring(scenario, parents)
		error = None
		try:
			verify(scenario, first)
		except VerificationError as e:
			error = e
		second = generator.propose_offspring(scenario, parents, error)

		self.assertEqual(second.route_claim, (0, 2, 1, 0))
		retry_text = chat.requests[1][1][1]
		self.assertIn("node 1 is visited 2 times", retry_text)
		self.assertIn("Parent 1: [0, 2, 1, 0] omega = 9.000000", retry_text)
		hints = generator.last_prompt.section(PromptSection.HINTS)
		self.assertIn("DuplicateNode", hints)

	def test_unparseable_reply(self):
		generator = LlmGenerator(LlmEndpointConfig(), chat=FakeChat("I am not sure."))
		with self.assertRaises(VerificationError) as ctx:
			generator.propose_offspring(triangle(), [verify(triangle(), PerfectGenerator().propose_offspring(triangle(), []))])
		self.assertEqual(ctx.exception.kind, VerificationKind.UNPARSEABLE)
