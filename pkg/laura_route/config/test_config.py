# Copyright (c) 2025, LAURA Route contributors
# See license.txt

import tempfile
import unittest
from pathlib import Path

from laura_route.config import (
	Algorithm,
	ExactConfig,
	GeneratorKind,
	GeneratorSpec,
	LauraConfig,
	SuiteConfig,
	db_to_linear,
	dbm_to_watts,
	load_suite,
	load_toml,
	split_label,
)
from laura_route.exceptions import CapacityError, ParameterError
from laura_route.utils import get_fixture_path


class TestUnitHelpers(unittest.TestCase):
	def test_conversions(self):
		self.assertAlmostEqual(db_to_linear(-50.0), 1e-5, delta=1e-18)
		self.assertAlmostEqual(dbm_to_watts(-110.0), 1e-14, delta=1e-27)
		self.assertAlmostEqual(dbm_to_watts(30.0), 1.0, places=12)


class TestGeneratorSpec(unittest.TestCase):
	def test_plain_designations(self):
		for text in ("llm", "mock:perfect", "mock:ox"):
			spec = GeneratorSpec.parse(text)
			self.assertEqual(spec.kind, text)
			self.assertEqual(str(spec), text)
		self.assertFalse(GeneratorSpec.parse("llm").is_mock)
		self.assertTrue(GeneratorSpec.parse("mock:ox").is_mock)

	def test_faulty_rates(self):
		spec = GeneratorSpec.parse("mock:faulty:0.25")
		self.assertEqual((spec.kind, spec.rate), (GeneratorKind.FAULTY, 0.25))
		self.assertEqual(str(spec), "mock:faulty:0.25")
		spec = GeneratorSpec.parse("mock:faulty-perfect:1")
		self.assertEqual((spec.kind, spec.rate), (GeneratorKind.FAULTY_PERFECT, 1.0))

	def test_rejects_bad_designations(self):
		for text in ("", "gpt", "mock:faulty:abc", "mock:faulty:1.5", "mock:faulty:-0.1"):
			with self.assertRaises(ParameterError, msg=text):
				GeneratorSpec.parse(text)


class TestSectionConfigs(unittest.TestCase):
	def test_laura_bounds(self):
		with self.assertRaises(ParameterError):
			LauraConfig.from_dict({"population_size": 4, "parent_count": 5})
		with self.assertRaises(ParameterError):
			LauraConfig.from_dict({"max_attempts": 0})
		self.assertEqual(LauraConfig.from_dict({"iterations": 0}).iterations, 0)

	def test_unknown_key(self):
		with self.assertRaises(ParameterError) as ctx:
			LauraConfig.from_dict({"generations": 3})
		self.assertIn("[laura]", str(ctx.exception))

	def test_exact_caps(self):
		with self.assertRaises(CapacityError):
			ExactConfig.from_dict({"held_karp_cap": 21})
		with self.assertRaises(CapacityError):
			ExactConfig.from_dict({"exhaustive_cap": 12})
		self.assertEqual(ExactConfig.from_dict({"held_karp_cap": 20}).held_karp_cap, 20)


class TestSuiteConfig(unittest.TestCase):
	def test_demo_suite(self):
		config = load_suite(get_fixture_path("demo_suite.toml"))
		self.assertEqual(config.node_counts, [5, 6])
		self.assertEqual(config.generator, GeneratorSpec(GeneratorKind.FAULTY, 0.2))
		self.assertAlmostEqual(config.scenario.noise_power_w, 1e-14, delta=1e-27)
		self.assertAlmostEqual(config.scenario.ref_gain_linear, 1e-5, delta=1e-18)
		self.assertEqual(config.laura.population_size, 6)
		self.assertEqual(config.genetic.generations, 20)
		self.assertIsNone(config.llm)
		self.assertEqual(config.to_dict()["generator"], "mock:faulty:0.2")

	def test_defaults_leave_exact_out(self):
		config = SuiteConfig.from_dict({"suite": {}})
		self.assertNotIn(Algorithm.EXACT, config.algorithms)
		self.assertEqual(config.generator.kind, GeneratorKind.OX)

	def test_rejections(self):
		cases = [
			{"suite": {}, "plots": {}},
			{"suite": {"algorithms": ["greedy", "astar"]}},
			{"suite": {"algorithms": ["greedy", "greedy"]}},
			{"suite": {"node_counts": []}},
			{"suite": {"workers": 0}},
			{"suite": {"laura": {"iterations": 3}}},
			{"suite": {"generator": "llm", "algorithms": ["laura"]}},
		]
		for document in cases:
			with self.assertRaises(ParameterError, msg=str(document)):
				SuiteConfig.from_dict(document)

	def test_exact_over_cap(self):
		with self.assertRaises(CapacityError):
			SuiteConfig.from_dict({"suite": {"node_counts": [10, 19], "algorithms": ["exact"]}})

	def test_llm_table(self):
		config = SuiteConfig.from_dict(
			{
				"suite": {"generator": "llm", "algorithms": ["laura"]},
				"llm": {"base_url": "http://127.0.0.1:8000/v1", "model_name": "local"},
			}
		)
		self.assertEqual(config.llm.model_name, "local")
		self.assertEqual(config.llm.api_key_env_var, "LAURA_API_KEY")


class TestBackends(unittest.TestCase):
	def test_named_tables(self):
		config = SuiteConfig.from_dict(
			{
				"suite": {"algorithms": ["laura@v3", "ledma@v3", "laura@offline", "greedy"]},
				"llm": {
					"v3": {"base_url": "http://127.0.0.1:8000/v1", "model_name": "deepseek-chat"},
					"offline": {"generator": "mock:faulty:0.1"},
				},
			}
		)
		self.assertIsNone(config.llm)
		self.assertEqual(sorted(config.backends), ["offline", "v3"])
		spec, llm = config.generator_for("ledma@v3")
		self.assertEqual((spec.kind, llm.model_name), (GeneratorKind.LLM, "deepseek-chat"))
		spec, llm = config.generator_for("laura@offline")
		self.assertEqual((spec.kind, spec.rate, llm), (GeneratorKind.FAULTY, 0.1, None))
		self.assertEqual(config.generator_for("laura"), (config.generator, None))
		self.assertEqual(config.to_dict()["backends"]["offline"], {"generator": "mock:faulty:0.1", "llm": None})

	def test_split_label(self):
		self.assertEqual(split_label("laura@qwq-32b"), ("laura", "qwq-32b"))
		self.assertEqual(split_label("greedy"), ("greedy", None))

	def test_rejections(self):
		offline = {"offline": {"generator": "mock:ox"}}
		cases = [
			{"suite": {"algorithms": ["greedy@offline"]}, "llm": offline},
			{"suite": {"algorithms": ["laura@missing"]}, "llm": offline},
			{"suite": {"algorithms": ["laura"]}, "llm": {"base_url": "http://x", "v3": {}}},
			{"suite": {"algorithms": ["laura"]}, "llm": {"offline": {"generator": "mock:ox", "model_name": "m"}}},
			{"suite": {"algorithms": ["laura"]}, "llm": {"bad name": {"generator": "mock:ox"}}},
		]
		for document in cases:
			with self.assertRaises(ParameterError, msg=str(document)):
				SuiteConfig.from_dict(document)

	def test_perfect_mock_shares_exact_cap(self):
		with self.assertRaises(CapacityError):
			SuiteConfig.from_dict(
				{"suite": {"node_counts": [20], "algorithms": ["laura", "greedy"], "generator": "mock:perfect"}}
			)
		with self.assertRaises(CapacityError):
			SuiteConfig.from_dict(
				{
					"suite": {"node_counts": [8, 19], "algorithms": ["ledma@oracle"]},
					"llm": {"oracle": {"generator": "mock:faulty-perfect:0.1"}},
				}
			)
		config = SuiteConfig.from_dict(
			{"suite": {"node_counts": [20], "algorithms": ["laura", "greedy"], "generator": "mock:faulty:0.2"}}
		)
		self.assertEqual(config.node_counts, [20])
		config = SuiteConfig.from_dict(
			{"suite": {"node_counts": [18], "algorithms": ["laura"], "generator": "mock:perfect"}}
		)
		self.assertEqual(config.generator.kind, GeneratorKind.PERFECT)


class TestLoadToml(unittest.TestCase):
	def test_missing_and_malformed(self):
		with tempfile.TemporaryDirectory() as tmp:
			with self.assertRaises(ParameterError):
				load_toml(Path(tmp) / "absent.toml")
			broken = Path(tmp) / "broken.toml"
			broken.write_text("[suite\nnode_counts = [")
			with self.assertRaises(ParameterError):
				load_toml(broken)


if __name__ == "__main__":
	unittest.main()
