# Copyright (c) 2025, LAURA Route contributors
# For license information, please see license.txt

"""
Configuration objects and TOML loading.

Each section of a configuration file maps to one dataclass below. Unknown
keys are rejected so that typos surface immediately instead of silently
falling back to defaults.
"""

from __future__ import annotations

import math
import re
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

if sys.version_info >= (3, 11):
	import tomllib
else:
	import tomli as tomllib

from laura_route.exceptions import CapacityError, ParameterError
from laura_route.utils import throw


# ============================================================================
# Constants
# ============================================================================


class Algorithm:
	"""Algorithm name constants"""

	LAURA = "laura"
	LEDMA = "ledma"
	GENETIC = "genetic"
	GREEDY = "greedy"
	RANDOM = "random"
	EXACT = "exact"

	ALL = (LAURA, LEDMA, GENETIC, GREEDY, RANDOM, EXACT)
	LLM_BACKED = (LAURA, LEDMA)


class GeneratorKind:
	"""Generator designation constants"""

	LLM = "llm"
	PERFECT = "mock:perfect"
	OX = "mock:ox"
	FAULTY = "mock:faulty"
	FAULTY_PERFECT = "mock:faulty-perfect"


# ============================================================================
# Unit helpers
# ============================================================================


def db_to_linear(value_db: float) -> float:
	"""Convert a power ratio in dB to linear scale (-50 dB -> 1e-5)."""
	return 10.0 ** (value_db / 10.0)


def dbm_to_watts(value_dbm: float) -> float:
	"""Convert a power level in dBm to watts (-110 dBm -> 1e-14 W)."""
	return 10.0 ** ((value_dbm - 30.0) / 10.0)


def _build(cls, data: dict | None, section: str):
	data = dict(data or {})
	known = {f.name for f in fields(cls)}
	unknown = sorted(set(data) - known)
	if unknown:
		throw(f"Unknown key(s) in [{section}]: {', '.join(unknown)}")
	return cls(**data)


# ============================================================================
# Data Classes
# ============================================================================


@dataclass
class ScenarioDefaults:
	"""Physical parameters used when generating random scenarios"""

	tx_power_w: float = 0.3
	bandwidth_hz: float = 1e6
	noise_power_w: float = 1e-14
	ref_gain_linear: float = 1e-5
	altitude_m: float = 30.0
	speed_mps: float = 10.0
	data_bits: float = 5e5
	radius_m: float = 3000.0

	@classmethod
	def from_dict(cls, data: dict | None) -> ScenarioDefaults:
		data = dict(data or {})
		if "ref_gain_db" in data:
			data["ref_gain_linear"] = db_to_linear(float(data.pop("ref_gain_db")))
		if "noise_power_dbm" in data:
			data["noise_power_w"] = dbm_to_watts(float(data.pop("noise_power_dbm")))
		config = _build(cls, data, "scenario")
		config.validate()
		return config

	def validate(self):
		for name in ("tx_power_w", "bandwidth_hz", "noise_power_w", "ref_gain_linear", "altitude_m", "speed_mps", "radius_m"):
			value = getattr(self, name)
			if not math.isfinite(value) or value <= 0:
				throw(f"scenario.{name} must be a positive finite number, got {value}")
		if not math.isfinite(self.data_bits) or self.data_bits < 0:
			throw(f"scenario.data_bits must be non-negative, got {self.data_bits}")


@dataclass
class LauraConfig:
	"""Population size K, parents N_p, iterations N_g and attempt budget M"""

	population_size: int = 10
	parent_count: int = 5
	iterations: int = 10
	max_attempts: int = 3
	omega_tolerance: float = 1e-6
	seed: int = 0

	@classmethod
	def from_dict(cls, data: dict | None) -> LauraConfig:
		config = _build(cls, data, "laura")
		config.validate()
		return config

	def validate(self):
		if self.population_size < 1:
			throw(f"laura.population_size must be >= 1, got {self.population_size}")
		if not 1 <= self.parent_count <= self.population_size:
			throw(
				f"laura.parent_count must be in [1, {self.population_size}], got {self.parent_count}"
			)
		if self.max_attempts < 1:
			throw(f"laura.max_attempts must be >= 1, got {self.max_attempts}")
		if self.iterations < 0:
			throw(f"laura.iterations must be >= 0, got {self.iterations}")
		if not self.omega_tolerance > 0:
			throw(f"laura.omega_tolerance must be positive, got {self.omega_tolerance}")


@dataclass
class GeneticConfig:
	"""Classical genetic algorithm settings"""

	population_size: int = 50
	generations: int = 500
	crossover_rate: float = 0.9
	mutation_rate: float = 0.2
	tournament_size: int = 3
	seed: int = 0

	@classmethod
	def from_dict(cls, data: dict | None) -> GeneticConfig:
		config = _build(cls, data, "genetic")
		config.validate()
		return config

	def validate(self):
		for name in ("crossover_rate", "mutation_rate"):
			value = getattr(self, name)
			if not 0.0 <= value <= 1.0:
				throw(f"genetic.{name} must be in [0, 1], got {value}")
		for name in ("population_size", "generations", "tournament_size"):
			value = getattr(self, name)
			if value < 1:
				throw(f"genetic.{name} must be >= 1, got {value}")


@dataclass
class ExactConfig:
	"""Node-count caps for the exact solvers"""

	exhaustive_cap: int = 9
	held_karp_cap: int = 18

	@classmethod
	def from_dict(cls, data: dict | None) -> ExactConfig:
		config = _build(cls, data, "exact")
		config.validate()
		return config

	def validate(self):
		if self.exhaustive_cap < 1 or self.held_karp_cap < 1:
			throw("exact caps must be >= 1")
		if self.exhaustive_cap > 11 or self.held_karp_cap > 20:
			throw(
				f"exact caps above 11 (exhaustive) or 20 (Held-Karp) are refused, got "
				f"{self.exhaustive_cap} and {self.held_karp_cap}",
				CapacityError,
			)


@dataclass
class LlmEndpointConfig:
	"""
	OpenAI-compatible chat-completions endpoint.

	The credential itself is never stored here, only the name of the
	environment variable that holds it.
	"""

	base_url: str = "http://localhost:8000/v1"
	model_name: str = "deepseek-chat"
	temperature: float = 0.7
	timeout: float = 60.0
	api_key_env_var: str = "LAURA_API_KEY"
	network_retries: int = 2
	backoff_base: float = 0.5
	max_tokens: int | None = None

	@classmethod
	def from_dict(cls, data: dict | None) -> LlmEndpointConfig:
		config = _build(cls, data, "llm")
		config.validate()
		return config

	def validate(self):
		if not self.base_url:
			throw("llm.base_url is required")
		if self.temperature < 0:
			throw(f"llm.temperature must be >= 0, got {self.temperature}")
		if self.timeout <= 0:
			throw(f"llm.timeout must be positive, got {self.timeout}")
		if self.network_retries < 0:
			throw(f"llm.network_retries must be >= 0, got {self.network_retries}")


@dataclass
class GeneratorSpec:
	"""
	Parsed generator designation.

	Accepted forms: "llm", "mock:perfect", "mock:ox", "mock:faulty:<rate>"
	(faults injected over the ox mock) and "mock:faulty-perfect:<rate>".
	"""

	kind: str = GeneratorKind.OX
	rate: float = 0.0

	@classmethod
	def parse(cls, designation: str) -> GeneratorSpec:
		text = (designation or "").strip()
		if text in (GeneratorKind.LLM, GeneratorKind.PERFECT, GeneratorKind.OX):
			return cls(kind=text)

		for kind in (GeneratorKind.FAULTY_PERFECT, GeneratorKind.FAULTY):
			prefix = kind + ":"
			if text.startswith(prefix):
				try:
					rate = float(text[len(prefix):])
				except ValueError:
					throw(f"Invalid fault rate in generator designation '{designation}'")
				if not 0.0 <= rate <= 1.0:
					throw(f"Fault rate must be in [0, 1], got {rate}")
				return cls(kind=kind, rate=rate)

		throw(
			f"Unknown generator '{designation}'. Use llm, mock:perfect, mock:ox, "
			"mock:faulty:<rate> or mock:faulty-perfect:<rate>"
		)

	@property
	def is_mock(self) -> bool:
		return self.kind != GeneratorKind.LLM

	def __str__(self):
		if self.kind in (GeneratorKind.FAULTY, GeneratorKind.FAULTY_PERFECT):
			return f"{self.kind}:{self.rate:g}"
		return self.kind


_BACKEND_NAME = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._-]*$")


def split_label(label: str) -> tuple[str, str | None]:
	"""Split an algorithm label such as "laura@deepseek-v3" into (algorithm, backend)."""
	algorithm, _, backend = str(label).partition("@")
	return algorithm, (backend or None)


@dataclass
class Backend:
	"""
	A named generator source, one [llm.<name>] table.

	The table holds either endpoint keys (a real model) or a single
	generator = "mock:..." designation for offline runs.
	"""

	name: str
	generator: GeneratorSpec = field(default_factory=lambda: GeneratorSpec(GeneratorKind.LLM))
	llm: LlmEndpointConfig | None = None

	@classmethod
	def from_dict(cls, name: str, data: dict | None) -> Backend:
		if not _BACKEND_NAME.match(name):
			throw(f"Invalid backend name '{name}'")
		data = dict(data or {})
		generator = GeneratorSpec.parse(data.pop("generator", GeneratorKind.LLM))
		if generator.is_mock:
			if data:
				throw(f"[llm.{name}] with a mock generator takes no endpoint keys, got {', '.join(sorted(data))}")
			return cls(name, generator)
		return cls(name, generator, LlmEndpointConfig.from_dict(data))

	def to_dict(self) -> dict:
		return {"generator": str(self.generator), "llm": None if self.llm is None else asdict(self.llm)}


@dataclass
class SuiteConfig:
	"""Experiment suite: which algorithms solve which random cases, how often"""

	node_counts: list[int] = field(default_factory=lambda: [20, 30, 40])
	cases_per_count: int = 10
	runs_per_case: int = 5
	algorithms: list[str] = field(default_factory=lambda: [a for a in Algorithm.ALL if a != Algorithm.EXACT])
	base_seed: int = 0
	output_dir: str = "bench-out"
	workers: int = 1
	llm_concurrency: int = 1
	ledma_samples: int = 1
	emit_plots: bool = True
	emit_traces: bool = False
	generator: GeneratorSpec = field(default_factory=GeneratorSpec)
	scenario: ScenarioDefaults = field(default_factory=ScenarioDefaults)
	laura: LauraConfig = field(default_factory=LauraConfig)
	genetic: GeneticConfig = field(default_factory=GeneticConfig)
	exact: ExactConfig = field(default_factory=ExactConfig)
	llm: LlmEndpointConfig | None = None
	backends: dict[str, Backend] = field(default_factory=dict)

	@classmethod
	def from_dict(cls, document: dict) -> SuiteConfig:
		"""
		Build a suite from a parsed TOML document.

		Args:
			document: mapping with a [suite] table and optional [scenario],
				[laura], [genetic], [exact] and [llm] tables; [llm] is either one
				endpoint or a set of named [llm.<name>] backend tables

		Returns:
			SuiteConfig: validated configuration
		"""
		document = dict(document or {})
		unknown = sorted(set(document) - {"suite", "scenario", "laura", "genetic", "exact", "llm"})
		if unknown:
			throw(f"Unknown table(s): {', '.join(unknown)}")

		suite = dict(document.get("suite") or {})
		generator = GeneratorSpec.parse(suite.pop("generator", GeneratorKind.OX))
		nested = {"generator", "scenario", "laura", "genetic", "exact", "llm"}
		bad = sorted(set(suite) & nested)
		if bad:
			throw(f"[suite] cannot contain {', '.join(bad)}; use a separate table")

		config = _build(cls, suite, "suite")
		config.node_counts = [int(n) for n in config.node_counts]
		config.algorithms = [str(a) for a in config.algorithms]
		config.generator = generator
		config.scenario = ScenarioDefaults.from_dict(document.get("scenario"))
		config.laura = LauraConfig.from_dict(document.get("laura"))
		config.genetic = GeneticConfig.from_dict(document.get("genetic"))
		config.exact = ExactConfig.from_dict(document.get("exact"))
		llm = document.get("llm")
		if llm is not None:
			if llm and all(isinstance(value, dict) for value in llm.values()):
				config.backends = {name: Backend.from_dict(name, table) for name, table in llm.items()}
			elif any(isinstance(value, dict) for value in llm.values()):
				throw("[llm] mixes endpoint keys with named [llm.<name>] tables")
			else:
				config.llm = LlmEndpointConfig.from_dict(llm)
		config.validate()
		return config

	def validate(self):
		if not self.node_counts or any(n < 1 for n in self.node_counts):
			throw("suite.node_counts must be a non-empty list of positive counts")
		if self.cases_per_count < 1 or self.runs_per_case < 1:
			throw("suite.cases_per_count and suite.runs_per_case must be >= 1")
		if not self.algorithms:
			throw("suite.algorithms must not be empty")
		for label in self.algorithms:
			name, backend = split_label(label)
			if name not in Algorithm.ALL:
				throw(f"Unknown algorithm '{name}'. Choose from {', '.join(Algorithm.ALL)}")
			if backend is not None:
				if name not in Algorithm.LLM_BACKED:
					throw(f"'{label}': only {' and '.join(Algorithm.LLM_BACKED)} take a backend")
				if backend not in self.backends:
					throw(f"'{label}': no [llm.{backend}] table")
		if len(set(self.algorithms)) != len(self.algorithms):
			throw("suite.algorithms contains duplicates")
		if self.workers < 1 or self.llm_concurrency < 1:
			throw("suite.workers and suite.llm_concurrency must be >= 1")
		if self.ledma_samples < 1:
			throw(f"suite.ledma_samples must be >= 1, got {self.ledma_samples}")

		# the perfect mocks solve every case exactly, so they share the exact caps
		cap = max(self.exact.exhaustive_cap, self.exact.held_karp_cap)
		too_large = [n for n in self.node_counts if n > cap]
		for label in self.algorithms:
			name, _ = split_label(label)
			needs_exact = name == Algorithm.EXACT or (
				name in Algorithm.LLM_BACKED
				and self.generator_for(label)[0].kind in (GeneratorKind.PERFECT, GeneratorKind.FAULTY_PERFECT)
			)
			if needs_exact and too_large:
				throw(
					f"{label} cannot be scheduled for node count(s) {too_large}: exact cap is {cap}",
					CapacityError,
				)

		plain_llm = any(label in Algorithm.LLM_BACKED for label in self.algorithms)
		if plain_llm and not self.generator.is_mock and self.llm is None:
			throw("LLM-backed algorithms need an [llm] table or a mock generator designation")

	def generator_for(self, label: str) -> tuple[GeneratorSpec, LlmEndpointConfig | None]:
		"""Generator designation and endpoint used by an algorithm label."""
		_, backend = split_label(label)
		if backend is None:
			return self.generator, self.llm
		entry = self.backends[backend]
		return entry.generator, entry.llm

	def to_dict(self) -> dict:
		data = asdict(self)
		data["generator"] = str(self.generator)
		data["backends"] = {name: backend.to_dict() for name, backend in sorted(self.backends.items())}
		return data


def load_toml(path: str | Path) -> dict:
	"""Parse a TOML file, raising ParameterError for syntax problems."""
	path = Path(path)
	if not path.exists():
		throw(f"Config file not found: {path}")
	try:
		with path.open("rb") as handle:
			return tomllib.load(handle)
	except tomllib.TOMLDecodeError as e:
		raise ParameterError(f"{path} is not valid TOML: {e}")


def load_suite(path: str | Path) -> SuiteConfig:
	return SuiteConfig.from_dict(load_toml(path))
