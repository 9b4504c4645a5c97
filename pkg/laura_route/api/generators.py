# Copyright (c) 2025, LAURA Route contributors
# For license information, please see license.txt

"""
GeneratorPort implementations.

LlmGenerator talks to a chat-completions endpoint. The mock generators are
deterministic stand-ins for offline runs and tests: perfect (always the exact
optimum), ox (order crossover of two random parents) and faulty (corrupts
another generator's output at a given rate).
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence

import numpy as np

from laura_route.api.llm_client import ChatExchange, chat_complete
from laura_route.api.prompts import (
	SYSTEM_MESSAGE,
	PromptDocument,
	build_evolution_prompt,
	build_init_prompt,
	build_retry_prompt,
	parse_route_candidates,
	parse_route_response,
)
from laura_route.config import ExactConfig, GeneratorKind, GeneratorSpec, LlmEndpointConfig
from laura_route.core.evo_core.evo_core import CandidateIndividual, Individual
from laura_route.core.laura_engine.laura_engine import GeneratorPort
from laura_route.core.solvers.solvers import order_crossover, solve_exact
from laura_route.core.wsn_model.wsn_model import Route, Scenario, evaluate_route
from laura_route.exceptions import ParameterError, VerificationError
from laura_route.utils import derive_seed

logger = logging.getLogger(__name__)


class LlmGenerator(GeneratorPort):
	"""
	Generator backed by a language model.

	The last prompt document is kept so that a retry extends it with the
	rejection detail instead of starting over.
	"""

	def __init__(
		self,
		config: LlmEndpointConfig,
		chat: Callable[[LlmEndpointConfig, list], ChatExchange] = chat_complete,
	):
		self.config = config
		self._chat = chat
		self.last_prompt: PromptDocument | None = None

	def _ask(self, document: PromptDocument) -> str:
		self.last_prompt = document
		exchange = self._chat(self.config, [("system", SYSTEM_MESSAGE), ("user", document.rendered)])
		return exchange.response_text

	def propose_initial(self, scenario: Scenario, count: int) -> list[CandidateIndividual]:
		text = self._ask(build_init_prompt(scenario, count))
		candidates = parse_route_candidates(text, scenario.n)
		if len(candidates) < count:
			logger.debug(f"Initial reply held {len(candidates)} of {count} requested routes")
		# the tail holds the answer when the model restates examples before it
		return candidates[-count:] if candidates else []

	def propose_offspring(
		self,
		scenario: Scenario,
		parents: Sequence[Individual],
		error_feedback: VerificationError | None = None,
	) -> CandidateIndividual:
		if error_feedback is not None and self.last_prompt is not None:
			document = build_retry_prompt(self.last_prompt, error_feedback)
		else:
			document = build_evolution_prompt(scenario, parents)
		return parse_route_response(self._ask(document), scenario.n)


# ============================================================================
# Mock generators
# ============================================================================


def _claimed(scenario: Scenario, route: Route) -> CandidateIndividual:
	return CandidateIndividual(route.sequence, evaluate_route(scenario, route).max_aoi)


class PerfectGenerator(GeneratorPort):
	"""Always proposes solve_exact's route, with a correct omega claim."""

	def __init__(self, exact: ExactConfig | None = None):
		self.exact = exact
		self._optimum: dict[Scenario, CandidateIndividual] = {}

	def _answer(self, scenario: Scenario) -> CandidateIndividual:
		if scenario not in self._optimum:
			optimum = solve_exact(scenario, config=self.exact)
			self._optimum[scenario] = CandidateIndividual(optimum.route.sequence, optimum.omega)
		return self._optimum[scenario]

	def propose_initial(self, scenario, count):
		return [self._answer(scenario)] * count

	def propose_offspring(self, scenario, parents, error_feedback=None):
		return self._answer(scenario)


class OxGenerator(GeneratorPort):
	"""Order crossover of two random parents; random routes when there are none."""

	def __init__(self, rng: np.random.Generator):
		self.rng = rng

	def _random(self, scenario: Scenario) -> CandidateIndividual:
		return _claimed(scenario, Route.from_interior(self.rng.permutation(np.arange(1, scenario.n + 1)).tolist()))

	def propose_initial(self, scenario, count):
		return [self._random(scenario) for _ in range(count)]

	def propose_offspring(self, scenario, parents, error_feedback=None):
		if not parents:
			return self._random(scenario)
		if len(parents) == 1:
			first = second = parents[0]
		else:
			i, j = self.rng.choice(len(parents), size=2, replace=False)
			first, second = parents[int(i)], parents[int(j)]
		return _claimed(scenario, order_crossover(first.route, second.route, rng=self.rng))


class FaultyGenerator(GeneratorPort):
	"""
	Wraps another generator and corrupts each proposal with probability `rate`.

	A corrupted route has one interior node overwritten by another, so one
	node is visited twice and one never. With a single node the duplicate is
	inserted instead, which makes the route too long.
	"""

	def __init__(self, inner: GeneratorPort, rate: float, rng: np.random.Generator):
		if not 0.0 <= rate <= 1.0:
			raise ParameterError(f"Fault rate must be in [0, 1], got {rate}")
		self.inner = inner
		self.rate = rate
		self.rng = rng
		self.faults = 0

	def _maybe_corrupt(self, candidate: CandidateIndividual) -> CandidateIndividual:
		if self.rng.random() >= self.rate:
			return candidate
		self.faults += 1
		sequence = list(candidate.route_claim)
		interior = len(sequence) - 2
		if interior >= 2:
			source, target = (int(k) + 1 for k in self.rng.choice(interior, size=2, replace=False))
			sequence[target] = sequence[source]
		else:
			sequence.insert(1, sequence[1])
		return CandidateIndividual(tuple(sequence), candidate.omega_claim)

	def propose_initial(self, scenario, count):
		return [self._maybe_corrupt(c) for c in self.inner.propose_initial(scenario, count)]

	def propose_offspring(self, scenario, parents, error_feedback=None):
		return self._maybe_corrupt(self.inner.propose_offspring(scenario, parents, error_feedback))


def build_generator(
	spec: GeneratorSpec | str,
	seed: int = 0,
	llm: LlmEndpointConfig | None = None,
	exact: ExactConfig | None = None,
) -> GeneratorPort:
	"""
	Construct the generator named by a designation.

	Args:
		spec: parsed spec or designation string such as "mock:faulty:0.2"
		seed: seeds the mock generators' randomness
		llm: endpoint settings, required for "llm"
		exact: caps used by the perfect mock

	Returns:
		GeneratorPort
	"""
	if isinstance(spec, str):
		spec = GeneratorSpec.parse(spec)

	if spec.kind == GeneratorKind.LLM:
		if llm is None:
			raise ParameterError("The llm generator needs an [llm] endpoint configuration")
		return LlmGenerator(llm)
	if spec.kind == GeneratorKind.PERFECT:
		return PerfectGenerator(exact)
	if spec.kind == GeneratorKind.OX:
		return OxGenerator(np.random.default_rng(seed))

	fault_rng = np.random.default_rng(derive_seed(seed, "faults"))
	if spec.kind == GeneratorKind.FAULTY:
		return FaultyGenerator(OxGenerator(np.random.default_rng(seed)), spec.rate, fault_rng)
	if spec.kind == GeneratorKind.FAULTY_PERFECT:
		return FaultyGenerator(PerfectGenerator(exact), spec.rate, fault_rng)

	raise ParameterError(f"Unknown generator kind '{spec.kind}'")
