# Copyright (c) 2025, LAURA Route contributors
# For license information, please see license.txt

"""
Prompt documents and the route exchange format.

A prompt has up to three labelled sections: the task description, the
parent solutions (evolution prompts only) and hints. Routes travel as
bracketed id lists, e.g. [0, 2, 1, 0]; replies are parsed with the last list
winning, so reasoning text before the answer is harmless.
"""

from __future__ import annotations

import logging
import re
from collections.abc import Sequence
from dataclasses import dataclass

from laura_route.core.evo_core.evo_core import CandidateIndividual, Individual
from laura_route.core.wsn_model.wsn_model import DATA_CENTER, Route, Scenario
from laura_route.exceptions import ParameterError, VerificationError, VerificationKind

logger = logging.getLogger(__name__)

EXCERPT_LENGTH = 200

SYSTEM_MESSAGE = (
	"You are a route-planning assistant for UAV data collection. "
	"You answer with routes written as bracketed lists of node ids."
)

_ROUTE_PATTERN = re.compile(r"\[\s*-?\d+(?:\s*,\s*-?\d+)*\s*,?\s*\]")
_CLAIM_PATTERN = re.compile(
	r"(?:omega|Ω|max(?:imum)?\s+aoi|aoi)\s*(?:=|:|is|of|≈)?\s*(-?\d+(?:\.\d+)?(?:[eE][-+]?\d+)?)",
	re.IGNORECASE,
)


class PromptSection:
	"""Prompt section labels"""

	TASK_DESCRIPTION = "TaskDescription"
	PARENT_SOLUTIONS = "ParentSolutions"
	HINTS = "Hints"

	ORDER = (TASK_DESCRIPTION, PARENT_SOLUTIONS, HINTS)


@dataclass(frozen=True)
class PromptDocument:
	sections: tuple[tuple[str, str], ...]

	def __post_init__(self):
		sections = tuple((str(label), str(text)) for label, text in self.sections)
		object.__setattr__(self, "sections", sections)
		labels = [label for label, _ in sections]
		if PromptSection.TASK_DESCRIPTION not in labels:
			raise ParameterError("A prompt needs a TaskDescription section")
		unknown = sorted(set(labels) - set(PromptSection.ORDER))
		if unknown:
			raise ParameterError(f"Unknown prompt section(s): {', '.join(unknown)}")

	@property
	def rendered(self) -> str:
		return "\n\n".join(f"## {label}\n{text}" for label, text in self.sections)

	def section(self, label: str) -> str | None:
		for name, text in self.sections:
			if name == label:
				return text
		return None

	@property
	def labels(self) -> tuple[str, ...]:
		return tuple(label for label, _ in self.sections)


# ============================================================================
# Route format
# ============================================================================


def format_route(route: Route | Sequence[int]) -> str:
	"""Render a route as "[0, 2, 1, 0]"."""
	sequence = route.sequence if isinstance(route, Route) else route
	return "[" + ", ".join(str(int(node_id)) for node_id in sequence) + "]"


def _line_bounds(text: str, start: int, end: int) -> tuple[int, int]:
	line_start = text.rfind("\n", 0, start) + 1
	line_end = text.find("\n", end)
	return line_start, len(text) if line_end == -1 else line_end


def _claim_near(text: str, matches: list[re.Match], index: int) -> float | None:
	"""
	The annotation belonging to matches[index], on its own line only.

	Text after a list, up to the next list, belongs to that list. Text before
	a list counts only when no other list precedes it on the line, since that
	text is already the trailing annotation of the earlier list.
	"""
	match = matches[index]
	line_start, line_end = _line_bounds(text, match.start(), match.end())
	after_end = line_end
	if index + 1 < len(matches):
		after_end = min(after_end, matches[index + 1].start())
	fragments = [text[match.end() : after_end]]
	if index == 0 or matches[index - 1].end() <= line_start:
		fragments.append(text[line_start : match.start()])
	for fragment in fragments:
		claim = _CLAIM_PATTERN.search(fragment)
		if claim:
			return float(claim.group(1))
	return None


def _to_candidate(text: str, matches: list[re.Match], index: int, n: int) -> CandidateIndividual:
	ids = [int(token) for token in re.findall(r"-?\d+", matches[index].group(0))]
	if len(ids) == n:
		ids = [DATA_CENTER, *ids, DATA_CENTER]
	return CandidateIndividual(tuple(ids), _claim_near(text, matches, index))


def _unparseable(text: str) -> VerificationError:
	excerpt = (text or "").strip()[:EXCERPT_LENGTH]
	return VerificationError(
		VerificationKind.UNPARSEABLE,
		f"no bracketed list of node ids found in the reply; it began with: {excerpt!r}",
	)


def parse_route_response(text: str, n: int) -> CandidateIndividual:
	"""
	Extract the last bracketed id list from a model reply.

	A list of exactly n ids is taken as the interior and wrapped with the
	data center. An "omega = x" or "AoI x" annotation on the same line becomes
	the omega claim. Structural validity is left to verify().

	Raises:
		VerificationError: Unparseable when the reply holds no id list
	"""
	matches = list(_ROUTE_PATTERN.finditer(text or ""))
	if not matches:
		logger.debug("Reply contained no route list")
		raise _unparseable(text)
	return _to_candidate(text, matches, len(matches) - 1, n)


def parse_route_candidates(text: str, n: int) -> list[CandidateIndividual]:
	"""Every bracketed id list in the reply, in order of appearance."""
	matches = list(_ROUTE_PATTERN.finditer(text or ""))
	return [_to_candidate(text, matches, index, n) for index in range(len(matches))]


# ============================================================================
# Prompt builders
# ============================================================================


def _task_description(scenario: Scenario) -> str:
	dc = scenario.data_center
	lines = [
		"A UAV takes off from the data center (node 0), visits every sensor node exactly once, "
		"uploads the node's data while hovering above it, and flies back to node 0.",
		"Objective: minimise the maximum Age of Information over all nodes. This equals the time from "
		"arriving at the first visited node until landing at node 0, so the flight from node 0 to the "
		"first node does not count and only the visiting order matters.",
		f"UAV speed: {scenario.uav_speed_mps:g} m/s. Flight time between two nodes is their distance "
		"divided by the speed.",
		f"Total upload time of all nodes: {scenario.tau_sum:.6f} s (the same for every order).",
		"Data center:",
		f"0: ({dc.x:.2f}, {dc.y:.2f})",
		"Sensor nodes, id: (x, y) in meters:",
	]
	for node in sorted(scenario.nodes, key=lambda node: node.id):
		lines.append(f"{node.id}: ({node.position.x:.2f}, {node.position.y:.2f})")
	lines.append(
		f"Route format: a bracketed list of node ids that starts with 0, contains each of the ids "
		f"1..{scenario.n} exactly once, and ends with 0."
	)
	return "\n".join(lines)


def build_init_prompt(scenario: Scenario, count: int) -> PromptDocument:
	if count < 1:
		raise ParameterError(f"count must be >= 1, got {count}")
	if count == 1:
		opening = "Propose one good route."
	else:
		opening = f"Propose {count} different routes that explore different visiting orders."
	hints = "\n".join(
		[
			opening,
			"Write each route on its own line as a bracketed list of node ids, optionally followed by "
			'"omega = <seconds>" with its maximum AoI.',
			"Every route must start with 0, end with 0 and visit each sensor node exactly once.",
		]
	)
	return PromptDocument(
		(
			(PromptSection.TASK_DESCRIPTION, _task_description(scenario)),
			(PromptSection.HINTS, hints),
		)
	)


def build_evolution_prompt(scenario: Scenario, parents: Sequence[Individual]) -> PromptDocument:
	"""
	Ask for one offspring recombined from `parents`.

	Each parent line carries its route and omega to 6 decimals.
	"""
	if not parents:
		raise ParameterError("An evolution prompt needs at least one parent")

	parent_lines = [
		f"Parent {index}: {format_route(parent.route)} omega = {parent.omega:.6f}"
		for index, parent in enumerate(parents, start=1)
	]
	hints = "\n".join(
		[
			"Recombine the parent routes, for example by keeping a short segment of one parent and "
			"filling the remaining positions in the order of another, to obtain one new route that "
			"differs from every parent and has a lower maximum AoI.",
			"Output exactly one route as a bracketed list of node ids, followed on the same line by "
			'"omega = <seconds>" with its maximum AoI.',
			"The route must start with 0, end with 0 and visit each sensor node exactly once.",
		]
	)
	return PromptDocument(
		(
			(PromptSection.TASK_DESCRIPTION, _task_description(scenario)),
			(PromptSection.PARENT_SOLUTIONS, "\n".join(parent_lines)),
			(PromptSection.HINTS, hints),
		)
	)


def build_retry_prompt(previous: PromptDocument, error: VerificationError) -> PromptDocument:
	"""Append the rejection detail to the Hints section; other sections are untouched."""
	line = (
		f"Your previous answer was rejected ({error.kind}): {error.detail}. "
		"Correct it and answer again in the same format."
	)
	sections = []
	appended = False
	for label, text in previous.sections:
		if label == PromptSection.HINTS:
			text = f"{text}\n{line}"
			appended = True
		sections.append((label, text))
	if not appended:
		sections.append((PromptSection.HINTS, line))
	return PromptDocument(tuple(sections))
