# Copyright (c) 2025, LAURA Route contributors
# For license information, please see license.txt

import logging

logger = logging.getLogger(__name__)


def validate_scenario(scenario) -> list[str]:
	"""
	Flag scenario properties the model tolerates but the routing problem
	forbids.

	- Two positions that coincide give a zero-length leg, while every leg
	  time is required to be strictly positive
	- A node holding zero bits has a zero upload duration, while every
	  upload duration is required to be strictly positive

	Returns a list of warning messages; each one is also logged.
	"""
	warnings = []

	seen = {(scenario.data_center.x, scenario.data_center.y): 0}
	for node in sorted(scenario.nodes, key=lambda node: node.id):
		key = (node.position.x, node.position.y)
		if key in seen:
			warnings.append(
				f"Node {node.id} coincides with node {seen[key]} at ({key[0]}, {key[1]}); "
				"the leg between them takes zero time"
			)
		else:
			seen[key] = node.id

		if node.data_bits == 0:
			warnings.append(f"Node {node.id} holds no data; its upload duration is zero")

	for message in warnings:
		logger.warning(message)

	return warnings
