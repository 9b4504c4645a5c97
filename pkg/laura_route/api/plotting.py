# Copyright (c) 2025, LAURA Route contributors
# For license information, please see license.txt

import logging
from pathlib import Path

import matplotlib
from matplotlib.figure import Figure

from laura_route.core.wsn_model.wsn_model import DATA_CENTER, Route, Scenario, evaluate_route

logger = logging.getLogger(__name__)

# fixed salt and no date stamp keep the SVG bytes identical across runs
SVG_RC = {"svg.hashsalt": "laura-route", "svg.fonttype": "none"}


def plot_route(scenario: Scenario, route: Route, path: str | Path, title: str | None = None) -> Path:
	"""
	Draw `route` over the scenario as an SVG file.

	Every node is a marker group with id "node-<id>" (the data center is a
	red square) and every flown leg an arrow group with id "leg-<k>", so the
	file can be inspected structurally. The title carries the route's max AoI.

	Args:
		scenario: problem instance
		route: route over the same nodes
		path: destination .svg file
		title: prefix for the title line

	Returns:
		Path: the written file
	"""
	profile = evaluate_route(scenario, route)
	positions = scenario.positions
	path = Path(path)
	path.parent.mkdir(parents=True, exist_ok=True)

	figure = Figure(figsize=(6, 6))
	axes = figure.add_subplot()

	sequence = route.sequence
	for k in range(len(sequence) - 1):
		start, end = positions[sequence[k]], positions[sequence[k + 1]]
		style = "--" if k == 0 else "-"
		arrow = axes.annotate(
			"",
			xy=(float(end[0]), float(end[1])),
			xytext=(float(start[0]), float(start[1])),
			arrowprops={"arrowstyle": "->", "color": "tab:blue", "linestyle": style, "lw": 1.2},
		)
		# an empty-text annotation only renders its arrow patch, so the id goes there
		arrow.arrow_patch.set_gid(f"leg-{k}")

	depot = axes.scatter([positions[DATA_CENTER][0]], [positions[DATA_CENTER][1]], marker="s", s=90, c="tab:red", zorder=3)
	depot.set_gid(f"node-{DATA_CENTER}")
	for node in sorted(scenario.nodes, key=lambda node: node.id):
		marker = axes.scatter([node.position.x], [node.position.y], s=40, c="tab:green", zorder=3)
		marker.set_gid(f"node-{node.id}")
		axes.annotate(str(node.id), (node.position.x, node.position.y), textcoords="offset points", xytext=(4, 4), fontsize=7)

	heading = f"{title} | " if title else ""
	axes.set_title(f"{heading}N={scenario.n}, max AoI Ω = {profile.max_aoi:.6f} s")
	axes.set_xlabel("x (m)")
	axes.set_ylabel("y (m)")
	axes.set_aspect("equal", adjustable="datalim")
	axes.grid(True, linewidth=0.3)

	with matplotlib.rc_context(SVG_RC):
		figure.savefig(path, format="svg", metadata={"Date": None})

	logger.debug(f"Route plot written to {path}")
	return path
