# Copyright (c) 2025, LAURA Route contributors
# For license information, please see license.txt

"""
UAV-assisted sensor network model.

Geometry, flight times, the line-of-sight channel rate, upload durations and
the Age of Information (AoI) each sensor's data has reached when the UAV lands
back at the data center. Everything here is a pure function of its inputs and
a Scenario never changes after construction.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from laura_route.config import ScenarioDefaults
from laura_route.exceptions import ParameterError, VerificationError, VerificationKind
from laura_route.utils import dump_json, load_json, throw

logger = logging.getLogger(__name__)

DATA_CENTER = 0


# ============================================================================
# Domain Types
# ============================================================================


@dataclass(frozen=True)
class Point:
	"""Ground position in meters"""

	x: float
	y: float

	def __post_init__(self):
		if not (math.isfinite(self.x) and math.isfinite(self.y)):
			throw(f"Point coordinates must be finite, got ({self.x}, {self.y})")


@dataclass(frozen=True)
class RadioParams:
	"""
	Link budget of the sensor-to-UAV channel.

	ref_gain_linear is the default reference gain at 1 m, used for nodes that
	do not carry their own.
	"""

	tx_power_watts: float
	bandwidth_hz: float
	noise_power_watts: float
	ref_gain_linear: float = 1e-5

	def __post_init__(self):
		for name in ("tx_power_watts", "bandwidth_hz", "noise_power_watts", "ref_gain_linear"):
			value = getattr(self, name)
			if not (math.isfinite(value) and value > 0):
				throw(f"RadioParams.{name} must be strictly positive, got {value}")


@dataclass(frozen=True)
class SensorNode:
	id: int
	position: Point
	data_bits: float
	ref_gain_linear: float

	def __post_init__(self):
		if not (math.isfinite(self.data_bits) and self.data_bits >= 0):
			throw(f"Node {self.id}: data_bits must be >= 0, got {self.data_bits}")
		if not (math.isfinite(self.ref_gain_linear) and self.ref_gain_linear > 0):
			throw(f"Node {self.id}: ref_gain_linear must be > 0, got {self.ref_gain_linear}")


@dataclass(frozen=True)
class Scenario:
	"""
	A complete problem instance: data center, N sensor nodes, UAV kinematics
	and radio parameters.

	Route-independent quantities (upload durations, flight-time matrix) are
	computed on first use and cached on the instance.
	"""

	data_center: Point
	nodes: tuple[SensorNode, ...]
	uav_altitude_m: float
	uav_speed_mps: float
	radio: RadioParams

	def __post_init__(self):
		object.__setattr__(self, "nodes", tuple(self.nodes))
		if not (math.isfinite(self.uav_speed_mps) and self.uav_speed_mps > 0):
			throw(f"UAV speed must be > 0, got {self.uav_speed_mps}")
		if not (math.isfinite(self.uav_altitude_m) and self.uav_altitude_m > 0):
			throw(f"UAV altitude must be > 0, got {self.uav_altitude_m}")
		if not self.nodes:
			throw("A scenario needs at least one sensor node")

		ids = sorted(node.id for node in self.nodes)
		if ids != list(range(1, len(self.nodes) + 1)):
			throw(f"Node ids must be exactly 1..{len(self.nodes)}, each once; got {ids}")

	@property
	def n(self) -> int:
		return len(self.nodes)

	@cached_property
	def node_by_id(self) -> dict[int, SensorNode]:
		return {node.id: node for node in self.nodes}

	@cached_property
	def positions(self) -> np.ndarray:
		"""(N+1, 2) array of coordinates indexed by node id, row 0 = data center"""
		coords = np.empty((self.n + 1, 2), dtype=float)
		coords[0] = (self.data_center.x, self.data_center.y)
		for node in self.nodes:
			coords[node.id] = (node.position.x, node.position.y)
		coords.setflags(write=False)
		return coords

	@cached_property
	def flight_time_matrix(self) -> np.ndarray:
		"""(N+1, N+1) matrix of t_ij in seconds, indexed by node id"""
		diff = self.positions[:, None, :] - self.positions[None, :, :]
		times = np.hypot(diff[..., 0], diff[..., 1]) / self.uav_speed_mps
		times.setflags(write=False)
		return times

	@cached_property
	def taus(self) -> tuple[float, ...]:
		"""Upload duration per node id; index 0 (data center) is 0"""
		values = [0.0] * (self.n + 1)
		for node in self.nodes:
			rate = data_rate(self.radio, node.ref_gain_linear, self.uav_altitude_m)
			values[node.id] = upload_duration(node.data_bits, rate)
		return tuple(values)

	@cached_property
	def tau_sum(self) -> float:
		return math.fsum(self.taus)

	def position_of(self, node_id: int) -> Point:
		if node_id == DATA_CENTER:
			return self.data_center
		return self.node_by_id[node_id].position

	def to_dict(self) -> dict:
		return {
			"data_center": {"x": self.data_center.x, "y": self.data_center.y},
			"uav": {"altitude_m": self.uav_altitude_m, "speed_mps": self.uav_speed_mps},
			"radio": {
				"tx_power_w": self.radio.tx_power_watts,
				"bandwidth_hz": self.radio.bandwidth_hz,
				"noise_power_w": self.radio.noise_power_watts,
				"ref_gain_linear": self.radio.ref_gain_linear,
			},
			"nodes": [
				{
					"id": node.id,
					"x": node.position.x,
					"y": node.position.y,
					"data_bits": node.data_bits,
					"ref_gain_linear": node.ref_gain_linear,
				}
				for node in sorted(self.nodes, key=lambda node: node.id)
			],
		}

	@classmethod
	def from_dict(cls, data: dict) -> Scenario:
		"""
		Build a Scenario from its JSON document form.

		Args:
			data: mapping with data_center, uav, radio and nodes entries

		Returns:
			Scenario: validated, immutable instance
		"""
		try:
			radio_data = data["radio"]
			radio = RadioParams(
				tx_power_watts=float(radio_data["tx_power_w"]),
				bandwidth_hz=float(radio_data["bandwidth_hz"]),
				noise_power_watts=float(radio_data["noise_power_w"]),
				ref_gain_linear=float(radio_data.get("ref_gain_linear", 1e-5)),
			)
			nodes = [
				SensorNode(
					id=int(item["id"]),
					position=Point(float(item["x"]), float(item["y"])),
					data_bits=float(item["data_bits"]),
					ref_gain_linear=float(item.get("ref_gain_linear", radio.ref_gain_linear)),
				)
				for item in data["nodes"]
			]
			return cls(
				data_center=Point(float(data["data_center"]["x"]), float(data["data_center"]["y"])),
				nodes=tuple(nodes),
				uav_altitude_m=float(data["uav"]["altitude_m"]),
				uav_speed_mps=float(data["uav"]["speed_mps"]),
				radio=radio,
			)
		except (KeyError, TypeError) as e:
			raise ParameterError(f"Scenario document is missing or mistyping a field: {e}")


@dataclass(frozen=True)
class Route:
	"""Visiting sequence c_0..c_{N+1}; both endpoints are the data center"""

	sequence: tuple[int, ...]

	def __post_init__(self):
		sequence = tuple(int(node_id) for node_id in self.sequence)
		object.__setattr__(self, "sequence", sequence)
		n = len(sequence) - 2
		if n < 1:
			throw(f"A route must visit at least one node, got {list(sequence)}")
		if sequence[0] != DATA_CENTER or sequence[-1] != DATA_CENTER:
			throw(f"A route must start and end at the data center, got {list(sequence)}")
		if sorted(sequence[1:-1]) != list(range(1, n + 1)):
			throw(f"Route interior must be a permutation of 1..{n}, got {list(sequence)}")

	@classmethod
	def from_interior(cls, interior) -> Route:
		return cls((DATA_CENTER, *(int(i) for i in interior), DATA_CENTER))

	@property
	def n(self) -> int:
		return len(self.sequence) - 2

	@property
	def interior(self) -> tuple[int, ...]:
		return self.sequence[1:-1]

	def __iter__(self):
		return iter(self.sequence)

	def __len__(self):
		return len(self.sequence)


@dataclass(frozen=True)
class AoiProfile:
	"""AoI of every node at mission completion, in visit order"""

	per_node_aoi: tuple[float, ...]
	max_aoi: float
	mission_time: float
	tau_sum: float
	travel_objective: float
	arrival_times: tuple[float, ...] = field(default=())

	@property
	def mean_aoi(self) -> float:
		return math.fsum(self.per_node_aoi) / len(self.per_node_aoi)


# ============================================================================
# Physical model
# ============================================================================


def flight_time(a: Point, b: Point, speed: float) -> float:
	"""Straight-line flight time between two ground points at constant speed."""
	if not speed > 0:
		throw(f"Speed must be positive, got {speed}")
	return math.hypot(a.x - b.x, a.y - b.y) / speed


def data_rate(radio: RadioParams, ref_gain_linear: float, altitude_m: float) -> float:
	"""
	Achievable sensor-to-UAV rate in bit/s: W log2(1 + P0 g / (sigma^2 h^2)).

	Args:
		radio: transmit power, bandwidth and noise power
		ref_gain_linear: channel gain at 1 m, linear scale
		altitude_m: UAV altitude h

	Returns:
		float: data rate in bits per second
	"""
	if not (ref_gain_linear > 0 and altitude_m > 0):
		throw(f"Gain and altitude must be positive, got g={ref_gain_linear}, h={altitude_m}")
	snr = radio.tx_power_watts * ref_gain_linear / (radio.noise_power_watts * altitude_m**2)
	return radio.bandwidth_hz * math.log2(1.0 + snr)


def upload_duration(data_bits: float, rate: float) -> float:
	if not rate > 0:
		throw(f"Rate must be positive, got {rate}")
	if data_bits < 0:
		throw(f"Data size must be >= 0, got {data_bits}")
	return data_bits / rate


def aoi_at(t: float, t_i: float) -> float:
	"""AoI at time t of data generated at t_i; zero before generation."""
	return max(t - t_i, 0.0)


# ============================================================================
# Route evaluation
# ============================================================================


def _check_route_size(scenario: Scenario, route: Route):
	if route.n != scenario.n:
		raise VerificationError(
			VerificationKind.WRONG_LENGTH,
			f"route has {len(route)} entries but the scenario needs {scenario.n + 2} "
			f"(data center, {scenario.n} nodes, data center)",
		)


def evaluate_route(scenario: Scenario, route: Route) -> AoiProfile:
	"""
	Evaluate the AoI of every node when the UAV flies `route`.

	A node's data is stamped when the UAV arrives, so its AoI at mission end
	is everything that happens after arrival: its own upload, the uploads
	and legs still to come, and the return leg. The outbound leg to the first
	node precedes every arrival, so it counts toward mission_time only.

	Args:
		scenario: problem instance
		route: visiting sequence for the same number of nodes

	Returns:
		AoiProfile: per-node AoI in visit order plus summary figures
	"""
	_check_route_size(scenario, route)

	seq = route.sequence
	times = scenario.flight_time_matrix
	taus = scenario.taus
	n = route.n

	legs = [float(times[seq[k], seq[k + 1]]) for k in range(n + 1)]

	per_node = [0.0] * n
	acc = 0.0
	for i in range(n, 0, -1):
		acc += taus[seq[i]] + legs[i]
		per_node[i - 1] = acc

	arrivals = [0.0] * n
	clock = legs[0]
	for i in range(1, n + 1):
		arrivals[i - 1] = clock
		clock += taus[seq[i]] + legs[i]

	return AoiProfile(
		per_node_aoi=tuple(per_node),
		max_aoi=per_node[0],
		mission_time=legs[0] + per_node[0],
		tau_sum=scenario.tau_sum,
		travel_objective=math.fsum(legs[1:]),
		arrival_times=tuple(arrivals),
	)


def route_objective(scenario: Scenario, route: Route) -> float:
	"""Travel time from the first visited node to the data center, legs 1..N."""
	_check_route_size(scenario, route)
	seq = route.sequence
	times = scenario.flight_time_matrix
	return math.fsum(float(times[seq[k], seq[k + 1]]) for k in range(1, len(seq) - 1))


# ============================================================================
# Scenario generation and persistence
# ============================================================================


def build_scenario(coords, defaults: ScenarioDefaults | None = None, data_center: Point | None = None) -> Scenario:
	"""Build a scenario with uniform node parameters from a list of (x, y)."""
	defaults = defaults or ScenarioDefaults()
	radio = RadioParams(
		tx_power_watts=defaults.tx_power_w,
		bandwidth_hz=defaults.bandwidth_hz,
		noise_power_watts=defaults.noise_power_w,
		ref_gain_linear=defaults.ref_gain_linear,
	)
	nodes = tuple(
		SensorNode(
			id=index,
			position=Point(float(x), float(y)),
			data_bits=defaults.data_bits,
			ref_gain_linear=defaults.ref_gain_linear,
		)
		for index, (x, y) in enumerate(coords, start=1)
	)
	return Scenario(
		data_center=data_center or Point(0.0, 0.0),
		nodes=nodes,
		uav_altitude_m=defaults.altitude_m,
		uav_speed_mps=defaults.speed_mps,
		radio=radio,
	)


def generate_scenario(
	n: int,
	radius_m: float | None = None,
	seed: int = 0,
	defaults: ScenarioDefaults | None = None,
) -> Scenario:
	"""
	Scatter `n` nodes uniformly over a disk centred on the data center.

	Uniform over area: the radius is drawn as R * sqrt(U), not R * U.

	Args:
		n: number of sensor nodes
		radius_m: disk radius; defaults to defaults.radius_m
		seed: seed for numpy.random.default_rng
		defaults: physical parameters applied to every node

	Returns:
		Scenario: deterministic for a given (n, radius, seed, defaults)
	"""
	from laura_route.validations import validate_scenario

	defaults = defaults or ScenarioDefaults()
	radius_m = defaults.radius_m if radius_m is None else radius_m
	if n < 1:
		throw(f"A scenario needs n >= 1 nodes, got {n}")
	if not radius_m > 0:
		throw(f"Radius must be positive, got {radius_m}")

	rng = np.random.default_rng(seed)
	radii = radius_m * np.sqrt(rng.random(n))
	angles = 2.0 * np.pi * rng.random(n)
	coords = np.column_stack((radii * np.cos(angles), radii * np.sin(angles)))

	scenario = build_scenario(coords.tolist(), defaults)
	validate_scenario(scenario)
	logger.debug(f"Generated scenario n={n} radius={radius_m} seed={seed}")
	return scenario


def load_scenario(path: str | Path) -> Scenario:
	from laura_route.validations import validate_scenario

	scenario = Scenario.from_dict(load_json(path))
	validate_scenario(scenario)
	return scenario


def save_scenario(scenario: Scenario, path: str | Path) -> Path:
	return dump_json(scenario.to_dict(), path)
