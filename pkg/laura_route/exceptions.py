# Copyright (c) 2025, LAURA Route contributors
# For license information, please see license.txt

"""
Exception hierarchy for LAURA Route.

Every error raised on purpose by the package derives from LauraError so
callers (the CLI, the benchmark harness) can catch the whole family at once.
"""


class LauraError(Exception):
	"""Base class for all package errors"""


class ParameterError(LauraError, ValueError):
	"""An input value is outside its documented domain"""


class CapacityError(LauraError):
	"""A problem instance is larger than a solver is allowed to handle"""


class StateError(LauraError):
	"""An object is not in a state that allows the requested operation"""


class VerificationError(LauraError):
	"""
	A candidate route failed verification.

	Attributes:
		kind: one of the VerificationKind constants
		detail: human readable message, embedded verbatim in retry prompts
	"""

	def __init__(self, kind: str, detail: str):
		if not detail:
			raise ValueError("VerificationError detail must not be empty")
		super().__init__(f"{kind}: {detail}")
		self.kind = kind
		self.detail = detail

	def __eq__(self, other):
		if not isinstance(other, VerificationError):
			return NotImplemented
		return self.kind == other.kind and self.detail == other.detail

	def __hash__(self):
		return hash((self.kind, self.detail))


class VerificationKind:
	"""Verification failure kinds, in the order the checks run"""

	UNPARSEABLE = "Unparseable"
	BAD_ENDPOINTS = "BadEndpoints"
	WRONG_LENGTH = "WrongLength"
	DUPLICATE_NODE = "DuplicateNode"
	MISSING_NODE = "MissingNode"
	OBJECTIVE_MISMATCH = "ObjectiveMismatch"

	ALL = (UNPARSEABLE, BAD_ENDPOINTS, WRONG_LENGTH, DUPLICATE_NODE, MISSING_NODE, OBJECTIVE_MISMATCH)


# ============================================================================
# Language model gateway
# ============================================================================


class GatewayError(LauraError):
	"""Any failure while talking to a chat-completions endpoint"""


class GatewayCredentialError(GatewayError):
	"""The API key environment variable is missing or empty"""


class GatewayTransportError(GatewayError):
	"""Connection could not be established or was dropped"""


class GatewayTimeoutError(GatewayError):
	"""The endpoint did not answer within the configured timeout"""


class GatewayStatusError(GatewayError):
	"""The endpoint answered with a non-2xx status"""

	def __init__(self, status: int, body: str):
		super().__init__(f"HTTP {status}: {body}")
		self.status = status
		self.body = body


class GatewayResponseError(GatewayError):
	"""The endpoint answered 2xx but the body is not a chat completion"""

