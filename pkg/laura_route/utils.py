"""Utility helpers shared across LAURA Route."""

from __future__ import annotations

import hashlib
import json
import logging
from pathlib import Path

from laura_route import __version__ as app_version
from laura_route.exceptions import ParameterError

logger = logging.getLogger(__name__)

_BASE_DIR = Path(__file__).resolve().parent
_FIXTURES_DIR = _BASE_DIR / "fixtures"


def get_app_version() -> str:
	"""
	Get the application version from __init__.py

	Returns:
		str: Application version
	"""
	return app_version


def get_fixture_path(name: str) -> Path:
	"""
	Resolve a file shipped in the fixtures directory.

	Args:
		name: file name inside laura_route/fixtures

	Returns:
		Path: absolute path to the fixture
	"""
	return _FIXTURES_DIR / name


def throw(message: str, exc: type[Exception] = ParameterError):
	"""Raise `exc` with `message`. Mirrors the throw(msg, exc) idiom."""
	raise exc(message)


def derive_seed(*parts) -> int:
	"""
	Derive a 63-bit seed from an ordered tuple of parts.

	The digest depends only on the parts themselves, so adding a new part
	combination (for example a new algorithm) never shifts any other stream.
	"""
	tag = "::".join(str(part) for part in parts)
	return int(hashlib.sha256(tag.encode("utf-8")).hexdigest()[:16], 16) >> 1


def dump_json(data, path: str | Path) -> Path:
	"""Write `data` as pretty, key-sorted JSON and return the path."""
	path = Path(path)
	path.parent.mkdir(parents=True, exist_ok=True)
	path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")
	return path


def load_json(path: str | Path):
	"""Read a JSON document, raising ParameterError when it cannot be decoded."""
	try:
		return json.loads(Path(path).read_text(encoding="utf-8"))
	except json.JSONDecodeError as e:
		throw(f"{path} is not valid JSON: {e}")


def log_message(message: str, level: str = "info", indent: int = 0):
	"""
	Standardized console logging with consistent formatting

	Args:
		message (str): The message to log
		level (str): Log level - info, success, warning, error
		indent (int): Indentation level (0, 1, 2, etc.)
	"""
	indent_str = "  " * indent

	prefixes = {
		"info": "[INFO]",
		"success": "[SUCCESS]",
		"warning": "[WARNING]",
		"error": "[ERROR]",
	}

	prefix = prefixes.get(level, "[INFO]")
	print(f"{indent_str}{prefix} {message}")

	if level == "error":
		logger.error(message)
	elif level == "warning":
		logger.warning(message)
	else:
		logger.info(message)
