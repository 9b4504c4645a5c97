# Copyright (c) 2025, LAURA Route contributors
# For license information, please see license.txt

"""
OpenAI-compatible chat-completions client.

One blocking POST per call, with a few jittered exponential retries for
network failures, timeouts, 429 and 5xx replies. The API key is read from
the environment at call time and never logged.
"""

from __future__ import annotations

import logging
import os
import random
import time
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import requests

from laura_route.config import LlmEndpointConfig
from laura_route.exceptions import (
	GatewayCredentialError,
	GatewayError,
	GatewayResponseError,
	GatewayStatusError,
	GatewayTimeoutError,
	GatewayTransportError,
	ParameterError,
)

logger = logging.getLogger(__name__)

ROLES = ("system", "user", "assistant")
BODY_EXCERPT_LENGTH = 500
RETRYABLE_STATUS = frozenset({429, 500, 502, 503, 504})


@dataclass(frozen=True)
class ChatExchange:
	"""One request/response pair"""

	request_messages: tuple[tuple[str, str], ...]
	response_text: str
	latency: float
	token_counts: dict | None = None


def resolve_api_key(config: LlmEndpointConfig) -> str:
	key = os.environ.get(config.api_key_env_var, "").strip()
	if not key:
		raise GatewayCredentialError(f"Environment variable {config.api_key_env_var} is not set")
	return key


def _normalise_messages(messages) -> tuple[tuple[str, str], ...]:
	normalised = []
	for item in messages:
		role, content = (item["role"], item["content"]) if isinstance(item, dict) else item
		if role not in ROLES:
			raise ParameterError(f"Unknown chat role '{role}'. Use one of {', '.join(ROLES)}")
		normalised.append((role, str(content)))
	if not normalised:
		raise ParameterError("A chat request needs at least one message")
	return tuple(normalised)


def _extract_content(response: requests.Response) -> tuple[str, dict | None]:
	try:
		data = response.json()
	except ValueError:
		raise GatewayResponseError(
			f"Reply is not JSON: {response.text[:BODY_EXCERPT_LENGTH]!r}"
		) from None

	try:
		content = data["choices"][0]["message"]["content"]
	except (KeyError, IndexError, TypeError):
		raise GatewayResponseError(
			f"Reply has no choices[0].message.content: {response.text[:BODY_EXCERPT_LENGTH]!r}"
		) from None
	if not isinstance(content, str):
		raise GatewayResponseError(f"Message content is {type(content).__name__}, expected a string")

	usage = data.get("usage") if isinstance(data, dict) else None
	return content, usage if isinstance(usage, dict) else None


def chat_complete(
	config: LlmEndpointConfig,
	messages: Sequence,
	sleep: Callable[[float], None] = time.sleep,
) -> ChatExchange:
	"""
	Send `messages` to `{base_url}/chat/completions`.

	Args:
		config: endpoint, model, temperature, timeout and retry settings
		messages: (role, content) pairs or {"role", "content"} dicts
		sleep: backoff sleeper

	Returns:
		ChatExchange: content of the first choice and the call latency

	Raises:
		GatewayCredentialError: the key variable is unset
		GatewayTimeoutError: no reply within config.timeout, after retries
		GatewayTransportError: connection failure, after retries
		GatewayStatusError: non-2xx reply (retried only for 429 and 5xx)
		GatewayResponseError: 2xx reply that is not a chat completion
	"""
	request_messages = _normalise_messages(messages)
	key = resolve_api_key(config)
	url = f"{config.base_url.rstrip('/')}/chat/completions"

	payload = {
		"model": config.model_name,
		"messages": [{"role": role, "content": content} for role, content in request_messages],
		"temperature": config.temperature,
	}
	if config.max_tokens:
		payload["max_tokens"] = config.max_tokens
	headers = {"Content-Type": "application/json", "Authorization": f"Bearer {key}"}

	tries = config.network_retries + 1
	error: GatewayError | None = None
	for attempt in range(1, tries + 1):
		started = time.perf_counter()
		logger.debug(f"POST {url} model={config.model_name} messages={len(request_messages)} try={attempt}")
		try:
			response = requests.post(url, json=payload, headers=headers, timeout=config.timeout)
		except requests.Timeout:
			error = GatewayTimeoutError(f"No reply from {url} within {config.timeout:g} s")
		except requests.RequestException as e:
			error = GatewayTransportError(f"Could not reach {url}: {type(e).__name__}")
		else:
			latency = time.perf_counter() - started
			if 200 <= response.status_code < 300:
				content, usage = _extract_content(response)
				logger.debug(f"Reply from {config.model_name} in {latency:.2f} s ({len(content)} chars)")
				return ChatExchange(request_messages, content, latency, usage)

			error = GatewayStatusError(response.status_code, response.text[:BODY_EXCERPT_LENGTH])
			if response.status_code not in RETRYABLE_STATUS:
				raise error

		if attempt < tries:
			delay = config.backoff_base * 2 ** (attempt - 1) * (0.5 + random.random())
			logger.warning(f"Chat request failed ({error}); retrying in {delay:.2f} s")
			sleep(delay)

	logger.error(f"Chat request to {url} failed after {tries} tries: {error}")
	raise error
