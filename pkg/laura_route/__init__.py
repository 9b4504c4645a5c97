"""LLM-assisted UAV routing for Age of Information minimisation."""

__version__ = "0.3.0"
