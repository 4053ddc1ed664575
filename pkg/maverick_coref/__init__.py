"""Coreference resolution toolkit: probabilistic mention extraction and mention clustering."""

__version__ = "0.1.0"
