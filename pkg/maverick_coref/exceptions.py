# Copyright (c) 2025, Maverick Coref contributors
# For license information, please see license.txt


class CorefError(Exception):
	"""Base class for every error raised by maverick_coref."""


class ValidationError(CorefError):
	"""A document, span or prediction violates its invariants."""


class ParseError(CorefError):
	def __init__(self, message: str, line: int | None = None):
		self.line = line
		if line is not None:
			message = f"line {line}: {message}"
		super().__init__(message)


class SerializationError(CorefError):
	pass


class DimensionError(CorefError):
	pass


class LengthError(CorefError):
	pass


class VocabError(CorefError):
	pass


class NumericError(CorefError):
	"""A tensor operation produced NaN or Inf."""


class ContractError(CorefError):
	pass


class ConfigError(CorefError):
	pass


class CheckpointError(CorefError):
	pass


class TrainingError(CorefError):
	pass
