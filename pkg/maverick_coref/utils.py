# Copyright (c) 2025, Maverick Coref contributors
# For license information, please see license.txt

import importlib
from importlib import resources
from pathlib import Path

from maverick_coref import hooks
from maverick_coref.exceptions import ConfigError, ParseError


def get_attr(method_string: str):
	"""Import and return the object at a dotted path ("package.module.Name")."""
	module_name, _, attr = method_string.rpartition(".")
	if not module_name:
		raise ConfigError(f"'{method_string}' is not a dotted path")

	try:
		module = importlib.import_module(module_name)
		return getattr(module, attr)
	except (ImportError, AttributeError):
		raise ConfigError(f"'{method_string}' not found. Please check the path.")


def get_reader_for_path(path: str | Path):
	"""Get an instance of the corpus reader registered for the file's extension."""
	suffix = Path(path).suffix.lower()
	reader_class = get_attr(hooks.corpus_readers.get(suffix, hooks.default_corpus_reader))
	return reader_class()


def get_clusterer_class(kind: str):
	if kind not in hooks.clusterers:
		raise ConfigError(
			"Unknown clusterer '{0}'. Expected one of: {1}".format(kind, ", ".join(sorted(hooks.clusterers)))
		)
	return get_attr(hooks.clusterers[kind])


def read_resource(relative_path: str) -> str:
	return resources.files(hooks.app_name).joinpath(relative_path).read_text(encoding="utf-8")


def decode_content(content: bytes) -> str:
	"""Decode bytes to string, trying multiple encodings."""
	for encoding in ["utf-8-sig", "utf-8"]:
		try:
			return content.decode(encoding)
		except UnicodeDecodeError:
			continue
	raise ParseError("Unable to decode file: UTF-8 expected")
