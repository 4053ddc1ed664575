# Copyright (c) 2025, Maverick Coref contributors
# For license information, please see license.txt

from abc import ABC, abstractmethod
from pathlib import Path

from maverick_coref.corpus.document import CorefPrediction, Document, corpus_summary
from maverick_coref.exceptions import ConfigError, CorefError, SerializationError
from maverick_coref.utils import decode_content


class BaseCorpusReader(ABC):
	"""Abstract base class for corpus readers and writers."""

	@abstractmethod
	def parse(self, file_content: bytes) -> list[Document]:
		"""
		Parse the file content and return its documents.

		Args:
		        file_content: Raw bytes of the corpus file

		Returns:
		        List of validated Document objects
		"""

	@abstractmethod
	def write(self, documents: list[Document], predictions: list[CorefPrediction] | None = None) -> str:
		"""
		Serialize documents, replacing gold clusters with ``predictions`` when given.

		Args:
		        documents: Documents providing tokens and sentence structure
		        predictions: One prediction per document, matched by document key

		Returns:
		        The file content as text
		"""

	def validate_file(self, file_content: bytes) -> tuple[bool, str]:
		"""Validate that the file is in the expected format."""
		try:
			self.parse(file_content)
			return True, ""
		except CorefError as e:
			return False, str(e)

	def read_path(self, path: str | Path) -> list[Document]:
		try:
			content = Path(path).read_bytes()
		except OSError as e:
			raise ConfigError(f"Unable to read {path}: {e}")
		return self.parse(content)

	def write_path(self, path: str | Path, documents, predictions=None):
		Path(path).write_text(self.write(documents, predictions), encoding="utf-8")

	def decode(self, file_content: bytes | str) -> str:
		return file_content if isinstance(file_content, str) else decode_content(file_content)

	def get_preview_data(self, documents: list[Document]) -> dict:
		"""Summary of a parsed corpus for logging and the CLI."""
		return {
			**corpus_summary(documents),
			"documents_preview": [
				{
					"doc_id": doc.doc_id,
					"part": doc.part,
					"tokens": doc.n_tokens,
					"sentences": len(doc.sentence_ends),
					"clusters": len(doc.gold_clusters),
					"mentions": len(doc.mentions),
				}
				for doc in documents
			],
		}


def clusters_by_key(documents: list[Document], predictions) -> dict:
	"""Gold clusters per document, or the matching prediction's clusters."""
	if predictions is None:
		return {doc.key: doc.gold_clusters for doc in documents}

	by_key = {prediction.key: prediction.clusters for prediction in predictions}
	missing = [doc.doc_id for doc in documents if doc.key not in by_key]
	if missing:
		raise SerializationError(f"no prediction for documents: {', '.join(missing)}")
	return by_key
