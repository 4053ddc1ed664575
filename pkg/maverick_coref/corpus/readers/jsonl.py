# Copyright (c) 2025, Maverick Coref contributors
# For license information, please see license.txt

import io
import json
import logging
from typing import TextIO

from maverick_coref.corpus.document import Document
from maverick_coref.corpus.readers.base import BaseCorpusReader, clusters_by_key
from maverick_coref.exceptions import ParseError, ValidationError

logger = logging.getLogger(__name__)

REQUIRED_KEYS = ["doc_id", "sentences", "clusters"]


class JSONLReader(BaseCorpusReader):
	"""
	Reader for one-document-per-line JSON corpora.

	Line format:
	{"doc_id": str, "sentences": [[token, ...], ...], "speakers": [str, ...] (optional),
	 "clusters": [[[start, end], ...], ...]} with global, inclusive token indices.
	"""

	def parse(self, file_content: bytes) -> list[Document]:
		documents = parse_jsonl(self.decode(file_content))
		logger.info("Parsed %d JSONL documents", len(documents))
		return documents

	def write(self, documents, predictions=None) -> str:
		return write_jsonl(documents, predictions)


def _is_span(value) -> bool:
	return (
		isinstance(value, list)
		and len(value) == 2
		and all(isinstance(i, int) and not isinstance(i, bool) for i in value)
	)


def _document_from_record(record, line: int) -> Document:
	if not isinstance(record, dict):
		raise ParseError("expected a JSON object", line)
	missing = [key for key in REQUIRED_KEYS if key not in record]
	if missing:
		raise ParseError(f"missing keys: {', '.join(missing)}", line)

	doc_id, sentences, clusters = record["doc_id"], record["sentences"], record["clusters"]
	speakers = record.get("speakers")
	if not isinstance(doc_id, str):
		raise ParseError("doc_id must be a string", line)
	if not isinstance(sentences, list) or not all(
		isinstance(sentence, list) and sentence and all(isinstance(t, str) for t in sentence)
		for sentence in sentences
	):
		raise ParseError("sentences must be non-empty lists of string tokens", line)
	if not isinstance(clusters, list) or not all(
		isinstance(cluster, list) and all(_is_span(span) for span in cluster) for cluster in clusters
	):
		raise ParseError("clusters must be lists of [start, end] pairs", line)
	if speakers is not None and (
		not isinstance(speakers, list) or not all(s is None or isinstance(s, str) for s in speakers)
	):
		raise ParseError("speakers must be a list of strings", line)
	part = record.get("part", 0)
	if not isinstance(part, int) or isinstance(part, bool) or part < 0:
		raise ParseError("part must be a non-negative integer", line)

	tokens, sentence_ends = [], []
	for sentence in sentences:
		tokens.extend(sentence)
		sentence_ends.append(len(tokens) - 1)

	document = Document(
		doc_id=doc_id,
		tokens=tokens,
		sentence_ends=sentence_ends,
		speakers=speakers,
		gold_clusters=clusters,
		part=part,
	)
	try:
		return document.validate()
	except ValidationError as e:
		raise ValidationError(f"line {line}: {e}")


def parse_jsonl(source: str | TextIO) -> list[Document]:
	stream = io.StringIO(source) if isinstance(source, str) else source
	documents = []
	for line_no, raw in enumerate(stream, start=1):
		if not raw.strip():
			continue
		try:
			record = json.loads(raw)
		except json.JSONDecodeError as e:
			raise ParseError(f"invalid JSON: {e.msg}", line_no)
		documents.append(_document_from_record(record, line_no))
	return documents


def document_to_record(document: Document, clusters) -> dict:
	record = {
		"doc_id": document.doc_id,
		"sentences": [document.tokens[first : last + 1] for first, last in document.sentences],
	}
	if document.speakers is not None:
		record["speakers"] = list(document.speakers)
	record["clusters"] = [[[start, end] for start, end in cluster] for cluster in clusters]
	if document.part:
		record["part"] = document.part
	return record


def write_jsonl(documents: list[Document], predictions=None) -> str:
	clusters = clusters_by_key(documents, predictions)
	return "".join(
		json.dumps(document_to_record(document, clusters[document.key]), ensure_ascii=False) + "\n"
		for document in documents
	)
