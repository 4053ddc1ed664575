# Copyright (c) 2025, Maverick Coref contributors
# For license information, please see license.txt

import io
import logging
import re
from collections import defaultdict
from typing import TextIO

from maverick_coref.corpus.document import Document, Span
from maverick_coref.corpus.readers.base import BaseCorpusReader, clusters_by_key
from maverick_coref.exceptions import ParseError, SerializationError, ValidationError

logger = logging.getLogger(__name__)

BEGIN_RE = re.compile(r"^#begin document \((?P<name>.*?)\)(?:; part (?P<part>\d+))?\s*$")
OPEN_RE = re.compile(r"^\((\d+)$")
CLOSE_RE = re.compile(r"^(\d+)\)$")
SINGLE_RE = re.compile(r"^\((\d+)\)$")

TOKEN_COLUMN = 3
SPEAKER_COLUMN = 9
# Shorter rows carry no speaker cell
MIN_SPEAKER_COLUMNS = 11


class CoNLLReader(BaseCorpusReader):
	"""
	Reader for CoNLL-2012 column files.

	File format expectations:
	- Documents delimited by `#begin document (name); part NNN` and `#end document`
	- One token per line, blank lines between sentences
	- Token in the fourth column, speaker in the tenth (`-` when unknown)
	- Coreference in the last column: `(id`, `id)`, `(id)` joined with `|`, `-` for none
	"""

	def parse(self, file_content: bytes) -> list[Document]:
		documents = parse_conll(self.decode(file_content))
		logger.info("Parsed %d CoNLL documents", len(documents))
		return documents

	def write(self, documents, predictions=None) -> str:
		return write_conll(documents, predictions)


class _DocumentBuilder:
	def __init__(self, name: str, part: int):
		self.name = name
		self.part = part
		self.tokens: list[str] = []
		self.columns: list[list[str]] = []
		self.sentence_ends: list[int] = []
		self.speakers: list[str | None] = []
		self.sentence_tokens = 0
		# cluster id -> stack of (start token, sentence number, line)
		self.open_spans: dict[int, list[tuple[int, int, int]]] = defaultdict(list)
		self.clusters: dict[int, list[Span]] = defaultdict(list)

	def add_row(self, cells: list[str], line: int):
		if len(cells) < TOKEN_COLUMN + 2:
			raise ParseError(f"expected at least {TOKEN_COLUMN + 2} columns, got {len(cells)}", line)

		index = len(self.tokens)
		if self.sentence_tokens == 0:
			speaker = cells[SPEAKER_COLUMN] if len(cells) >= MIN_SPEAKER_COLUMNS else "-"
			self.speakers.append(None if speaker == "-" else speaker)
		self.tokens.append(cells[TOKEN_COLUMN])
		self.columns.append(cells[:-1])
		self.sentence_tokens += 1
		self._read_coref(cells[-1], index, line)

	def _read_coref(self, cell: str, index: int, line: int):
		if cell == "-":
			return
		sentence = len(self.sentence_ends)
		for part in cell.split("|"):
			if match := SINGLE_RE.match(part):
				self.clusters[int(match.group(1))].append(Span(index, index))
			elif match := OPEN_RE.match(part):
				self.open_spans[int(match.group(1))].append((index, sentence, line))
			elif match := CLOSE_RE.match(part):
				cluster_id = int(match.group(1))
				if not self.open_spans[cluster_id]:
					raise ParseError(f"'{part}' closes cluster {cluster_id} which has no open span", line)
				start, start_sentence, start_line = self.open_spans[cluster_id].pop()
				if start_sentence != sentence:
					raise ValidationError(
						f"line {line}: span of cluster {cluster_id} opened on line {start_line} crosses a sentence boundary"
					)
				self.clusters[cluster_id].append(Span(start, index))
			else:
				raise ParseError(f"malformed coreference cell '{cell}'", line)

	def end_sentence(self):
		if self.sentence_tokens:
			self.sentence_ends.append(len(self.tokens) - 1)
			self.sentence_tokens = 0

	def build(self, line: int) -> Document:
		self.end_sentence()
		unclosed = sorted(cluster_id for cluster_id, stack in self.open_spans.items() if stack)
		if unclosed:
			_, _, open_line = self.open_spans[unclosed[0]][-1]
			raise ParseError(f"cluster {unclosed[0]} opened on line {open_line} is never closed", line)

		document = Document(
			doc_id=self.name,
			tokens=self.tokens,
			sentence_ends=self.sentence_ends,
			speakers=self.speakers if any(s is not None for s in self.speakers) else None,
			gold_clusters=[sorted(self.clusters[cluster_id]) for cluster_id in sorted(self.clusters)],
			part=self.part,
			columns=self.columns,
		)
		return document.validate()


def parse_conll(source: str | TextIO) -> list[Document]:
	"""Parse CoNLL-2012 text into documents; clusters are ordered by their numeric id."""
	stream = io.StringIO(source) if isinstance(source, str) else source
	documents, builder = [], None
	line_no = 0
	for line_no, raw in enumerate(stream, start=1):
		line = raw.strip()
		if line.startswith("#begin document"):
			if builder is not None:
				raise ParseError(f"document '{builder.name}' is not terminated", line_no)
			match = BEGIN_RE.match(line)
			if not match:
				raise ParseError(f"malformed header '{line}'", line_no)
			builder = _DocumentBuilder(match.group("name"), int(match.group("part") or 0))
		elif line.startswith("#end document"):
			if builder is None:
				raise ParseError("'#end document' without a matching '#begin document'", line_no)
			documents.append(builder.build(line_no))
			builder = None
		elif line.startswith("#"):
			continue
		elif not line:
			if builder is not None:
				builder.end_sentence()
		else:
			if builder is None:
				raise ParseError("token row outside of a document", line_no)
			builder.add_row(line.split(), line_no)

	if builder is not None:
		raise ParseError(f"document '{builder.name}' is not terminated", line_no)
	return documents


def _crossing_spans(cluster) -> tuple[tuple[int, int], tuple[int, int]] | None:
	"""Two spans of one cluster that overlap without nesting, if any."""
	spans = sorted(span for span in cluster if span[0] < span[1])
	for i, (s1, e1) in enumerate(spans):
		for s2, e2 in spans[i + 1 :]:
			if s2 > e1:
				break
			if s1 < s2 < e1 < e2:
				return (s1, e1), (s2, e2)
	return None


def _coref_cells(document: Document, clusters) -> list[str]:
	opens, singles, closes = (defaultdict(list) for _ in range(3))
	for cluster_id, cluster in enumerate(clusters):
		# brackets of one cluster pair up innermost first, so crossing spans would be rewritten
		crossing = _crossing_spans(cluster)
		if crossing is not None:
			(s1, e1), (s2, e2) = crossing
			raise SerializationError(
				f"{document.doc_id}: spans [{s1}, {e1}] and [{s2}, {e2}] of cluster {cluster_id} cross "
				"and cannot be written as CoNLL brackets, write JSON lines instead"
			)
		for start, end in cluster:
			if not 0 <= start <= end < document.n_tokens:
				raise SerializationError(
					f"{document.doc_id}: span [{start}, {end}] out of range for {document.n_tokens} tokens"
				)
			if start == end:
				singles[start].append(f"({cluster_id})")
			else:
				opens[start].append(f"({cluster_id}")
				closes[end].append(f"{cluster_id})")

	# closes first so that a span ending where another of its cluster opens stays paired
	return [
		"|".join(closes[i] + singles[i] + opens[i]) or "-" for i in range(document.n_tokens)
	]


def _row_cells(document: Document, index: int, position: int, speaker: str | None) -> list[str]:
	if document.columns is not None:
		return document.columns[index]
	return [
		document.doc_id,
		str(document.part),
		str(position),
		document.tokens[index],
		"-",
		"-",
		"-",
		"-",
		"-",
		speaker or "-",
		"*",
	]


def write_conll(documents: list[Document], predictions=None) -> str:
	"""Serialize documents; with ``predictions`` their clusters replace the gold ones."""
	clusters = clusters_by_key(documents, predictions)
	out = io.StringIO()
	for document in documents:
		cells = _coref_cells(document, clusters[document.key])
		out.write(f"#begin document ({document.doc_id}); part {document.part:03d}\n")
		for number, (first, last) in enumerate(document.sentences):
			speaker = document.speakers[number] if document.speakers is not None else None
			for index in range(first, last + 1):
				row = _row_cells(document, index, index - first, speaker)
				out.write("\t".join([*row, cells[index]]) + "\n")
			out.write("\n")
		out.write("#end document\n")
	return out.getvalue()
