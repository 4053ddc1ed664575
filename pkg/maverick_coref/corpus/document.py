# Copyright (c) 2025, Maverick Coref contributors
# For license information, please see license.txt

import bisect
import logging
from dataclasses import dataclass, field, replace
from typing import NamedTuple

from maverick_coref import hooks
from maverick_coref.exceptions import LengthError, ValidationError

logger = logging.getLogger(__name__)


class Span(NamedTuple):
	"""A mention as inclusive token indices."""

	start: int
	end: int


Cluster = list[Span]


def as_clusters(clusters) -> list[Cluster]:
	return [[Span(int(start), int(end)) for start, end in cluster] for cluster in clusters]


@dataclass
class Document:
	"""A sentence-split, tokenized document with optional speakers and gold clusters."""

	doc_id: str
	tokens: list[str]
	sentence_ends: list[int]
	speakers: list[str | None] | None = None
	gold_clusters: list[Cluster] = field(default_factory=list)
	part: int = 0
	# CoNLL cells before the coreference column, kept for writing back
	columns: list[list[str]] | None = None
	# Original token index per token after speaker insertion; None on prefix tokens
	source_index: list[int | None] | None = None
	# Position of this document's first token in the document it was split from
	offset: int = 0

	def __post_init__(self):
		self.gold_clusters = as_clusters(self.gold_clusters)

	@property
	def key(self) -> tuple[str, int]:
		return (self.doc_id, self.part)

	@property
	def n_tokens(self) -> int:
		return len(self.tokens)

	@property
	def sentences(self) -> list[tuple[int, int]]:
		"""Inclusive (first, last) token index of each sentence."""
		bounds, start = [], 0
		for end in self.sentence_ends:
			bounds.append((start, end))
			start = end + 1
		return bounds

	def sentence_of(self, index: int) -> int:
		return bisect.bisect_left(self.sentence_ends, index)

	@property
	def mentions(self) -> list[Span]:
		return sorted(span for cluster in self.gold_clusters for span in cluster)

	def cluster_of(self) -> dict[Span, int]:
		return {span: index for index, cluster in enumerate(self.gold_clusters) for span in cluster}

	def is_prefix_token(self, index: int) -> bool:
		return self.source_index is not None and self.source_index[index] is None

	def validate(self) -> "Document":
		n = self.n_tokens
		ends = self.sentence_ends
		if n == 0:
			if ends:
				raise ValidationError(f"{self.doc_id}: sentence ends given for an empty document")
		elif not ends or ends[-1] != n - 1:
			raise ValidationError(f"{self.doc_id}: last sentence must end on token {n - 1}")
		if any(b <= a for a, b in zip(ends, ends[1:])) or (ends and ends[0] < 0):
			raise ValidationError(f"{self.doc_id}: sentence ends must be strictly increasing")
		if self.speakers is not None and len(self.speakers) != len(ends):
			raise ValidationError(
				f"{self.doc_id}: {len(self.speakers)} speakers for {len(ends)} sentences"
			)
		if self.columns is not None and len(self.columns) != n:
			raise ValidationError(f"{self.doc_id}: column rows do not match the token count")
		validate_clusters(self, self.gold_clusters)
		return self


def validate_clusters(document: Document, clusters: list[Cluster]):
	"""Spans must be in range, inside one sentence, and belong to at most one cluster."""
	seen = set()
	for cluster in clusters:
		if not cluster:
			raise ValidationError(f"{document.doc_id}: empty cluster")
		for start, end in cluster:
			if not 0 <= start <= end < document.n_tokens:
				raise ValidationError(
					f"{document.doc_id}: span [{start}, {end}] outside a document of {document.n_tokens} tokens"
				)
			if document.sentence_of(start) != document.sentence_of(end):
				raise ValidationError(f"{document.doc_id}: span [{start}, {end}] crosses a sentence boundary")
			if (start, end) in seen:
				raise ValidationError(f"{document.doc_id}: span [{start}, {end}] appears in more than one place")
			seen.add((start, end))


@dataclass
class CorefPrediction:
	doc_id: str
	clusters: list[Cluster] = field(default_factory=list)
	part: int = 0

	def __post_init__(self):
		self.clusters = [sorted(cluster) for cluster in as_clusters(self.clusters) if cluster]

	@property
	def key(self) -> tuple[str, int]:
		return (self.doc_id, self.part)

	@property
	def mentions(self) -> list[Span]:
		return sorted(span for cluster in self.clusters for span in cluster)

	def validate_for(self, document: Document) -> "CorefPrediction":
		validate_clusters(document, self.clusters)
		return self


def filter_singletons(clusters: list[Cluster]) -> list[Cluster]:
	return [cluster for cluster in clusters if len(cluster) > 1]


def insert_speakers(
	document: Document,
	speaker_token: str = hooks.speaker_token,
	separator: str = hooks.speaker_separator,
) -> Document:
	"""Prefix ``[SPK] name :`` to the first sentence and to every sentence where the speaker changes.

	Gold spans and sentence ends are shifted accordingly; ``source_index`` maps each
	token of the result back to the input (None for inserted tokens).
	"""
	if document.speakers is None:
		return document

	source = document.source_index or list(range(document.n_tokens))
	tokens, source_index, sentence_ends, shifts = [], [], [], []
	previous = None
	for number, (first, last) in enumerate(document.sentences):
		speaker = document.speakers[number]
		if speaker is not None and (number == 0 or speaker != previous):
			tokens.extend([speaker_token, speaker, separator])
			source_index.extend([None, None, None])
		previous = speaker

		shifts.append(len(tokens) - first)
		tokens.extend(document.tokens[first : last + 1])
		source_index.extend(source[first : last + 1])
		sentence_ends.append(len(tokens) - 1)

	def shifted(span: Span) -> Span:
		shift = shifts[document.sentence_of(span.start)]
		return Span(span.start + shift, span.end + shift)

	gold_clusters = [[shifted(span) for span in cluster] for cluster in document.gold_clusters]
	return replace(
		document,
		tokens=tokens,
		sentence_ends=sentence_ends,
		gold_clusters=gold_clusters,
		columns=None,
		source_index=source_index,
	)


def to_source_clusters(document: Document, clusters: list[Cluster]) -> list[Cluster]:
	"""Map clusters over ``document`` back to the coordinates before speaker insertion."""
	if document.source_index is None:
		return [list(cluster) for cluster in clusters]

	mapped = []
	for cluster in clusters:
		spans = []
		for start, end in cluster:
			source_start, source_end = document.source_index[start], document.source_index[end]
			if source_start is None or source_end is None:
				logger.warning("%s: dropping span [%d, %d] on speaker prefix tokens", document.doc_id, start, end)
				continue
			spans.append(Span(source_start, source_end))
		if spans:
			mapped.append(spans)
	return mapped


def split_document(document: Document, max_len: int) -> list[Document]:
	"""Pack whole sentences into segments of at most ``max_len`` tokens.

	Gold clusters are restricted to each segment and re-indexed locally; clusters
	left without spans are dropped.
	"""
	if document.n_tokens <= max_len:
		return [document]

	groups, current = [], []
	for first, last in document.sentences:
		length = last - first + 1
		if length > max_len:
			raise LengthError(
				f"{document.doc_id}: sentence of {length} tokens exceeds max_len {max_len}"
			)
		if current and last - current[0][0] + 1 > max_len:
			groups.append(current)
			current = []
		current.append((first, last))
	groups.append(current)

	segments = []
	for group in groups:
		seg_first, seg_last = group[0][0], group[-1][1]
		clusters = []
		for cluster in document.gold_clusters:
			spans = [
				Span(start - seg_first, end - seg_first)
				for start, end in cluster
				if seg_first <= start and end <= seg_last
			]
			if spans:
				clusters.append(spans)

		first_sentence = document.sentence_of(seg_first)
		segments.append(
			Document(
				doc_id=document.doc_id,
				tokens=document.tokens[seg_first : seg_last + 1],
				sentence_ends=[last - seg_first for _, last in group],
				speakers=(
					document.speakers[first_sentence : first_sentence + len(group)]
					if document.speakers is not None
					else None
				),
				gold_clusters=clusters,
				part=document.part,
				columns=document.columns[seg_first : seg_last + 1] if document.columns is not None else None,
				source_index=(
					document.source_index[seg_first : seg_last + 1]
					if document.source_index is not None
					else None
				),
				offset=document.offset + seg_first,
			)
		)
	logger.debug("%s: split into %d segments", document.doc_id, len(segments))
	return segments


def merge_segment_predictions(
	document: Document, segments: list[Document], segment_clusters: list[list[Cluster]]
) -> list[Cluster]:
	"""Shift per-segment clusters back into ``document`` coordinates.

	Clusters from different segments are never merged.
	"""
	merged = []
	for segment, clusters in zip(segments, segment_clusters):
		shift = segment.offset - document.offset
		merged.extend([Span(start + shift, end + shift) for start, end in cluster] for cluster in clusters)
	return merged


def corpus_summary(documents: list[Document]) -> dict:
	"""Dataset statistics: documents, average tokens and mentions, singleton percentage."""
	n_docs = len(documents)
	n_clusters = sum(len(doc.gold_clusters) for doc in documents)
	n_singletons = sum(1 for doc in documents for cluster in doc.gold_clusters if len(cluster) == 1)
	return {
		"documents": n_docs,
		"avg_tokens": sum(doc.n_tokens for doc in documents) / n_docs if n_docs else 0.0,
		"avg_mentions": sum(len(doc.mentions) for doc in documents) / n_docs if n_docs else 0.0,
		"singleton_pct": 100.0 * n_singletons / n_clusters if n_clusters else 0.0,
	}
