# Copyright (c) 2025, Maverick Coref contributors
# For license information, please see license.txt

"""Start/end mention extraction with end-of-sentence regularization.

A token starts a mention when sigmoid(F_start(x_i)) > threshold. For every start,
candidate ends run from the start to the last token of its sentence and are
scored from the concatenation [x_s, x_j].
"""

import bisect
import logging
import math
from dataclasses import asdict, dataclass, fields

import numpy as np

from maverick_coref.config import EncoderConfig, HeadConfig
from maverick_coref.corpus.document import Document, Span
from maverick_coref.numcore.encoder import as_hidden
from maverick_coref.numcore.ops import concat, ffn_project, sigmoid
from maverick_coref.numcore.params import ParamSpecs, bind
from maverick_coref.numcore.tensor import Tensor

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 0.5


def extractor_param_specs(encoder: EncoderConfig, heads: HeadConfig) -> ParamSpecs:
	d, d_hid = encoder.d_model, heads.d_hid
	return {
		"extractor.start.W": (d_hid, d),
		"extractor.start.W_prime": (1, d_hid),
		"extractor.end.W": (d_hid, 2 * d),
		"extractor.end.W_prime": (1, d_hid),
	}


@dataclass(frozen=True)
class MentionCandidate:
	span: Span
	p_start: float
	p_end: float


def score_starts(hidden, params) -> Tensor:
	"""p_start for every token, shape [n]."""
	x = as_hidden(hidden)
	tape = bind(params)
	scores = ffn_project(x, tape["extractor.start.W"], tape["extractor.start.W_prime"])
	return sigmoid(scores).reshape(x.shape[0])


def candidate_end_range(start: int, sentence_ends: list[int]) -> range:
	"""Ends allowed for ``start``: up to and including the nearest sentence end."""
	return range(start, sentence_ends[bisect.bisect_left(sentence_ends, start)] + 1)


def end_probs_for_starts(hidden, starts, sentence_ends: list[int], params) -> tuple[Tensor, list[Span]]:
	"""p_end(j | s) for every start and every end in its range, scored in one batch.

	Returns the flat probability vector and the span of each entry.
	"""
	x = as_hidden(hidden)
	tape = bind(params)
	spans = [Span(start, end) for start in starts for end in candidate_end_range(start, sentence_ends)]
	if not spans:
		return Tensor(np.zeros(0)), spans

	start_rows = x[np.array([span.start for span in spans])]
	end_rows = x[np.array([span.end for span in spans])]
	pair = concat([start_rows, end_rows], axis=1)
	scores = ffn_project(pair, tape["extractor.end.W"], tape["extractor.end.W_prime"])
	return sigmoid(scores).reshape(len(spans)), spans


def score_ends(hidden, start: int, sentence_ends: list[int], params) -> Tensor:
	probs, _ = end_probs_for_starts(hidden, [start], sentence_ends, params)
	return probs


def extract_mentions(
	document: Document,
	hidden,
	params,
	threshold: float = DEFAULT_THRESHOLD,
	gold_starts: list[int] | None = None,
) -> list[MentionCandidate]:
	"""Keep every (start, end) with p_start > threshold and p_end > threshold.

	With ``gold_starts`` only those starts are scored for ends, whatever their p_start.
	Starts on speaker prefix tokens are never used.
	"""
	p_start = score_starts(hidden, params).data
	if gold_starts is None:
		starts = [i for i in range(len(p_start)) if p_start[i] > threshold]
	else:
		starts = sorted(set(gold_starts))

	prefix_starts = [i for i in starts if document.is_prefix_token(i)]
	if prefix_starts:
		logger.warning(
			"%s: ignoring %d start(s) on speaker prefix tokens", document.doc_id, len(prefix_starts)
		)
		starts = [i for i in starts if not document.is_prefix_token(i)]

	p_end, spans = end_probs_for_starts(hidden, starts, document.sentence_ends, params)
	candidates = [
		MentionCandidate(span, float(p_start[span.start]), float(p))
		for span, p in zip(spans, p_end.data)
		if p > threshold
	]
	return sorted(candidates, key=lambda candidate: candidate.span)


@dataclass
class PipelineStats:
	"""Candidate and pair counts of exhaustive enumeration versus start/end extraction."""

	n_enumeration: int = 0
	n_span_len_capped: int = 0
	n_start_end: int = 0
	n_eos_regularized: int = 0
	n_pairs_topk: int = 0
	n_pairs_pred_only: int = 0

	# (enumeration-based count, start/end count) compared row by row
	ROWS = (
		("mention extraction", "n_enumeration", "n_start_end"),
		("regularization", "n_span_len_capped", "n_eos_regularized"),
		("mention clustering", "n_pairs_topk", "n_pairs_pred_only"),
	)

	def __add__(self, other: "PipelineStats") -> "PipelineStats":
		return PipelineStats(**{f.name: getattr(self, f.name) + getattr(other, f.name) for f in fields(self)})

	def average(self, n_documents: int) -> dict[str, float]:
		return {name: (value / n_documents if n_documents else 0.0) for name, value in asdict(self).items()}

	def reduction_factors(self) -> dict[str, float | None]:
		factors = {}
		for row, coarse, pipeline in self.ROWS:
			denominator = getattr(self, pipeline)
			factors[row] = getattr(self, coarse) / denominator if denominator else None
		return factors


def pipeline_stats(
	document: Document,
	predicted_starts,
	span_len_cap: int = 30,
	top_k_ratio: float = 0.4,
	n_mentions: int | None = None,
) -> PipelineStats:
	"""Count the candidates each scheme considers on ``document``.

	``n_mentions`` defaults to the number of gold mentions.
	"""
	n = document.n_tokens
	starts = sorted(set(predicted_starts))
	if n_mentions is None:
		n_mentions = len(document.mentions)
	top_k = math.ceil(round(top_k_ratio * n, 9))
	return PipelineStats(
		n_enumeration=n * (n + 1) // 2,
		n_span_len_capped=sum(min(span_len_cap, n - i) for i in range(n)),
		n_start_end=sum(n - start for start in starts),
		n_eos_regularized=sum(len(candidate_end_range(start, document.sentence_ends)) for start in starts),
		n_pairs_topk=math.comb(top_k, 2),
		n_pairs_pred_only=math.comb(n_mentions, 2),
	)
