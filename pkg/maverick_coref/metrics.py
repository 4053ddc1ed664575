# Copyright (c) 2025, Maverick Coref contributors
# For license information, please see license.txt

"""Coreference metrics: MUC, B-cubed, CEAF-phi4, their CoNLL average, and mention F1.

Each metric is computed from (precision numerator, precision denominator, recall
numerator, recall denominator) counts. Corpus scores sum the counts over
documents before dividing, and 0/0 is 0.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from maverick_coref.corpus.document import filter_singletons
from maverick_coref.exceptions import ValidationError

logger = logging.getLogger(__name__)

DECIMALS = 6

Counts = tuple[float, float, float, float]


def _f1(p: float, r: float) -> float:
	return 2 * p * r / (p + r) if p + r else 0.0


def _ratio(num: float, den: float) -> float:
	return num / den if den else 0.0


@dataclass
class MetricScore:
	precision: float = 0.0
	recall: float = 0.0
	f1: float = 0.0

	@classmethod
	def from_counts(cls, counts: Counts) -> "MetricScore":
		p_num, p_den, r_num, r_den = (float(c) for c in counts)
		p, r = _ratio(p_num, p_den), _ratio(r_num, r_den)
		return cls(p, r, _f1(p, r))

	def to_dict(self) -> dict[str, float]:
		return {
			"p": round(self.precision, DECIMALS),
			"r": round(self.recall, DECIMALS),
			"f1": round(self.f1, DECIMALS),
		}


def _as_sets(clusters) -> list[frozenset]:
	return [frozenset(tuple(span) for span in cluster) for cluster in clusters if len(cluster)]


def _mention_map(clusters: list[frozenset]) -> dict:
	return {mention: index for index, cluster in enumerate(clusters) for mention in cluster}


def _vilain(keys: list[frozenset], responses: list[frozenset]) -> tuple[float, float]:
	"""Link-based numerator and denominator of MUC recall of ``responses`` against ``keys``."""
	response_of = _mention_map(responses)
	num = den = 0
	for cluster in keys:
		# mentions missing from the responses each form their own part
		parts = {response_of.get(mention, ("missing", mention)) for mention in cluster}
		num += len(cluster) - len(parts)
		den += len(cluster) - 1
	return num, den


def muc_counts(gold, pred) -> Counts:
	gold, pred = _as_sets(gold), _as_sets(pred)
	r_num, r_den = _vilain(gold, pred)
	p_num, p_den = _vilain(pred, gold)
	return p_num, p_den, r_num, r_den


def _b_cubed_side(keys: list[frozenset], responses: list[frozenset]) -> tuple[float, float]:
	response_of = _mention_map(responses)
	num = 0.0
	for cluster in keys:
		for mention in cluster:
			if mention in response_of:
				num += len(cluster & responses[response_of[mention]]) / len(cluster)
	return num, sum(len(cluster) for cluster in keys)


def b_cubed_counts(gold, pred) -> Counts:
	gold, pred = _as_sets(gold), _as_sets(pred)
	r_num, r_den = _b_cubed_side(gold, pred)
	p_num, p_den = _b_cubed_side(pred, gold)
	return p_num, p_den, r_num, r_den


def phi4_matrix(gold: list[frozenset], pred: list[frozenset]) -> np.ndarray:
	"""phi4(G, P) = 2|G & P| / (|G| + |P|) for every gold/predicted cluster pair."""
	similarity = np.zeros((len(gold), len(pred)))
	for i, g in enumerate(gold):
		for j, p in enumerate(pred):
			similarity[i, j] = 2 * len(g & p) / (len(g) + len(p))
	return similarity


def ceaf_alignment_value(similarity: np.ndarray) -> float:
	if similarity.size == 0:
		return 0.0
	rows, cols = linear_sum_assignment(similarity, maximize=True)
	return float(similarity[rows, cols].sum())


def ceaf_phi4_counts(gold, pred) -> Counts:
	gold, pred = _as_sets(gold), _as_sets(pred)
	value = ceaf_alignment_value(phi4_matrix(gold, pred))
	return value, len(pred), value, len(gold)


def mention_counts(gold_spans, pred_spans) -> Counts:
	gold_set = {tuple(span) for span in gold_spans}
	pred_set = {tuple(span) for span in pred_spans}
	hits = len(gold_set & pred_set)
	return hits, len(pred_set), hits, len(gold_set)


def muc(gold, pred) -> MetricScore:
	return MetricScore.from_counts(muc_counts(gold, pred))


def b_cubed(gold, pred) -> MetricScore:
	return MetricScore.from_counts(b_cubed_counts(gold, pred))


def ceaf_phi4(gold, pred) -> MetricScore:
	return MetricScore.from_counts(ceaf_phi4_counts(gold, pred))


def mention_f1(gold_spans, pred_spans) -> MetricScore:
	return MetricScore.from_counts(mention_counts(gold_spans, pred_spans))


def conll_avg(report) -> float:
	"""Mean of the MUC, B-cubed and CEAF-phi4 F1 scores; accepts a report or the three numbers."""
	if isinstance(report, MetricReport):
		f1s = (report.muc.f1, report.b3.f1, report.ceaf_phi4.f1)
	else:
		f1s = tuple(report)
	return sum(f1s) / 3


@dataclass
class MetricReport:
	muc: MetricScore = field(default_factory=MetricScore)
	b3: MetricScore = field(default_factory=MetricScore)
	ceaf_phi4: MetricScore = field(default_factory=MetricScore)
	mention: MetricScore = field(default_factory=MetricScore)

	@property
	def conll_f1(self) -> float:
		return conll_avg(self)

	def to_dict(self) -> dict:
		return {
			"muc": self.muc.to_dict(),
			"b3": self.b3.to_dict(),
			"ceaf_phi4": self.ceaf_phi4.to_dict(),
			"conll_f1": round(self.conll_f1, DECIMALS),
			"mention": self.mention.to_dict(),
		}


class CorpusScorer:
	"""Accumulates per-document counts for corpus-level scores."""

	METRICS = {
		"muc": muc_counts,
		"b3": b_cubed_counts,
		"ceaf_phi4": ceaf_phi4_counts,
	}

	def __init__(self):
		self.counts = {name: np.zeros(4) for name in [*self.METRICS, "mention"]}

	def add(self, gold_clusters, pred_clusters):
		for name, count_fn in self.METRICS.items():
			self.counts[name] += count_fn(gold_clusters, pred_clusters)
		gold_spans = [span for cluster in gold_clusters for span in cluster]
		pred_spans = [span for cluster in pred_clusters for span in cluster]
		self.counts["mention"] += mention_counts(gold_spans, pred_spans)

	def report(self) -> MetricReport:
		return MetricReport(**{name: MetricScore.from_counts(tuple(c)) for name, c in self.counts.items()})


def _clusters_of(item) -> list:
	return item.clusters if hasattr(item, "clusters") else item.gold_clusters


def evaluate_documents(documents, predictions, drop_singletons: bool = False) -> MetricReport:
	"""Score predictions (CorefPrediction or Document) against gold documents, matched by key.

	With ``drop_singletons`` one-mention clusters are removed from both sides before scoring.
	"""
	by_key = {item.key: item for item in predictions}
	gold_keys = {doc.key for doc in documents}
	missing = sorted(doc.doc_id for doc in documents if doc.key not in by_key)
	unexpected = sorted(item.doc_id for key, item in by_key.items() if key not in gold_keys)
	if missing or unexpected:
		raise ValidationError(
			f"documents do not align: missing predictions for {missing}, predictions without gold {unexpected}"
		)

	scorer = CorpusScorer()
	for doc in documents:
		gold, pred = doc.gold_clusters, _clusters_of(by_key[doc.key])
		if drop_singletons:
			gold, pred = filter_singletons(gold), filter_singletons(pred)
		scorer.add(gold, pred)
	report = scorer.report()
	logger.debug("evaluated %d documents: CoNLL-F1 %.4f", len(documents), report.conll_f1)
	return report


def evaluate_gold_mentions(documents, predictor, params, emit_singletons: bool = False) -> MetricReport:
	"""Cluster the gold mentions only (extraction skipped) and score the result."""
	predictions = [
		predictor.predict(doc, params, gold_mentions=True, emit_singletons=emit_singletons) for doc in documents
	]
	return evaluate_documents(documents, predictions, drop_singletons=not emit_singletons)
