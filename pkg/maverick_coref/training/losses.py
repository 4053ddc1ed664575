# Copyright (c) 2025, Maverick Coref contributors
# For license information, please see license.txt

"""Binary cross-entropy terms of the coreference loss and their teacher-forced labels.

Every term is a summed BCE over probabilities clamped to [1e-7, 1 - 1e-7].
"""

from dataclasses import asdict, dataclass, field

import numpy as np

from maverick_coref.corpus.document import Document, Span
from maverick_coref.extractor import candidate_end_range
from maverick_coref.numcore.ops import bce_sum
from maverick_coref.numcore.tensor import Tensor


def loss_start(p_start: Tensor, labels) -> Tensor:
	return bce_sum(p_start, labels)


def loss_end(p_end: Tensor, labels) -> Tensor:
	"""Summed over every (gold start, candidate end) pair; 0 without gold starts."""
	return bce_sum(p_end, labels)


def loss_clust_ant(pair_probs: Tensor, labels) -> Tensor:
	"""Over ordered pairs (mention, earlier mention) of gold mentions."""
	return bce_sum(pair_probs, labels)


def loss_clust_incr(cluster_probs: Tensor, labels) -> Tensor:
	"""Over (mention, gold cluster already opened before it) pairs."""
	return bce_sum(cluster_probs, labels)


@dataclass
class LossBreakdown:
	l_start: float = 0.0
	l_end: float = 0.0
	l_clust: float = 0.0

	@property
	def l_total(self) -> float:
		return self.l_start + self.l_end + self.l_clust

	def __add__(self, other: "LossBreakdown") -> "LossBreakdown":
		return LossBreakdown(
			self.l_start + other.l_start, self.l_end + other.l_end, self.l_clust + other.l_clust
		)

	def to_dict(self) -> dict[str, float]:
		return {**asdict(self), "l_total": self.l_total}


@dataclass
class LabelSet:
	"""Gold targets of one document, derived only from its gold clusters."""

	start_labels: np.ndarray
	gold_starts: list[int]
	end_spans: list[Span]
	end_labels: np.ndarray
	mentions: list[Span]
	mention_cluster: list[int]
	# (mention, antecedent) index pairs with j < i, and whether they corefer
	ant_pairs: list[tuple[int, int]] = field(default_factory=list)
	ant_labels: np.ndarray = field(default_factory=lambda: np.zeros(0))


def build_labels(document: Document) -> LabelSet:
	n = document.n_tokens
	mentions = document.mentions
	gold_spans = set(mentions)
	gold_starts = sorted({span.start for span in mentions})

	start_labels = np.zeros(n)
	start_labels[gold_starts] = 1.0

	end_spans = [Span(s, e) for s in gold_starts for e in candidate_end_range(s, document.sentence_ends)]
	end_labels = np.array([1.0 if span in gold_spans else 0.0 for span in end_spans])

	cluster_of = document.cluster_of()
	mention_cluster = [cluster_of[span] for span in mentions]
	ant_pairs = [(i, j) for i in range(len(mentions)) for j in range(i)]
	ant_labels = np.array([1.0 if mention_cluster[i] == mention_cluster[j] else 0.0 for i, j in ant_pairs])

	return LabelSet(
		start_labels=start_labels,
		gold_starts=gold_starts,
		end_spans=end_spans,
		end_labels=end_labels,
		mentions=mentions,
		mention_cluster=mention_cluster,
		ant_pairs=ant_pairs,
		ant_labels=ant_labels,
	)


def incremental_targets(mention_cluster: list[int]) -> list[tuple[int, list[list[int]], list[float]]]:
	"""For each mention after the first: the gold clusters opened so far and the labels.

	Clusters are listed in creation order as lists of earlier mention indices.
	"""
	steps, opened = [], {}
	for i, cluster in enumerate(mention_cluster):
		if opened:
			members = list(opened.values())
			labels = [1.0 if key == cluster else 0.0 for key in opened]
			steps.append((i, [list(m) for m in members], labels))
		opened.setdefault(cluster, []).append(i)
	return steps
