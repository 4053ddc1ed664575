# Copyright (c) 2025, Maverick Coref contributors
# For license information, please see license.txt

"""Incremental clustering: each mention joins its most probable existing cluster or opens a new one.

A cluster is scored by a one-layer transformer over [CLS, h_i, h_f, ..., h_g],
where h_f..h_g are the retained representations of the cluster's mentions.
"""

from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from maverick_coref.clusterers.base import BaseClusterer
from maverick_coref.corpus.document import Cluster, Span
from maverick_coref.numcore.encoder import as_hidden, layer_param_specs, transformer_layer
from maverick_coref.numcore.ops import concat, ffn_project, linear, relu, sigmoid, sinusoidal_positions, stack
from maverick_coref.numcore.params import ParamSpecs, bind
from maverick_coref.numcore.tensor import Tensor
from maverick_coref.training.losses import build_labels, incremental_targets, loss_clust_incr

PREFIX = "clusterer.incr"

Scorer = Callable[[Tensor, list[Tensor]], float]


@dataclass
class ClusterState:
	"""Clusters in creation order, each a list of mention indices, plus every mention's representation."""

	clusters: list[list[int]] = field(default_factory=list)
	reprs: dict[int, Tensor] = field(default_factory=dict)

	def cluster_reprs(self, index: int) -> list[Tensor]:
		return [self.reprs[m] for m in self.clusters[index]]

	def with_new_cluster(self, mention: int, h: Tensor) -> "ClusterState":
		return ClusterState([*[list(c) for c in self.clusters], [mention]], {**self.reprs, mention: h})

	def with_member(self, index: int, mention: int, h: Tensor) -> "ClusterState":
		clusters = [list(c) for c in self.clusters]
		clusters[index].append(mention)
		return ClusterState(clusters, {**self.reprs, mention: h})


def mention_reprs(hidden, spans: list[Span], params) -> Tensor:
	"""h for every span: F([x_start, x_end]), shape [M, d_pair]."""
	x = as_hidden(hidden)
	tape = bind(params)
	starts = x[np.array([span.start for span in spans])]
	ends = x[np.array([span.end for span in spans])]
	return ffn_project(concat([starts, ends], axis=1), tape[f"{PREFIX}.repr.W"], tape[f"{PREFIX}.repr.W_prime"])


def mention_repr(hidden, span: Span, params) -> Tensor:
	return mention_reprs(hidden, [Span(*span)], params)[0]


def cluster_sequence(h_i: Tensor, cluster_reprs: list[Tensor], params) -> Tensor:
	"""[CLS, h_i, h_f, ..., h_g] with sinusoidal positions added."""
	tape = bind(params)
	sequence = stack([tape[f"{PREFIX}.cls"], h_i, *cluster_reprs])
	return sequence + sinusoidal_positions(*sequence.shape)


def incr_cluster_score(h_i: Tensor, cluster_reprs: list[Tensor], params, n_heads: int = 1) -> Tensor:
	"""p(m_i in c_j) = sigmoid(W_c ReLU(T(...)[CLS]))."""
	tape = bind(params)
	out = transformer_layer(cluster_sequence(h_i, cluster_reprs, tape), tape, f"{PREFIX}.T", n_heads)
	score = linear(relu(out[0]), tape[f"{PREFIX}.W_c"])
	return sigmoid(score).reshape(())


def incr_assign(
	i: int,
	h_i: Tensor,
	state: ClusterState,
	params=None,
	threshold: float = 0.5,
	scorer: Scorer | None = None,
	n_heads: int = 1,
) -> ClusterState:
	"""Append mention ``i`` to the most probable cluster if its probability exceeds ``threshold``.

	Otherwise open a new cluster. Ties go to the earliest-created cluster.
	"""
	if not state.clusters:
		return state.with_new_cluster(i, h_i)

	if scorer is None:

		def scorer(h, reprs):
			return incr_cluster_score(h, reprs, params, n_heads).item()

	probs = [scorer(h_i, state.cluster_reprs(index)) for index in range(len(state.clusters))]
	best = max(probs)
	if best > threshold:
		return state.with_member(probs.index(best), i, h_i)
	return state.with_new_cluster(i, h_i)


class IncrementalClusterer(BaseClusterer):
	kind = "incr"

	@property
	def n_heads(self) -> int:
		return self.head_config.incr_heads

	def param_specs(self) -> ParamSpecs:
		d_model, d_hid, d_pair = self.encoder_config.d_model, self.head_config.d_hid, self.head_config.d_pair
		return {
			f"{PREFIX}.repr.W": (d_hid, 2 * d_model),
			f"{PREFIX}.repr.W_prime": (d_pair, d_hid),
			f"{PREFIX}.cls": (d_pair,),
			**layer_param_specs(f"{PREFIX}.T", d_pair, d_hid),
			f"{PREFIX}.W_c": (1, d_pair),
		}

	def cluster(self, document, hidden, spans, params, threshold=0.5) -> list[Cluster]:
		if not spans:
			return []
		tape = bind(params)
		h = mention_reprs(hidden, spans, tape)
		state = ClusterState()
		for i in range(len(spans)):
			state = incr_assign(i, h[i], state, tape, threshold, n_heads=self.n_heads)
		return [[spans[i] for i in cluster] for cluster in state.clusters]

	def clustering_loss(self, document, hidden, params) -> Tensor:
		"""Each gold mention is scored against the gold clusters opened before it."""
		labels = build_labels(document)
		steps = incremental_targets(labels.mention_cluster)
		if not steps:
			return Tensor(0.0)

		tape = bind(params)
		h = mention_reprs(hidden, labels.mentions, tape)
		probs, targets = [], []
		for i, clusters, step_labels in steps:
			for members, label in zip(clusters, step_labels):
				probs.append(incr_cluster_score(h[i], [h[m] for m in members], tape, self.n_heads))
				targets.append(label)
		return loss_clust_incr(stack(probs), targets)
