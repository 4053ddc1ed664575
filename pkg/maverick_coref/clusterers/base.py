# Copyright (c) 2025, Maverick Coref contributors
# For license information, please see license.txt

from abc import ABC, abstractmethod

import numpy as np

from maverick_coref.clusterers.decoding import PairProbMatrix, decode_antecedents
from maverick_coref.config import EncoderConfig, HeadConfig
from maverick_coref.corpus.document import Cluster, Document, Span
from maverick_coref.numcore.encoder import as_hidden
from maverick_coref.numcore.ops import sigmoid
from maverick_coref.numcore.params import ParamSpecs, bind
from maverick_coref.numcore.tensor import Tensor
from maverick_coref.training.losses import build_labels, loss_clust_ant


class BaseClusterer(ABC):
	"""Abstract base class for mention clustering heads."""

	kind: str = ""

	def __init__(self, encoder: EncoderConfig, heads: HeadConfig):
		self.encoder_config = encoder
		self.head_config = heads

	@abstractmethod
	def param_specs(self) -> ParamSpecs:
		"""Names and shapes of the head's parameters."""

	@abstractmethod
	def cluster(self, document: Document, hidden: Tensor, spans: list[Span], params, threshold: float) -> list[Cluster]:
		"""
		Group ``spans`` into clusters.

		Args:
		        document: The document the spans belong to (tokens are read by some heads)
		        hidden: Encoder output, shape [n_tokens, d_model]
		        spans: Mentions in (start, end) order
		        params: ModelParams or ParamTape

		Returns:
		        Clusters covering every input span exactly once, singletons included
		"""

	@abstractmethod
	def clustering_loss(self, document: Document, hidden: Tensor, params) -> Tensor:
		"""Teacher-forced clustering loss over the document's gold mentions."""


class AntecedentClusterer(BaseClusterer):
	"""Heads scoring every (mention, earlier mention) pair, decoded by best-antecedent linking."""

	@abstractmethod
	def pair_logits(self, document: Document, hidden: Tensor, spans: list[Span], tape) -> Tensor:
		"""Scores of shape [M, M]; entry (i, j) pairs mention i with candidate antecedent j."""

	def pair_probs(self, document: Document, hidden: Tensor, spans: list[Span], params) -> Tensor:
		return sigmoid(self.pair_logits(document, as_hidden(hidden), spans, bind(params)))

	def cluster(self, document, hidden, spans, params, threshold=0.5) -> list[Cluster]:
		if not spans:
			return []
		probs = self.pair_probs(document, hidden, spans, params).data
		groups = decode_antecedents(PairProbMatrix(probs), threshold)
		return [[spans[i] for i in group] for group in groups]

	def clustering_loss(self, document, hidden, params) -> Tensor:
		labels = build_labels(document)
		if not labels.ant_pairs:
			return Tensor(0.0)
		probs = self.pair_probs(document, hidden, labels.mentions, params)
		rows = np.array([i for i, _ in labels.ant_pairs])
		cols = np.array([j for _, j in labels.ant_pairs])
		return loss_clust_ant(probs[rows, cols], labels.ant_labels)
