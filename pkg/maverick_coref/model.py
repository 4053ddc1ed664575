# Copyright (c) 2025, Maverick Coref contributors
# For license information, please see license.txt

import copy
import logging

from maverick_coref.clusterers.decoding import drop_singletons_if_configured
from maverick_coref.config import RunConfig
from maverick_coref.corpus.document import (
	CorefPrediction,
	Document,
	insert_speakers,
	merge_segment_predictions,
	split_document,
	to_source_clusters,
)
from maverick_coref.corpus.vocab import Vocabulary
from maverick_coref.exceptions import CheckpointError, DimensionError
from maverick_coref.extractor import (
	end_probs_for_starts,
	extract_mentions,
	extractor_param_specs,
	score_starts,
)
from maverick_coref.numcore.encoder import EncoderOutput, encode, encoder_param_specs
from maverick_coref.numcore.params import ModelParams, ParamSpecs, ParamTape, bind, init_params
from maverick_coref.numcore.tensor import Tensor
from maverick_coref.training.checkpoint import Checkpoint
from maverick_coref.training.losses import LossBreakdown, build_labels, loss_end, loss_start
from maverick_coref.utils import get_clusterer_class

logger = logging.getLogger(__name__)


class CorefModel:
	"""Encoder, mention extractor and one clustering head, assembled from a RunConfig."""

	def __init__(self, config: RunConfig, vocab: Vocabulary):
		self.config = copy.deepcopy(config)
		self.config.encoder.vocab = len(vocab)
		self.vocab = vocab
		self.clusterer = get_clusterer_class(self.config.clusterer)(self.config.encoder, self.config.heads)

	def param_specs(self) -> ParamSpecs:
		return {
			**encoder_param_specs(self.config.encoder),
			**extractor_param_specs(self.config.encoder, self.config.heads),
			**self.clusterer.param_specs(),
		}

	def init_params(self, seed: int | None = None) -> ModelParams:
		return init_params(self.param_specs(), self.config.train.seed if seed is None else seed)

	def prepare(self, document: Document) -> tuple[Document, list[Document]]:
		"""Speaker insertion (if configured), then sentence-safe segments fitting the encoder."""
		working = insert_speakers(document) if self.config.speaker_prefix else document
		return working, split_document(working, self.config.encoder.max_len)

	def encode_document(self, document: Document, params) -> EncoderOutput:
		return encode(self.vocab.encode(document.tokens), params, self.config.encoder)

	def compute_loss(self, document: Document, tape: ParamTape) -> tuple[LossBreakdown, Tensor]:
		"""Teacher-forced L_start + L_end + L_clust on one prepared segment."""
		hidden = self.encode_document(document, tape).hidden
		labels = build_labels(document)

		l_start = loss_start(score_starts(hidden, tape), labels.start_labels)
		p_end, _ = end_probs_for_starts(hidden, labels.gold_starts, document.sentence_ends, tape)
		l_end = loss_end(p_end, labels.end_labels)
		l_clust = self.clusterer.clustering_loss(document, hidden, tape)

		breakdown = LossBreakdown(l_start.item(), l_end.item(), l_clust.item())
		return breakdown, l_start + l_end + l_clust

	def predict(
		self,
		document: Document,
		params,
		threshold: float | None = None,
		gold_mentions: bool = False,
		emit_singletons: bool | None = None,
	) -> CorefPrediction:
		"""End-to-end clusters in the document's own coordinates.

		With ``gold_mentions`` the extraction step is skipped and the gold spans are clustered.
		"""
		threshold = self.config.threshold if threshold is None else threshold
		emit_singletons = self.config.emit_singletons if emit_singletons is None else emit_singletons
		tape = bind(params)

		working, segments = self.prepare(document)
		segment_clusters = []
		for segment in segments:
			hidden = self.encode_document(segment, tape).hidden
			if gold_mentions:
				spans = segment.mentions
			else:
				spans = [candidate.span for candidate in extract_mentions(segment, hidden, tape, threshold)]
			segment_clusters.append(self.clusterer.cluster(segment, hidden, spans, tape, threshold))

		clusters = merge_segment_predictions(working, segments, segment_clusters)
		clusters = to_source_clusters(working, clusters)
		clusters = drop_singletons_if_configured(clusters, emit_singletons)
		return CorefPrediction(document.doc_id, clusters, part=document.part)

	def predicted_starts(self, document: Document, params, threshold: float | None = None) -> tuple[list[int], int]:
		"""Starts above threshold and the number of extracted mentions, in document coordinates."""
		threshold = self.config.threshold if threshold is None else threshold
		tape = bind(params)
		working, segments = self.prepare(document)
		starts, n_mentions = [], 0
		for segment in segments:
			hidden = self.encode_document(segment, tape).hidden
			p_start = score_starts(hidden, tape).data
			for index, p in enumerate(p_start):
				if p > threshold and not segment.is_prefix_token(index):
					position = segment.offset - working.offset + index
					source = working.source_index[position] if working.source_index is not None else position
					starts.append(source)
			n_mentions += len(extract_mentions(segment, hidden, tape, threshold))
		return sorted(starts), n_mentions

	@classmethod
	def from_corpus(cls, config: RunConfig, documents: list[Document]) -> "CorefModel":
		"""Build the vocabulary from ``documents`` as the encoder will see them."""
		if config.speaker_prefix:
			documents = [insert_speakers(document) for document in documents]
		return cls(config, Vocabulary.build(documents))

	@classmethod
	def from_checkpoint(cls, checkpoint: Checkpoint, overrides: dict | None = None) -> tuple["CorefModel", ModelParams]:
		"""Rebuild the model stored in ``checkpoint`` and check its parameters against the config."""
		if not checkpoint.vocab:
			raise CheckpointError("checkpoint carries no vocabulary")
		values = {**checkpoint.config}
		values.update({key: value for key, value in (overrides or {}).items() if value is not None})
		model = cls(RunConfig.from_dict(values), Vocabulary(checkpoint.vocab))
		try:
			checkpoint.params.check_specs(model.param_specs())
		except DimensionError as e:
			raise CheckpointError(f"checkpoint does not match its config: {e}")
		return model, checkpoint.params

	def to_checkpoint(self, params: ModelParams) -> Checkpoint:
		return Checkpoint(params, self.config.to_dict(), self.vocab.to_list())
