# Copyright (c) 2025, Maverick Coref contributors
# For license information, please see license.txt

from maverick_coref.corpus.document import (
	CorefPrediction,
	Document,
	Span,
	corpus_summary,
	filter_singletons,
	insert_speakers,
	merge_segment_predictions,
	split_document,
	to_source_clusters,
)
from maverick_coref.corpus.vocab import Vocabulary

__all__ = [
	"CorefPrediction",
	"Document",
	"Span",
	"Vocabulary",
	"corpus_summary",
	"filter_singletons",
	"insert_speakers",
	"merge_segment_predictions",
	"split_document",
	"to_source_clusters",
]
