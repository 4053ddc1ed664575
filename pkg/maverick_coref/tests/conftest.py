# Copyright (c) 2025, Maverick Coref contributors
# For license information, please see license.txt

import pytest

from maverick_coref.config import RunConfig
from maverick_coref.corpus.document import Document
from maverick_coref.corpus.vocab import Vocabulary
from maverick_coref.model import CorefModel

TINY = {
	"d_model": 16,
	"layers": 1,
	"heads": 2,
	"d_ff": 32,
	"d_hid": 8,
	"d_pair": 8,
	"max_len": 64,
}


def tiny_config(**overrides) -> RunConfig:
	return RunConfig.from_dict({**TINY, **overrides})


@pytest.fixture
def six_token_doc() -> Document:
	# "Barack Obama" / "he" corefer, "him" stands alone
	return Document(
		doc_id="six",
		tokens=["Barack", "Obama", "saw", "him", "he", "smiled"],
		sentence_ends=[3, 5],
		gold_clusters=[[(0, 1), (4, 4)], [(3, 3)]],
	).validate()


@pytest.fixture
def dialogue_doc() -> Document:
	return Document(
		doc_id="dialogue",
		tokens=["I", "like", "tea", ".", "You", "like", "it", ".", "Yes", "I", "do", "."],
		sentence_ends=[3, 7, 11],
		speakers=["Anna", "Bob", "Anna"],
		gold_clusters=[[(0, 0), (9, 9)], [(2, 2), (6, 6)], [(4, 4)]],
	).validate()


@pytest.fixture(params=["s2e", "mes", "incr"])
def clusterer_kind(request) -> str:
	return request.param


def make_model(documents, clusterer: str = "s2e", **overrides) -> CorefModel:
	config = tiny_config(clusterer=clusterer, **overrides)
	return CorefModel(config, Vocabulary.build(documents))
