# Copyright (c) 2025, Maverick Coref contributors
# For license information, please see license.txt

from collections import Counter

import pytest

from maverick_coref.corpus import (
	CorefPrediction,
	Document,
	Span,
	Vocabulary,
	corpus_summary,
	filter_singletons,
	insert_speakers,
	merge_segment_predictions,
	split_document,
	to_source_clusters,
)
from maverick_coref.corpus.readers import CoNLLReader, JSONLReader, parse_conll, parse_jsonl, write_conll, write_jsonl
from maverick_coref.corpus.synthetic import random_corpus, singleton_corpus
from maverick_coref.exceptions import (
	LengthError,
	ParseError,
	SerializationError,
	ValidationError,
	VocabError,
)
from maverick_coref.utils import get_reader_for_path


def conll_text(sentences, name="doc", speaker="-"):
	"""Build CoNLL-2012 text from sentences of (token, coref cell) pairs."""
	lines = [f"#begin document ({name}); part 000"]
	for sentence in sentences:
		for position, (token, coref) in enumerate(sentence):
			lines.append(f"{name}\t0\t{position}\t{token}\t-\t-\t-\t-\t-\t{speaker}\t*\t{coref}")
		lines.append("")
	lines.append("#end document")
	return "\n".join(lines) + "\n"


def essentials(document: Document):
	return (
		document.doc_id,
		document.part,
		document.tokens,
		document.sentence_ends,
		document.speakers,
		document.gold_clusters,
	)


def test_parse_conll_open_close():
	[document] = parse_conll(conll_text([[("the", "(0"), ("dog", "0)"), ("barked", "-")]]))
	assert document.tokens == ["the", "dog", "barked"]
	assert document.sentence_ends == [2]
	assert document.gold_clusters == [[Span(0, 1)]]
	assert document.speakers is None


def test_parse_conll_repeated_single_token_spans():
	text = conll_text([[("it", "(0)"), ("fell", "-")], [("it", "(0)"), ("broke", "-")]])
	[document] = parse_conll(text)
	assert document.gold_clusters == [[Span(0, 0), Span(2, 2)]]
	assert document.sentence_ends == [1, 3]


def test_parse_conll_nested_spans():
	text = conll_text([[("a", "(0|(1"), ("b", "0)"), ("c", "1)")]])
	[document] = parse_conll(text)
	assert document.gold_clusters == [[Span(0, 1)], [Span(0, 2)]]
	assert parse_conll(write_conll([document]))[0].gold_clusters == document.gold_clusters


def test_parse_conll_part_and_speakers():
	text = conll_text([[("hi", "-")]], speaker="Anna").replace("part 000", "part 002")
	[document] = parse_conll(text)
	assert document.part == 2
	assert document.key == ("doc", 2)
	assert document.speakers == ["Anna"]


def test_parse_conll_errors_carry_line_numbers():
	with pytest.raises(ParseError) as excinfo:
		parse_conll(conll_text([[("a", "-"), ("b", "0)")]]))
	assert excinfo.value.line == 3

	with pytest.raises(ParseError, match="never closed"):
		parse_conll(conll_text([[("a", "(0"), ("b", "-")]]))

	with pytest.raises(ParseError, match="malformed coreference"):
		parse_conll(conll_text([[("a", "(x)")]]))

	with pytest.raises(ParseError, match="not terminated"):
		parse_conll(conll_text([[("a", "-")]]).replace("#end document\n", ""))

	with pytest.raises(ParseError, match="outside of a document"):
		parse_conll("doc\t0\t0\tword\t-\t-\t-\t-\t-\t-\t*\t-\n")


def test_parse_conll_cross_sentence_span():
	with pytest.raises(ValidationError, match="crosses a sentence boundary"):
		parse_conll(conll_text([[("a", "(0")], [("b", "0)")]]))


def test_write_conll_empty_clusters():
	document = Document("d", ["x", "y"], [1])
	rows = [line for line in write_conll([document]).splitlines() if line and not line.startswith("#")]
	assert [row.split("\t")[-1] for row in rows] == ["-", "-"]


def test_write_conll_joins_cells():
	document = Document("d", ["a", "b", "c"], [2], gold_clusters=[[(0, 1)], [(0, 0)], [(0, 2)]])
	rows = [line for line in write_conll([document]).splitlines() if line and not line.startswith("#")]
	assert rows[0].split("\t")[-1] == "(1)|(0|(2"
	assert rows[1].split("\t")[-1] == "0)"
	assert rows[2].split("\t")[-1] == "2)"


def test_write_conll_errors():
	document = Document("d", ["a"], [0])
	with pytest.raises(SerializationError):
		write_conll([document], [CorefPrediction("d", [[(0, 3)]])])
	with pytest.raises(SerializationError):
		write_conll([document], [CorefPrediction("other")])


def test_write_conll_uses_predictions():
	document = Document("d", ["a", "b"], [1], gold_clusters=[[(0, 0), (1, 1)]])
	[parsed] = parse_conll(write_conll([document], [CorefPrediction("d", [[(1, 1)]])]))
	assert parsed.gold_clusters == [[Span(1, 1)]]


def test_write_conll_rejects_crossing_spans():
	document = Document("d", list("abcd"), [3], gold_clusters=[[(0, 2), (1, 3)]])
	with pytest.raises(SerializationError, match=r"spans \[0, 2\] and \[1, 3\] of cluster 0 cross"):
		write_conll([document])
	with pytest.raises(SerializationError, match="cross"):
		write_conll([Document("d", list("abcd"), [3])], [CorefPrediction("d", [[(1, 3), (0, 2)]])])

	# the same spans in different clusters pair up by cluster id
	separate = Document("d", list("abcd"), [3], gold_clusters=[[(0, 2)], [(1, 3)]])
	assert essentials(parse_conll(write_conll([separate]))[0]) == essentials(separate)
	# JSON lines keeps any clustering
	assert essentials(parse_jsonl(write_jsonl([document]))[0]) == essentials(document)


@pytest.mark.parametrize(
	"cluster",
	[
		[(0, 3), (1, 2)],
		[(0, 1), (1, 3)],
		[(0, 1), (0, 3)],
		[(0, 3), (2, 3), (3, 3)],
	],
)
def test_conll_round_trip_of_overlapping_spans(cluster):
	document = Document("d", list("abcd"), [3], gold_clusters=[cluster])
	[parsed] = parse_conll(write_conll([document]))
	assert essentials(parsed) == essentials(document)

def test_conll_round_trip_random_documents():
	documents = random_corpus(100, seed=11)
	text = write_conll(documents)
	parsed = parse_conll(text)
	assert [essentials(d) for d in parsed] == [essentials(d) for d in documents]
	assert write_conll(parsed) == text


def test_parse_jsonl_example():
	[document] = parse_jsonl('{"doc_id": "d", "sentences": [["a", "b"]], "clusters": [[[0, 0], [1, 1]]]}\n')
	assert document.sentence_ends == [1]
	assert document.gold_clusters == [[Span(0, 0), Span(1, 1)]]

	[empty] = parse_jsonl('{"doc_id": "e", "sentences": [["a"]], "clusters": []}')
	assert empty.gold_clusters == []


def test_parse_jsonl_errors_carry_line_numbers():
	good = '{"doc_id": "d", "sentences": [["a"]], "clusters": []}'
	with pytest.raises(ParseError) as excinfo:
		parse_jsonl(good + "\n{not json\n")
	assert excinfo.value.line == 2

	with pytest.raises(ParseError, match="missing keys: clusters"):
		parse_jsonl('{"doc_id": "d", "sentences": [["a"]]}')

	with pytest.raises(ParseError, match="clusters must be"):
		parse_jsonl('{"doc_id": "d", "sentences": [["a"]], "clusters": [[[0]]]}')

	with pytest.raises(ValidationError, match="line 1"):
		parse_jsonl('{"doc_id": "d", "sentences": [["a"], ["b"]], "clusters": [[[0, 1]]]}')

	for part in ('"abc"', "-1", "1.5", "true"):
		with pytest.raises(ParseError, match="line 1: part must be a non-negative integer"):
			parse_jsonl('{"doc_id": "d", "sentences": [["a"]], "clusters": [], "part": ' + part + "}")


def test_jsonl_round_trip_random_documents():
	documents = random_corpus(100, seed=12)
	text = write_jsonl(documents)
	parsed = parse_jsonl(text)
	assert [essentials(d) for d in parsed] == [essentials(d) for d in documents]
	assert write_jsonl(parsed) == text


def test_readers_by_extension(tmp_path):
	assert isinstance(get_reader_for_path("train.jsonl"), JSONLReader)
	assert isinstance(get_reader_for_path("dev.v4_gold_conll"), CoNLLReader)
	assert isinstance(get_reader_for_path("unknown.txt"), CoNLLReader)

	reader = JSONLReader()
	path = tmp_path / "corpus.jsonl"
	documents = random_corpus(3, seed=1)
	reader.write_path(path, documents)
	assert [essentials(d) for d in reader.read_path(path)] == [essentials(d) for d in documents]

	is_valid, message = reader.validate_file(b'{"doc_id": 1}')
	assert not is_valid
	assert "line 1" in message
	assert reader.validate_file(path.read_bytes()) == (True, "")


def test_preview_data():
	documents = random_corpus(4, seed=2)
	preview = CoNLLReader().get_preview_data(documents)
	assert preview["documents"] == 4
	assert len(preview["documents_preview"]) == 4
	assert preview["documents_preview"][0]["doc_id"] == documents[0].doc_id


def test_document_validation():
	with pytest.raises(ValidationError, match="last sentence"):
		Document("d", ["a", "b"], [0]).validate()
	with pytest.raises(ValidationError, match="strictly increasing"):
		Document("d", ["a", "b"], [1, 1]).validate()
	with pytest.raises(ValidationError, match="outside"):
		Document("d", ["a"], [0], gold_clusters=[[(0, 1)]]).validate()
	with pytest.raises(ValidationError, match="more than one place"):
		Document("d", ["a"], [0], gold_clusters=[[(0, 0)], [(0, 0)]]).validate()
	with pytest.raises(ValidationError, match="speakers"):
		Document("d", ["a"], [0], speakers=["A", "B"]).validate()
	# spans of different clusters may overlap
	Document("d", ["a", "b"], [1], gold_clusters=[[(0, 1)], [(1, 1)]]).validate()


def test_insert_speakers_same_speaker():
	document = Document("d", ["a", ".", "b", "."], [1, 3], speakers=["A", "A"], gold_clusters=[[(0, 0), (2, 2)]])
	working = insert_speakers(document)
	assert working.tokens == ["[SPK]", "A", ":", "a", ".", "b", "."]
	assert working.sentence_ends == [4, 6]
	assert working.gold_clusters == [[Span(3, 3), Span(5, 5)]]


def test_insert_speakers_on_change(dialogue_doc):
	working = insert_speakers(dialogue_doc)
	assert working.n_tokens == dialogue_doc.n_tokens + 9
	assert working.sentence_ends == [6, 13, 20]
	assert working.tokens[7:10] == ["[SPK]", "Bob", ":"]
	assert working.gold_clusters[0] == [Span(3, 3), Span(18, 18)]
	# sentence two shifts by both prefixes
	assert working.gold_clusters[1] == [Span(5, 5), Span(12, 12)]
	assert working.source_index[:4] == [None, None, None, 0]
	assert working.is_prefix_token(7) and not working.is_prefix_token(10)
	assert to_source_clusters(working, working.gold_clusters) == dialogue_doc.gold_clusters


def test_insert_speakers_without_speakers():
	document = Document("d", ["a"], [0])
	assert insert_speakers(document) is document


def spans_as_text(document: Document) -> Counter:
	return Counter(
		(index, tuple(document.tokens[start : end + 1]))
		for index, cluster in enumerate(document.gold_clusters)
		for start, end in cluster
	)


def test_insert_speakers_preserves_cluster_strings():
	for document in random_corpus(200, seed=5):
		working = insert_speakers(document)
		assert spans_as_text(working) == spans_as_text(document)
		working.validate()


def test_prefix_spans_are_dropped_when_mapping_back(dialogue_doc):
	working = insert_speakers(dialogue_doc)
	assert to_source_clusters(working, [[(1, 1), (3, 3)], [(7, 8)]]) == [[Span(0, 0)]]


def test_filter_singletons():
	assert filter_singletons([[Span(0, 0)]]) == []
	assert filter_singletons([[Span(0, 0), Span(2, 2)], [Span(5, 5)]]) == [[Span(0, 0), Span(2, 2)]]


def test_filter_singletons_on_singleton_rich_corpus():
	documents = singleton_corpus(n_clusters=100, singleton_ratio=0.52, seed=3)
	before = sum(len(d.gold_clusters) for d in documents)
	after = sum(len(filter_singletons(d.gold_clusters)) for d in documents)
	assert before == 100
	assert after == 48
	assert corpus_summary(documents)["singleton_pct"] == pytest.approx(52.0)


def test_split_and_merge(dialogue_doc):
	segments = split_document(dialogue_doc, max_len=8)
	assert [s.n_tokens for s in segments] == [8, 4]
	assert [s.offset for s in segments] == [0, 8]
	assert segments[1].sentence_ends == [3]
	assert segments[1].gold_clusters == [[Span(1, 1)]]
	assert segments[1].speakers == ["Anna"]

	merged = merge_segment_predictions(dialogue_doc, segments, [s.gold_clusters for s in segments])
	assert sorted(span for cluster in merged for span in cluster) == dialogue_doc.mentions
	# clusters of different segments stay apart
	assert len(merged) == len(dialogue_doc.gold_clusters) + 1

	assert split_document(dialogue_doc, max_len=64) == [dialogue_doc]
	with pytest.raises(LengthError):
		split_document(dialogue_doc, max_len=3)


def test_corpus_summary():
	documents = [
		Document("a", ["x", "y"], [1], gold_clusters=[[(0, 0)], [(1, 1)]]),
		Document("b", ["x", "y", "z", "w"], [3], gold_clusters=[[(0, 0), (2, 2)]]),
	]
	summary = corpus_summary(documents)
	assert summary["documents"] == 2
	assert summary["avg_tokens"] == 3.0
	assert summary["avg_mentions"] == 2.0
	assert summary["singleton_pct"] == pytest.approx(200 / 3)
	assert corpus_summary([])["avg_tokens"] == 0.0


def test_vocabulary():
	documents = [Document("d", ["b", "a", "b", "c", "a", "b"], [5])]
	vocab = Vocabulary.build(documents)
	assert vocab.to_list() == ["[UNK]", "[SPK]", ":", "b", "a", "c"]
	assert vocab.encode(["a", "zzz"]) == [4, 0]
	assert "c" in vocab and len(vocab) == 6
	assert Vocabulary.build(documents, max_size=4).to_list() == ["[UNK]", "[SPK]", ":", "b"]

	with pytest.raises(VocabError):
		Vocabulary(["a"])
	with pytest.raises(VocabError):
		Vocabulary(["[UNK]", "a", "a"])


def test_prediction_normalizes_clusters():
	prediction = CorefPrediction("d", [[(3, 3), (0, 1)], []])
	assert prediction.clusters == [[Span(0, 1), Span(3, 3)]]
	assert prediction.mentions == [Span(0, 1), Span(3, 3)]
	with pytest.raises(ValidationError):
		prediction.validate_for(Document("d", ["a", "b"], [1]))
