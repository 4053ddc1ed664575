# Copyright (c) 2025, Maverick Coref contributors
# For license information, please see license.txt

"""Seeded synthetic corpora for property tests, fixtures and overfit runs.

The licensed benchmark corpora are not shipped; these generators produce valid
documents with the same structure (sentence-split tokens, optional speakers,
clusters of within-sentence spans).
"""

import numpy as np

from maverick_coref.corpus.document import Document, Span

WORDS = [
	"apple", "river", "stone", "cloud", "paper", "light", "table", "music", "glass", "field",
	"house", "water", "green", "north", "chair", "plant", "storm", "brick", "sugar", "metal",
	"it", "they", "she", "he", "the", "a", "of", "and", ",", ".",
]  # fmt: skip
SPEAKERS = ["Anna", "Bob", "Carla", "Dev"]

NAMES = [
	"Alice", "Bruno", "Chen", "Dara", "Elena", "Farid", "Greta", "Hiro", "Ines", "Jonas",
	"Kemal", "Lena", "Marco", "Nadia", "Omar", "Paula", "Quinn", "Rosa", "Sami", "Tomas",
]  # fmt: skip
NOUNS = [
	"dog", "car", "boat", "lamp", "book", "train", "garden", "bridge", "letter", "horse",
	"piano", "tower", "kettle", "window", "forest", "camera",
]  # fmt: skip
FILLERS = ["walked", "saw", "found", "liked", "quietly", "today", "again", "near", "there", "then"]


def random_document(rng: np.random.Generator, doc_id: str, max_sentences: int = 5) -> Document:
	"""A random valid document; spans of one cluster never overlap each other."""
	n_sentences = int(rng.integers(1, max_sentences + 1))
	lengths = rng.integers(1, 13, size=n_sentences)
	tokens, sentence_ends = [], []
	for length in lengths:
		tokens.extend(str(w) for w in rng.choice(WORDS, size=int(length)))
		sentence_ends.append(len(tokens) - 1)

	speakers = None
	if rng.random() < 0.5:
		speakers = [str(s) for s in rng.choice(SPEAKERS, size=n_sentences)]

	starts = [0, *[end + 1 for end in sentence_ends[:-1]]]
	used: set[Span] = set()
	clusters = []
	for _ in range(int(rng.integers(0, 5))):
		cluster: list[Span] = []
		for _ in range(int(rng.integers(1, 5))):
			sentence = int(rng.integers(0, n_sentences))
			first, last = starts[sentence], sentence_ends[sentence]
			start = int(rng.integers(first, last + 1))
			end = int(rng.integers(start, min(last, start + 3) + 1))
			span = Span(start, end)
			if span in used or any(start <= other.end and other.start <= end for other in cluster):
				continue
			used.add(span)
			cluster.append(span)
		if cluster:
			clusters.append(sorted(cluster))

	return Document(doc_id, tokens, sentence_ends, speakers=speakers, gold_clusters=clusters).validate()


def random_corpus(n_docs: int, seed: int = 0) -> list[Document]:
	rng = np.random.default_rng(seed)
	return [random_document(rng, f"random_{index:04d}") for index in range(n_docs)]


def singleton_corpus(
	n_clusters: int = 100, singleton_ratio: float = 0.52, clusters_per_doc: int = 10, seed: int = 0
) -> list[Document]:
	"""A corpus where ``singleton_ratio`` of all clusters have a single mention."""
	rng = np.random.default_rng(seed)
	n_singletons = round(n_clusters * singleton_ratio)
	sizes = [1] * n_singletons + [int(s) for s in rng.integers(2, 4, size=n_clusters - n_singletons)]
	sizes = [sizes[i] for i in rng.permutation(n_clusters)]

	documents = []
	for number, offset in enumerate(range(0, n_clusters, clusters_per_doc)):
		doc_sizes = sizes[offset : offset + clusters_per_doc]
		owners = [cluster for cluster, size in enumerate(doc_sizes) for _ in range(size)]
		owners = [owners[i] for i in rng.permutation(len(owners))]

		tokens, sentence_ends = [], []
		clusters: list[list[Span]] = [[] for _ in doc_sizes]
		for owner in owners:
			sentence = [str(w) for w in rng.choice(WORDS[:20], size=3)]
			position = len(tokens) + int(rng.integers(0, 3))
			tokens.extend(sentence)
			sentence_ends.append(len(tokens) - 1)
			clusters[owner].append(Span(position, position))
		documents.append(
			Document(f"singletons_{number:04d}", tokens, sentence_ends, gold_clusters=clusters).validate()
		)
	return documents


def overfit_corpus(n_docs: int = 20, seed: int = 0) -> list[Document]:
	"""A small learnable corpus: mentions are names or "the <noun>", coreferent iff identical.

	Every sentence carries exactly one mention and every entity is mentioned at least
	twice, so the corpus has no singletons.
	"""
	rng = np.random.default_rng(seed)
	documents = []
	for number in range(n_docs):
		n_entities = int(rng.integers(2, 4))
		chosen_names = [str(n) for n in rng.choice(NAMES, size=n_entities, replace=False)]
		chosen_nouns = [str(n) for n in rng.choice(NOUNS, size=n_entities, replace=False)]
		entities = [
			[name] if rng.random() < 0.5 else ["the", noun] for name, noun in zip(chosen_names, chosen_nouns)
		]
		mentions = [entity for entity, count in enumerate(rng.integers(2, 4, size=n_entities)) for _ in range(count)]
		mentions = [mentions[i] for i in rng.permutation(len(mentions))]

		tokens, sentence_ends = [], []
		clusters: list[list[Span]] = [[] for _ in entities]
		for entity in mentions:
			tokens.extend(str(w) for w in rng.choice(FILLERS, size=int(rng.integers(0, 2))))
			start = len(tokens)
			tokens.extend(entities[entity])
			clusters[entity].append(Span(start, len(tokens) - 1))
			tokens.extend(str(w) for w in rng.choice(FILLERS, size=int(rng.integers(1, 3))))
			tokens.append(".")
			sentence_ends.append(len(tokens) - 1)

		documents.append(
			Document(f"overfit_{number:04d}", tokens, sentence_ends, gold_clusters=clusters).validate()
		)
	return documents


GENERATORS = {
	"random": lambda n_docs, seed: random_corpus(n_docs, seed),
	"overfit": lambda n_docs, seed: overfit_corpus(n_docs, seed),
	"singletons": lambda n_docs, seed: singleton_corpus(n_clusters=10 * n_docs, seed=seed),
}
