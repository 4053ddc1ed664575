# Copyright (c) 2025, Maverick Coref contributors
# For license information, please see license.txt

"""Linguistic categories of mention pairs, used to route pairs to per-category scorers."""

import string
from enum import Enum
from functools import lru_cache
from typing import NamedTuple

from maverick_coref import hooks
from maverick_coref.exceptions import ParseError
from maverick_coref.utils import read_resource

UNKNOWN = "_"

STOPLIST = frozenset(
	{"a", "an", "the", "this", "that", "these", "those", "some", "any", "every", "each", "no"}
	| set(string.punctuation)
	| {"``", "''", "--", "..."}
)


class PairCategory(Enum):
	PRON_PRON_C = "PronPronC"
	PRON_PRON_NC = "PronPronNC"
	ENT_PRON = "EntPron"
	MATCH = "Match"
	CONTAINS = "Contains"
	OTHER = "Other"


class PronounAttributes(NamedTuple):
	person: str
	number: str
	gender: str

	def compatible(self, other: "PronounAttributes") -> bool:
		return all(a == b or UNKNOWN in (a, b) for a, b in zip(self, other))


def parse_lexicon(text: str) -> dict[str, PronounAttributes]:
	lexicon = {}
	for line_no, line in enumerate(text.splitlines(), start=1):
		if not line.strip() or line.startswith("#"):
			continue
		cells = line.rstrip("\n").split("\t")
		if len(cells) != 4:
			raise ParseError(f"expected 4 tab-separated cells, got {len(cells)}", line_no)
		lexicon.setdefault(cells[0].casefold(), PronounAttributes(*cells[1:]))
	return lexicon


@lru_cache(maxsize=1)
def pronoun_lexicon() -> dict[str, PronounAttributes]:
	return parse_lexicon(read_resource(hooks.pronoun_lexicon))


def pronoun_of(tokens: list[str]) -> PronounAttributes | None:
	"""Attributes when the mention is a single lexicon pronoun."""
	if len(tokens) != 1:
		return None
	return pronoun_lexicon().get(tokens[0].casefold())


def content_words(tokens: list[str]) -> list[str]:
	folded = [token.casefold() for token in tokens]
	words = [token for token in folded if token not in STOPLIST]
	return words or folded


def classify_pair_category(tokens_i: list[str], tokens_j: list[str]) -> PairCategory:
	pronoun_i, pronoun_j = pronoun_of(tokens_i), pronoun_of(tokens_j)
	if pronoun_i is not None and pronoun_j is not None:
		return PairCategory.PRON_PRON_C if pronoun_i.compatible(pronoun_j) else PairCategory.PRON_PRON_NC
	if pronoun_i is not None or pronoun_j is not None:
		return PairCategory.ENT_PRON

	words_i, words_j = content_words(tokens_i), content_words(tokens_j)
	if words_i == words_j:
		return PairCategory.MATCH
	set_i, set_j = set(words_i), set(words_j)
	if set_i <= set_j or set_j <= set_i:
		return PairCategory.CONTAINS
	return PairCategory.OTHER
