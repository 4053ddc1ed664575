# Copyright (c) 2025, Maverick Coref contributors
# For license information, please see license.txt

from collections import Counter
from collections.abc import Iterable

from maverick_coref import hooks
from maverick_coref.exceptions import VocabError

UNK = "[UNK]"


class Vocabulary:
	"""Token to id map built from a training corpus. Id 0 is ``[UNK]``."""

	def __init__(self, tokens: Iterable[str]):
		self.tokens = list(tokens)
		if not self.tokens or self.tokens[0] != UNK:
			raise VocabError(f"vocabulary must start with {UNK}")
		self.index = {token: i for i, token in enumerate(self.tokens)}
		if len(self.index) != len(self.tokens):
			raise VocabError("vocabulary contains duplicate tokens")

	@classmethod
	def build(cls, documents, max_size: int | None = None) -> "Vocabulary":
		"""Order by descending frequency, then lexically; speaker prefix tokens are always present."""
		counts = Counter(token for doc in documents for token in doc.tokens)
		reserved = [UNK, hooks.speaker_token, hooks.speaker_separator]
		ranked = sorted((t for t in counts if t not in reserved), key=lambda t: (-counts[t], t))
		if max_size is not None:
			ranked = ranked[: max(0, max_size - len(reserved))]
		return cls(reserved + ranked)

	def __len__(self) -> int:
		return len(self.tokens)

	def __contains__(self, token: str) -> bool:
		return token in self.index

	def encode(self, tokens: Iterable[str]) -> list[int]:
		return [self.index.get(token, 0) for token in tokens]

	def to_list(self) -> list[str]:
		return list(self.tokens)
