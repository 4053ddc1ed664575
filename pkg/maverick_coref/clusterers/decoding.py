# Copyright (c) 2025, Maverick Coref contributors
# For license information, please see license.txt

from dataclasses import dataclass

import numpy as np

from maverick_coref.corpus.document import filter_singletons
from maverick_coref.exceptions import DimensionError


class UnionFind:
	"""Disjoint sets over 0..n-1 with union by rank and path compression."""

	def __init__(self, n: int):
		self.parent = list(range(n))
		self.rank = [0] * n

	def find(self, x: int) -> int:
		root = x
		while self.parent[root] != root:
			root = self.parent[root]
		while self.parent[x] != root:
			self.parent[x], x = root, self.parent[x]
		return root

	def union(self, a: int, b: int) -> int:
		root_a, root_b = self.find(a), self.find(b)
		if root_a == root_b:
			return root_a
		if self.rank[root_a] < self.rank[root_b]:
			root_a, root_b = root_b, root_a
		self.parent[root_b] = root_a
		if self.rank[root_a] == self.rank[root_b]:
			self.rank[root_a] += 1
		return root_a

	def groups(self) -> list[list[int]]:
		"""Members of every set, sets ordered by their smallest member."""
		by_root: dict[int, list[int]] = {}
		for x in range(len(self.parent)):
			by_root.setdefault(self.find(x), []).append(x)
		return list(by_root.values())


@dataclass
class PairProbMatrix:
	"""p(m_i, m_j) for mention i and earlier mention j; only entries with j < i are read."""

	probs: np.ndarray

	def __post_init__(self):
		self.probs = np.asarray(self.probs, dtype=np.float64)
		if self.probs.ndim != 2 or self.probs.shape[0] != self.probs.shape[1]:
			raise DimensionError(f"pair probabilities must be square, got {list(self.probs.shape)}")

	@classmethod
	def from_pairs(cls, n: int, pairs: dict[tuple[int, int], float]) -> "PairProbMatrix":
		probs = np.zeros((n, n))
		for (i, j), p in pairs.items():
			probs[i, j] = p
		return cls(probs)

	@property
	def n_mentions(self) -> int:
		return self.probs.shape[0]

	def antecedent_probs(self, i: int) -> np.ndarray:
		return self.probs[i, :i]


def decode_antecedents(matrix: PairProbMatrix, threshold: float = 0.5) -> list[list[int]]:
	"""Link each mention to its most probable antecedent above ``threshold`` and close transitively.

	Ties go to the nearest antecedent. Unlinked mentions come back as singletons.
	"""
	sets = UnionFind(matrix.n_mentions)
	for i in range(1, matrix.n_mentions):
		row = matrix.antecedent_probs(i)
		best = row.max()
		if best > threshold:
			j = int(np.flatnonzero(row == best)[-1])
			sets.union(i, j)
	return sets.groups()


def drop_singletons_if_configured(clusters: list, emit_singletons: bool) -> list:
	return list(clusters) if emit_singletons else filter_singletons(clusters)
