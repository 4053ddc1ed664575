# Copyright (c) 2025, Maverick Coref contributors
# For license information, please see license.txt

import numpy as np

from maverick_coref.clusterers.base import AntecedentClusterer
from maverick_coref.clusterers.categories import PairCategory, classify_pair_category
from maverick_coref.clusterers.s2e import bilinear_scores, bilinear_specs, project_mentions, projection_specs
from maverick_coref.corpus.document import Span
from maverick_coref.numcore.encoder import as_hidden
from maverick_coref.numcore.ops import sigmoid
from maverick_coref.numcore.params import ParamSpecs, bind
from maverick_coref.numcore.tensor import Tensor


def category_prefix(prefix: str, category: PairCategory) -> str:
	return f"{prefix}.{category.value}"


def category_matrix(tokens: list[str], spans: list[Span]) -> list[list[PairCategory | None]]:
	"""Category of every (mention, earlier mention) pair; None on and above the diagonal."""
	words = [tokens[span.start : span.end + 1] for span in spans]
	return [
		[classify_pair_category(words[i], words[j]) if j < i else None for j in range(len(spans))]
		for i in range(len(spans))
	]


class MultiExpertClusterer(AntecedentClusterer):
	"""Mention-antecedent scorer with one start/end projection pair per pair category.

	The four bilinear matrices are shared by all categories.
	"""

	kind = "mes"
	prefix = "clusterer.mes"

	def param_specs(self) -> ParamSpecs:
		d_model, d_hid, d_pair = self.encoder_config.d_model, self.head_config.d_hid, self.head_config.d_pair
		specs = bilinear_specs(self.prefix, d_pair)
		for category in PairCategory:
			specs.update(projection_specs(category_prefix(self.prefix, category), d_model, d_hid, d_pair))
		return specs

	def pair_logits(self, document, hidden, spans, tape) -> Tensor:
		categories = category_matrix(document.tokens, spans)
		n = len(spans)
		logits = Tensor(np.zeros((n, n)))
		for category in PairCategory:
			mask = np.array([[cell is category for cell in row] for row in categories], dtype=np.float64)
			if not mask.any():
				continue
			f_start, f_end = project_mentions(hidden, spans, tape, category_prefix(self.prefix, category))
			logits = logits + bilinear_scores(f_start, f_end, tape, self.prefix) * mask
		return logits


def mes_pair_prob(
	m_i: Span, m_j: Span, hidden, params, tokens: list[str], prefix: str = MultiExpertClusterer.prefix
) -> float:
	"""p_c(m_i, m_j) with the projections of the pair's category."""
	tape = bind(params)
	m_i, m_j = Span(*m_i), Span(*m_j)
	category = classify_pair_category(tokens[m_i.start : m_i.end + 1], tokens[m_j.start : m_j.end + 1])
	f_start, f_end = project_mentions(as_hidden(hidden), [m_i, m_j], tape, category_prefix(prefix, category))
	return sigmoid(bilinear_scores(f_start, f_end, tape, prefix)[0, 1]).item()
