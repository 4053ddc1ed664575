# Copyright (c) 2025, Maverick Coref contributors
# For license information, please see license.txt

import numpy as np

from maverick_coref.clusterers.base import AntecedentClusterer
from maverick_coref.corpus.document import Span
from maverick_coref.numcore.encoder import as_hidden
from maverick_coref.numcore.ops import ffn_project, sigmoid
from maverick_coref.numcore.params import ParamSpecs, bind
from maverick_coref.numcore.tensor import Tensor

BILINEAR = ("W_ss", "W_ee", "W_se", "W_es")


def projection_specs(prefix: str, d_model: int, d_hid: int, d_pair: int) -> ParamSpecs:
	return {
		f"{prefix}.start.W": (d_hid, d_model),
		f"{prefix}.start.W_prime": (d_pair, d_hid),
		f"{prefix}.end.W": (d_hid, d_model),
		f"{prefix}.end.W_prime": (d_pair, d_hid),
	}


def bilinear_specs(prefix: str, d_pair: int) -> ParamSpecs:
	return {f"{prefix}.{name}": (d_pair, d_pair) for name in BILINEAR}


def project_mentions(hidden: Tensor, spans: list[Span], tape, prefix: str) -> tuple[Tensor, Tensor]:
	"""F_s over the start tokens and F_e over the end tokens, each [M, d_pair]."""
	starts = hidden[np.array([span.start for span in spans])]
	ends = hidden[np.array([span.end for span in spans])]
	f_start = ffn_project(starts, tape[f"{prefix}.start.W"], tape[f"{prefix}.start.W_prime"])
	f_end = ffn_project(ends, tape[f"{prefix}.end.W"], tape[f"{prefix}.end.W_prime"])
	return f_start, f_end


def bilinear_scores(f_start: Tensor, f_end: Tensor, tape, prefix: str) -> Tensor:
	"""Fs W_ss Fs' + Fe W_ee Fe' + Fs W_se Fe' + Fe W_es Fs' for every (row, column) pair."""
	return (
		f_start @ tape[f"{prefix}.W_ss"] @ f_start.T
		+ f_end @ tape[f"{prefix}.W_ee"] @ f_end.T
		+ f_start @ tape[f"{prefix}.W_se"] @ f_end.T
		+ f_end @ tape[f"{prefix}.W_es"] @ f_start.T
	)


class S2EClusterer(AntecedentClusterer):
	"""Biaffine start-to-end mention-antecedent scorer."""

	kind = "s2e"
	prefix = "clusterer.s2e"

	def param_specs(self) -> ParamSpecs:
		d_pair = self.head_config.d_pair
		return {
			**projection_specs(self.prefix, self.encoder_config.d_model, self.head_config.d_hid, d_pair),
			**bilinear_specs(self.prefix, d_pair),
		}

	def pair_logits(self, document, hidden, spans, tape) -> Tensor:
		f_start, f_end = project_mentions(hidden, spans, tape, self.prefix)
		return bilinear_scores(f_start, f_end, tape, self.prefix)


def s2e_pair_prob(m_i: Span, m_j: Span, hidden: Tensor, params, prefix: str = S2EClusterer.prefix) -> float:
	"""p_c(m_i, m_j) for a mention and its candidate antecedent."""
	tape = bind(params)
	f_start, f_end = project_mentions(as_hidden(hidden), [Span(*m_i), Span(*m_j)], tape, prefix)
	return sigmoid(bilinear_scores(f_start, f_end, tape, prefix)[0, 1]).item()
