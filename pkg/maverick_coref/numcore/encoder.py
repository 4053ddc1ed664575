# Copyright (c) 2025, Maverick Coref contributors
# For license information, please see license.txt

"""Small pre-LN transformer encoder standing in for a pretrained document encoder."""

import math
from dataclasses import dataclass

import numpy as np

from maverick_coref.config import EncoderConfig
from maverick_coref.exceptions import LengthError, VocabError
from maverick_coref.numcore.ops import ffn_project, layer_norm, linear, sinusoidal_positions, softmax
from maverick_coref.numcore.params import ParamSpecs, bind
from maverick_coref.numcore.tensor import Tensor


@dataclass
class EncoderOutput:
	hidden: Tensor

	@property
	def n_tokens(self) -> int:
		return self.hidden.shape[0]

	@property
	def d_model(self) -> int:
		return self.hidden.shape[1]


def as_hidden(hidden) -> Tensor:
	"""Accept an EncoderOutput or its hidden-state tensor."""
	return hidden.hidden if isinstance(hidden, EncoderOutput) else hidden


def layer_param_specs(prefix: str, d_model: int, d_ff: int) -> ParamSpecs:
	return {
		f"{prefix}.ln1.gamma": (d_model,),
		f"{prefix}.ln1.beta": (d_model,),
		f"{prefix}.attn.W_q": (d_model, d_model),
		f"{prefix}.attn.W_k": (d_model, d_model),
		f"{prefix}.attn.W_v": (d_model, d_model),
		f"{prefix}.attn.W_o": (d_model, d_model),
		f"{prefix}.ln2.gamma": (d_model,),
		f"{prefix}.ln2.beta": (d_model,),
		f"{prefix}.ffn.W": (d_ff, d_model),
		f"{prefix}.ffn.W_prime": (d_model, d_ff),
	}


def encoder_param_specs(config: EncoderConfig) -> ParamSpecs:
	d = config.d_model
	specs = {"encoder.embed": (config.vocab, d)}
	for index in range(config.layers):
		specs.update(layer_param_specs(f"encoder.layer{index}", d, config.d_ff))
	specs["encoder.ln_f.gamma"] = (d,)
	specs["encoder.ln_f.beta"] = (d,)
	return specs


def self_attention(x: Tensor, tape, prefix: str, n_heads: int) -> Tensor:
	n, d = x.shape
	d_head = d // n_heads

	def split(t: Tensor) -> Tensor:
		return t.reshape(n, n_heads, d_head).transpose(1, 0, 2)

	q = split(linear(x, tape[f"{prefix}.W_q"]))
	k = split(linear(x, tape[f"{prefix}.W_k"]))
	v = split(linear(x, tape[f"{prefix}.W_v"]))

	weights = softmax((q @ k.transpose(0, 2, 1)) * (1.0 / math.sqrt(d_head)), axis=-1)
	context = (weights @ v).transpose(1, 0, 2).reshape(n, d)
	return linear(context, tape[f"{prefix}.W_o"])


def transformer_layer(x: Tensor, tape, prefix: str, n_heads: int) -> Tensor:
	"""One pre-LN block: x + MHA(LN(x)), then + FFN(LN(.)). No bias terms."""
	h = layer_norm(x, tape[f"{prefix}.ln1.gamma"], tape[f"{prefix}.ln1.beta"])
	x = x + self_attention(h, tape, f"{prefix}.attn", n_heads)
	h = layer_norm(x, tape[f"{prefix}.ln2.gamma"], tape[f"{prefix}.ln2.beta"])
	return x + ffn_project(h, tape[f"{prefix}.ffn.W"], tape[f"{prefix}.ffn.W_prime"])


def encode(tokens, params, config: EncoderConfig) -> EncoderOutput:
	"""Encode a sequence of token ids into hidden states of shape [n, d_model]."""
	tape = bind(params)
	ids = np.asarray(tokens, dtype=np.int64).reshape(-1)
	n = len(ids)
	if n > config.max_len:
		raise LengthError(f"sequence of {n} tokens exceeds max_len {config.max_len}")

	embed = tape["encoder.embed"]
	vocab_size = embed.shape[0]
	if n and (ids.min() < 0 or ids.max() >= vocab_size):
		bad = sorted({int(i) for i in ids if i < 0 or i >= vocab_size})
		raise VocabError(f"token ids {bad} outside vocabulary of size {vocab_size}")

	if n == 0:
		return EncoderOutput(Tensor(np.zeros((0, config.d_model))))

	x = embed[ids] + sinusoidal_positions(n, config.d_model)
	for index in range(config.layers):
		x = transformer_layer(x, tape, f"encoder.layer{index}", config.heads)
	x = layer_norm(x, tape["encoder.ln_f.gamma"], tape["encoder.ln_f.beta"])
	return EncoderOutput(x)
