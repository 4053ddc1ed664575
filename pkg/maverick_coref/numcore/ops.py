# Copyright (c) 2025, Maverick Coref contributors
# For license information, please see license.txt

import math

import numpy as np
from scipy.special import erf

from maverick_coref.exceptions import DimensionError
from maverick_coref.numcore.tensor import Tensor, as_tensor, concat, matmul, stack

__all__ = [
	"bce_sum",
	"concat",
	"ffn_project",
	"gelu",
	"layer_norm",
	"linear",
	"log",
	"relu",
	"sigmoid",
	"sinusoidal_positions",
	"softmax",
	"stack",
]

PROB_EPS = 1e-7
_INV_SQRT2 = 1.0 / math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def gelu(x) -> Tensor:
	"""Exact GeLU: x * Phi(x) with the Gaussian CDF."""
	x = as_tensor(x)
	a = x.data
	cdf = 0.5 * (1.0 + erf(a * _INV_SQRT2))
	pdf = _INV_SQRT_2PI * np.exp(-0.5 * a * a)
	return Tensor(a * cdf, _parents=(x,), _backward=lambda g: (g * (cdf + a * pdf),))


def sigmoid(x) -> Tensor:
	x = as_tensor(x)
	a = x.data
	# exp of a non-positive argument only
	e = np.exp(-np.abs(a))
	out = np.where(a >= 0, 1.0 / (1.0 + e), e / (1.0 + e))
	return Tensor(out, _parents=(x,), _backward=lambda g: (g * out * (1.0 - out),))


def relu(x) -> Tensor:
	x = as_tensor(x)
	mask = x.data > 0
	return Tensor(x.data * mask, _parents=(x,), _backward=lambda g: (g * mask,))


def log(x) -> Tensor:
	x = as_tensor(x)
	a = x.data
	return Tensor(np.log(a), _parents=(x,), _backward=lambda g: (g / a,))


def clip(x, low: float, high: float) -> Tensor:
	x = as_tensor(x)
	inside = (x.data >= low) & (x.data <= high)
	return Tensor(np.clip(x.data, low, high), _parents=(x,), _backward=lambda g: (g * inside,))


def softmax(x, axis: int = -1) -> Tensor:
	x = as_tensor(x)
	shifted = x.data - x.data.max(axis=axis, keepdims=True)
	exps = np.exp(shifted)
	out = exps / exps.sum(axis=axis, keepdims=True)

	def backward(g):
		return (out * (g - (g * out).sum(axis=axis, keepdims=True)),)

	return Tensor(out, _parents=(x,), _backward=backward)


def layer_norm(x, gamma, beta, eps: float = 1e-5) -> Tensor:
	x = as_tensor(x)
	mean = x.mean(axis=-1, keepdims=True)
	centered = x - mean
	variance = (centered * centered).mean(axis=-1, keepdims=True)
	return centered * ((variance + eps) ** -0.5) * gamma + beta


def linear(x, W) -> Tensor:
	"""Bias-free projection ``x W^T`` over the last axis; ``W`` is [d_out, d_in]."""
	x, W = as_tensor(x), as_tensor(W)
	if W.ndim != 2 or x.shape[-1] != W.shape[1]:
		raise DimensionError(f"cannot project dims {x.dims} with weight dims {W.dims}")
	return matmul(x, W.T)


def ffn_project(x, W, W_prime) -> Tensor:
	"""W' GeLU(W x), applied to a vector or to every row of a matrix."""
	W, W_prime = as_tensor(W), as_tensor(W_prime)
	if W_prime.ndim != 2 or W.ndim != 2 or W_prime.shape[1] != W.shape[0]:
		raise DimensionError(f"weights do not chain: {W.dims} then {W_prime.dims}")
	return linear(gelu(linear(x, W)), W_prime)


def bce_sum(p, labels) -> Tensor:
	"""Summed binary cross-entropy with probabilities clamped to [1e-7, 1 - 1e-7]."""
	p = as_tensor(p)
	y = np.asarray(labels, dtype=np.float64)
	if p.shape != y.shape:
		raise DimensionError(f"probabilities {p.dims} and labels {list(y.shape)} differ in length")
	if y.size == 0:
		return Tensor(0.0)

	p = clip(p, PROB_EPS, 1.0 - PROB_EPS)
	terms = -(log(p) * y + log(1.0 - p) * (1.0 - y))
	return terms.sum()


def sinusoidal_positions(n: int, d: int) -> np.ndarray:
	positions = np.arange(n, dtype=np.float64)[:, None]
	rates = np.exp(-math.log(10000.0) * (2 * (np.arange(d) // 2)) / d)
	angles = positions * rates[None, :]
	table = np.zeros((n, d))
	table[:, 0::2] = np.sin(angles[:, 0::2])
	table[:, 1::2] = np.cos(angles[:, 1::2])
	return table
