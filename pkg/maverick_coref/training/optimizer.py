# Copyright (c) 2025, Maverick Coref contributors
# For license information, please see license.txt

import math

import numpy as np

from maverick_coref.numcore.params import ModelParams

ENCODER_PREFIX = "encoder."


class LinearWarmupDecay:
	"""Learning-rate factor rising linearly over the warmup steps, then decaying linearly to zero."""

	def __init__(self, total_steps: int, warmup_fraction: float = 0.1):
		self.total_steps = max(1, total_steps)
		self.warmup_steps = int(round(self.total_steps * warmup_fraction))

	def factor(self, step: int) -> float:
		"""Factor for the update with 0-based index ``step``."""
		if step < self.warmup_steps:
			return (step + 1) / self.warmup_steps
		remaining = self.total_steps - self.warmup_steps
		return max(0.0, (self.total_steps - step) / remaining) if remaining else 1.0


def clip_grad_norm(grads: dict[str, np.ndarray], max_norm: float) -> tuple[dict[str, np.ndarray], float]:
	"""Rescale all gradients together so that their global L2 norm is at most ``max_norm``."""
	norm = math.sqrt(sum(float(np.sum(g * g)) for g in grads.values()))
	if norm <= max_norm or norm == 0.0:
		return grads, norm
	scale = max_norm / norm
	return {name: g * scale for name, g in grads.items()}, norm


class Adam:
	"""Adaptive-moment optimizer with one learning rate for the encoder and one for the heads."""

	def __init__(
		self,
		lr_heads: float,
		lr_encoder: float,
		beta1: float = 0.9,
		beta2: float = 0.999,
		eps: float = 1e-8,
		schedule: LinearWarmupDecay | None = None,
	):
		self.lr_heads = lr_heads
		self.lr_encoder = lr_encoder
		self.beta1 = beta1
		self.beta2 = beta2
		self.eps = eps
		self.schedule = schedule
		self.t = 0
		self.m: dict[str, np.ndarray] = {}
		self.v: dict[str, np.ndarray] = {}

	@classmethod
	def from_config(cls, train_config, total_steps: int) -> "Adam":
		return cls(
			lr_heads=train_config.lr_heads,
			lr_encoder=train_config.lr_encoder,
			beta1=train_config.beta1,
			beta2=train_config.beta2,
			eps=train_config.adam_eps,
			schedule=LinearWarmupDecay(total_steps, train_config.warmup_fraction),
		)

	def learning_rate(self, name: str) -> float:
		return self.lr_encoder if name.startswith(ENCODER_PREFIX) else self.lr_heads

	def step(self, params: ModelParams, grads: dict[str, np.ndarray]) -> ModelParams:
		factor = self.schedule.factor(self.t) if self.schedule is not None else 1.0
		self.t += 1
		bias1 = 1.0 - self.beta1**self.t
		bias2 = 1.0 - self.beta2**self.t

		updated = {}
		for name in params.names():
			grad = np.asarray(grads[name], dtype=np.float64)
			m = self.m.get(name, 0.0) * self.beta1 + (1.0 - self.beta1) * grad
			v = self.v.get(name, 0.0) * self.beta2 + (1.0 - self.beta2) * grad * grad
			self.m[name], self.v[name] = m, v

			value = params[name].astype(np.float64)
			value -= self.learning_rate(name) * factor * (m / bias1) / (np.sqrt(v / bias2) + self.eps)
			updated[name] = value.astype(params[name].dtype)
		return ModelParams(updated, params.rng_seed)
