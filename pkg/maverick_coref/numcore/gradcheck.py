# Copyright (c) 2025, Maverick Coref contributors
# For license information, please see license.txt

import logging
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from maverick_coref.numcore.params import ModelParams, ParamTape
from maverick_coref.numcore.tensor import Tensor

logger = logging.getLogger(__name__)

LossFn = Callable[[ParamTape], Tensor]


def backward(loss: Tensor, tape: ParamTape) -> dict[str, np.ndarray]:
	"""Run reverse mode from a scalar ``loss`` and return one gradient per parameter.

	Parameters the loss never touched get a zero gradient of matching shape.
	"""
	loss.backward()
	return tape.gradients()


@dataclass
class GradCheckReport:
	tolerance: float
	errors: dict[str, float] = field(default_factory=dict)

	@property
	def failures(self) -> dict[str, float]:
		return {name: error for name, error in self.errors.items() if error > self.tolerance}

	@property
	def passed(self) -> bool:
		return not self.failures

	@property
	def max_error(self) -> float:
		return max(self.errors.values(), default=0.0)


def analytic_gradients(loss_fn: LossFn, params: ModelParams) -> dict[str, np.ndarray]:
	tape = ParamTape(params)
	return backward(loss_fn(tape), tape)


def finite_diff_check(
	loss_fn: LossFn,
	params: ModelParams,
	epsilon: float = 1e-3,
	tolerance: float = 1e-3,
	floor: float = 1e-3,
	analytic: dict[str, np.ndarray] | None = None,
	max_entries: int | None = None,
	seed: int = 0,
) -> GradCheckReport:
	"""Compare analytic gradients against central differences, per parameter.

	The relative error of one entry is |a - n| / max(|a|, |n|, floor); the report
	keeps the maximum per parameter. ``analytic`` overrides the backward pass.
	``max_entries`` samples that many entries per parameter instead of all of them.
	"""
	params = params.astype(np.float64)
	if analytic is None:
		analytic = analytic_gradients(loss_fn, params)

	def evaluate(tensors: dict[str, np.ndarray]) -> float:
		return loss_fn(ParamTape(ModelParams(tensors, params.rng_seed), requires_grad=False)).item()

	rng = np.random.default_rng(seed)
	report = GradCheckReport(tolerance)
	for name in params.names():
		base = params[name]
		indices = np.arange(base.size)
		if max_entries is not None and base.size > max_entries:
			indices = np.sort(rng.choice(base.size, size=max_entries, replace=False))

		worst = 0.0
		for flat_index in indices:
			index = np.unravel_index(flat_index, base.shape)
			values = []
			for delta in (epsilon, -epsilon):
				perturbed = base.copy()
				perturbed[index] += delta
				values.append(evaluate({**params.tensors, name: perturbed}))
			numeric = (values[0] - values[1]) / (2.0 * epsilon)
			exact = float(analytic[name][index])
			error = abs(exact - numeric) / max(abs(exact), abs(numeric), floor)
			worst = max(worst, error)

		report.errors[name] = worst
		if worst > tolerance:
			logger.debug("gradient mismatch on %s: relative error %.3g", name, worst)
	return report
