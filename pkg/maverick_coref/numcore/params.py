# Copyright (c) 2025, Maverick Coref contributors
# For license information, please see license.txt

import math
from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field

import numpy as np

from maverick_coref.exceptions import ContractError, DimensionError
from maverick_coref.numcore.tensor import COMPUTE_DTYPE, Tensor

STORAGE_DTYPE = np.float32

ParamSpecs = dict[str, tuple[int, ...]]


@dataclass
class ModelParams(Mapping):
	"""Every learnable tensor of encoder and heads, addressed by path ("extractor.start.W")."""

	tensors: dict[str, np.ndarray] = field(default_factory=dict)
	rng_seed: int = 0

	def __getitem__(self, name: str) -> np.ndarray:
		return self.tensors[name]

	def __iter__(self) -> Iterator[str]:
		return iter(self.tensors)

	def __len__(self) -> int:
		return len(self.tensors)

	def __eq__(self, other) -> bool:
		if not isinstance(other, ModelParams):
			return NotImplemented
		return (
			self.rng_seed == other.rng_seed
			and self.tensors.keys() == other.tensors.keys()
			and all(
				self.tensors[name].dtype == other.tensors[name].dtype
				and np.array_equal(self.tensors[name], other.tensors[name])
				for name in self.tensors
			)
		)

	def names(self) -> list[str]:
		return sorted(self.tensors)

	def copy(self) -> "ModelParams":
		return ModelParams({name: value.copy() for name, value in self.tensors.items()}, self.rng_seed)

	def astype(self, dtype) -> "ModelParams":
		return ModelParams(
			{name: value.astype(dtype) for name, value in self.tensors.items()}, self.rng_seed
		)

	def replace(self, updates: dict[str, np.ndarray]) -> "ModelParams":
		tensors = dict(self.tensors)
		for name, value in updates.items():
			if name not in tensors:
				raise ContractError(f"unknown parameter '{name}'")
			if value.shape != tensors[name].shape:
				raise DimensionError(f"'{name}' expects dims {list(tensors[name].shape)}, got {list(value.shape)}")
			tensors[name] = value.astype(tensors[name].dtype)
		return ModelParams(tensors, self.rng_seed)

	def check_specs(self, specs: ParamSpecs):
		"""Raise if the stored tensors do not match ``specs`` exactly (names and shapes)."""
		missing = sorted(set(specs) - set(self.tensors))
		extra = sorted(set(self.tensors) - set(specs))
		if missing or extra:
			raise DimensionError(f"parameter names differ: missing {missing}, unexpected {extra}")
		for name, shape in specs.items():
			if tuple(self.tensors[name].shape) != tuple(shape):
				raise DimensionError(
					f"'{name}' has dims {list(self.tensors[name].shape)}, config expects {list(shape)}"
				)


def init_params(specs: ParamSpecs, seed: int) -> ModelParams:
	"""Seeded init: uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)]; layer norm gain 1, shift 0."""
	rng = np.random.default_rng(seed)
	tensors = {}
	for name in sorted(specs):
		shape = tuple(specs[name])
		if name.endswith(".gamma"):
			value = np.ones(shape)
		elif name.endswith(".beta"):
			value = np.zeros(shape)
		else:
			bound = 1.0 / math.sqrt(shape[-1])
			value = rng.uniform(-bound, bound, size=shape)
		tensors[name] = value.astype(STORAGE_DTYPE)
	return ModelParams(tensors, seed)


class ParamTape:
	"""Binds parameters to leaf tensors for one forward pass.

	Leaves are created on first access; with ``requires_grad`` the pass is recorded
	and :meth:`gradients` returns one array per parameter after ``loss.backward()``.
	"""

	def __init__(self, params: ModelParams, requires_grad: bool = True):
		self.params = params
		self.requires_grad = requires_grad
		self.leaves: dict[str, Tensor] = {}

	def __getitem__(self, name: str) -> Tensor:
		leaf = self.leaves.get(name)
		if leaf is None:
			if name not in self.params:
				raise ContractError(f"parameter '{name}' does not exist")
			leaf = Tensor(self.params[name].astype(COMPUTE_DTYPE), requires_grad=self.requires_grad)
			self.leaves[name] = leaf
		return leaf

	def __contains__(self, name: str) -> bool:
		return name in self.params

	def gradients(self) -> dict[str, np.ndarray]:
		grads = {}
		for name in self.params:
			leaf = self.leaves.get(name)
			if leaf is None or leaf.grad is None:
				grads[name] = np.zeros(self.params[name].shape, dtype=COMPUTE_DTYPE)
			else:
				grads[name] = leaf.grad
		return grads


def bind(params) -> ParamTape:
	"""Accept either a ParamTape or plain ModelParams (bound without recording)."""
	if isinstance(params, ParamTape):
		return params
	if isinstance(params, ModelParams):
		return ParamTape(params, requires_grad=False)
	if isinstance(params, Mapping):
		return ParamTape(ModelParams(dict(params)), requires_grad=False)
	raise ContractError(f"expected ModelParams or ParamTape, got {type(params).__name__}")
