# Copyright (c) 2025, Maverick Coref contributors
# For license information, please see license.txt

"""Reverse-mode automatic differentiation over dense numpy arrays.

Every operation creates a new :class:`Tensor` that remembers its parents and a
closure mapping the output gradient to one gradient per parent. Values are held
in float64 so reductions accumulate in 64 bits; parameters are stored in float32
by :class:`~maverick_coref.numcore.params.ModelParams`.
"""

import numpy as np

from maverick_coref.exceptions import ContractError, DimensionError, NumericError

COMPUTE_DTYPE = np.float64


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
	"""Sum ``grad`` over the axes numpy broadcast to reach it from ``shape``."""
	while grad.ndim > len(shape):
		grad = grad.sum(axis=0)
	for axis, extent in enumerate(shape):
		if extent == 1 and grad.shape[axis] != 1:
			grad = grad.sum(axis=axis, keepdims=True)
	return grad


class Tensor:
	__slots__ = ("_backward", "_parents", "data", "grad", "requires_grad")
	# numpy defers mixed expressions (ndarray * Tensor) to the reflected Tensor ops
	__array_ufunc__ = None

	def __init__(self, data, requires_grad: bool = False, _parents: tuple = (), _backward=None):
		self.data = np.asarray(data, dtype=COMPUTE_DTYPE)
		if not np.isfinite(self.data).all():
			raise NumericError(f"non-finite value in tensor of shape {self.data.shape}")

		self.grad = None
		self.requires_grad = requires_grad or any(parent.requires_grad for parent in _parents)
		self._parents = _parents if self.requires_grad else ()
		self._backward = _backward if self.requires_grad else None

	@property
	def shape(self) -> tuple[int, ...]:
		return self.data.shape

	@property
	def dims(self) -> list[int]:
		return list(self.data.shape)

	@property
	def ndim(self) -> int:
		return self.data.ndim

	def item(self) -> float:
		return float(self.data.reshape(-1)[0]) if self.data.size == 1 else float("nan")

	def __len__(self) -> int:
		return len(self.data)

	def __repr__(self) -> str:
		return f"Tensor(dims={self.dims}, requires_grad={self.requires_grad})"

	# Arithmetic

	def __add__(self, other):
		other = as_tensor(other)
		a_shape, b_shape = self.shape, other.shape
		return Tensor(
			self.data + other.data,
			_parents=(self, other),
			_backward=lambda g: (_unbroadcast(g, a_shape), _unbroadcast(g, b_shape)),
		)

	__radd__ = __add__

	def __neg__(self):
		return Tensor(-self.data, _parents=(self,), _backward=lambda g: (-g,))

	def __sub__(self, other):
		return self + (-as_tensor(other))

	def __rsub__(self, other):
		return as_tensor(other) + (-self)

	def __mul__(self, other):
		other = as_tensor(other)
		a, b = self.data, other.data
		return Tensor(
			a * b,
			_parents=(self, other),
			_backward=lambda g: (_unbroadcast(g * b, a.shape), _unbroadcast(g * a, b.shape)),
		)

	__rmul__ = __mul__

	def __truediv__(self, other):
		other = as_tensor(other)
		a, b = self.data, other.data
		return Tensor(
			a / b,
			_parents=(self, other),
			_backward=lambda g: (_unbroadcast(g / b, a.shape), _unbroadcast(-g * a / (b * b), b.shape)),
		)

	def __pow__(self, exponent: float):
		a = self.data
		return Tensor(
			a**exponent, _parents=(self,), _backward=lambda g: (g * exponent * a ** (exponent - 1),)
		)

	def __matmul__(self, other):
		return matmul(self, other)

	# Shape manipulation

	def sum(self, axis=None, keepdims: bool = False):
		shape = self.shape

		def backward(g):
			if axis is not None and not keepdims:
				g = np.expand_dims(g, axis)
			return (np.broadcast_to(g, shape).copy(),)

		return Tensor(self.data.sum(axis=axis, keepdims=keepdims), _parents=(self,), _backward=backward)

	def mean(self, axis=None, keepdims: bool = False):
		count = self.data.size if axis is None else self.data.shape[axis]
		return self.sum(axis=axis, keepdims=keepdims) * (1.0 / count)

	def reshape(self, *shape):
		original = self.shape
		return Tensor(self.data.reshape(*shape), _parents=(self,), _backward=lambda g: (g.reshape(original),))

	def transpose(self, *axes):
		axes = axes or tuple(reversed(range(self.ndim)))
		inverse = tuple(np.argsort(axes))
		return Tensor(
			self.data.transpose(axes), _parents=(self,), _backward=lambda g: (g.transpose(inverse),)
		)

	@property
	def T(self):
		return self.transpose()

	def __getitem__(self, index):
		shape = self.shape

		def backward(g):
			grad = np.zeros(shape, dtype=COMPUTE_DTYPE)
			np.add.at(grad, index, g)
			return (grad,)

		return Tensor(self.data[index], _parents=(self,), _backward=backward)

	# Gradient

	def backward(self):
		"""Accumulate d(self)/d(leaf) into ``leaf.grad`` for every leaf on the tape."""
		if self.data.size != 1:
			raise ContractError(f"backward needs a scalar loss, got dims {self.dims}")

		order = _topological_order(self)
		grads = {id(self): np.ones_like(self.data)}
		for node in reversed(order):
			grad = grads.pop(id(node), None)
			if grad is None:
				continue
			if node._backward is None:
				node.grad = grad if node.grad is None else node.grad + grad
				continue
			for parent, parent_grad in zip(node._parents, node._backward(grad)):
				if parent_grad is None or not parent.requires_grad:
					continue
				key = id(parent)
				grads[key] = parent_grad if key not in grads else grads[key] + parent_grad


def _topological_order(root: Tensor) -> list[Tensor]:
	order, visited = [], set()
	stack = [(root, False)]
	while stack:
		node, expanded = stack.pop()
		if expanded:
			order.append(node)
			continue
		if id(node) in visited:
			continue
		visited.add(id(node))
		stack.append((node, True))
		for parent in node._parents:
			if id(parent) not in visited:
				stack.append((parent, False))
	return order


def as_tensor(value) -> Tensor:
	return value if isinstance(value, Tensor) else Tensor(value)


def matmul(a, b) -> Tensor:
	a, b = as_tensor(a), as_tensor(b)
	if a.shape[-1] != b.shape[0 if b.ndim == 1 else -2]:
		raise DimensionError(f"cannot multiply dims {a.dims} by {b.dims}")

	x, y = a.data, b.data

	def backward(g):
		if x.ndim == 1 and y.ndim == 1:
			return g * y, g * x
		if x.ndim == 1:
			return y @ g, np.outer(x, g)
		if y.ndim == 1:
			return np.outer(g, y), x.T @ g
		grad_x = g @ np.swapaxes(y, -1, -2)
		grad_y = np.swapaxes(x, -1, -2) @ g
		return _unbroadcast(grad_x, x.shape), _unbroadcast(grad_y, y.shape)

	return Tensor(x @ y, _parents=(a, b), _backward=backward)


def concat(tensors, axis: int = 0) -> Tensor:
	tensors = [as_tensor(t) for t in tensors]
	sizes = [t.shape[axis] for t in tensors]
	splits = np.cumsum(sizes)[:-1]
	try:
		data = np.concatenate([t.data for t in tensors], axis=axis)
	except ValueError as e:
		raise DimensionError(str(e))
	return Tensor(
		data, _parents=tuple(tensors), _backward=lambda g: tuple(np.split(g, splits, axis=axis))
	)


def stack(tensors, axis: int = 0) -> Tensor:
	tensors = [as_tensor(t) for t in tensors]
	try:
		data = np.stack([t.data for t in tensors], axis=axis)
	except ValueError as e:
		raise DimensionError(str(e))
	return Tensor(
		data,
		_parents=tuple(tensors),
		_backward=lambda g: tuple(np.take(g, i, axis=axis) for i in range(len(tensors))),
	)
