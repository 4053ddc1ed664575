# Copyright (c) 2025, Maverick Coref contributors
# For license information, please see license.txt

"""Binary checkpoint format.

magic ``MVRK``, version byte, u32 record count, then per parameter (sorted by name):
u32 name length, UTF-8 name, u32 rank, u32 per dim, float32 payload (row-major);
finally a u32-length-prefixed UTF-8 JSON blob with the run config. All integers
and floats are little-endian.
"""

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from maverick_coref.exceptions import CheckpointError
from maverick_coref.numcore.params import STORAGE_DTYPE, ModelParams

MAGIC = b"MVRK"
VERSION = 1
_U32 = struct.Struct("<I")
_PAYLOAD_DTYPE = np.dtype("<f4")


@dataclass
class Checkpoint:
	params: ModelParams
	config: dict = field(default_factory=dict)
	vocab: list[str] | None = None


def save_checkpoint(params: ModelParams, config: dict | None = None, vocab: list[str] | None = None) -> bytes:
	chunks = [MAGIC, bytes([VERSION]), _U32.pack(len(params))]
	for name in params.names():
		value = np.ascontiguousarray(params[name], dtype=_PAYLOAD_DTYPE)
		encoded = name.encode("utf-8")
		chunks.append(_U32.pack(len(encoded)))
		chunks.append(encoded)
		chunks.append(_U32.pack(value.ndim))
		chunks.extend(_U32.pack(dim) for dim in value.shape)
		chunks.append(value.tobytes(order="C"))

	blob = {"config": config or {}, "rng_seed": params.rng_seed}
	if vocab is not None:
		blob["vocab"] = list(vocab)
	encoded_blob = json.dumps(blob, sort_keys=True, ensure_ascii=False).encode("utf-8")
	chunks.append(_U32.pack(len(encoded_blob)))
	chunks.append(encoded_blob)
	return b"".join(chunks)


class _Cursor:
	def __init__(self, data: bytes):
		self.data = data
		self.position = 0

	def take(self, size: int, what: str) -> bytes:
		end = self.position + size
		if end > len(self.data):
			raise CheckpointError(f"truncated checkpoint while reading {what} at byte {self.position}")
		chunk = self.data[self.position : end]
		self.position = end
		return chunk

	def u32(self, what: str) -> int:
		return _U32.unpack(self.take(_U32.size, what))[0]


def load_checkpoint(data: bytes) -> Checkpoint:
	cursor = _Cursor(data)
	if cursor.take(len(MAGIC), "magic") != MAGIC:
		raise CheckpointError("not a checkpoint: bad magic")
	version = cursor.take(1, "version")[0]
	if version != VERSION:
		raise CheckpointError(f"unsupported checkpoint version {version}, expected {VERSION}")

	tensors = {}
	for _ in range(cursor.u32("record count")):
		try:
			name = cursor.take(cursor.u32("name length"), "name").decode("utf-8")
		except UnicodeDecodeError:
			raise CheckpointError("parameter name is not valid UTF-8")
		if name in tensors:
			raise CheckpointError(f"duplicate parameter '{name}'")
		dims = tuple(cursor.u32(f"dims of '{name}'") for _ in range(cursor.u32(f"rank of '{name}'")))
		count = int(np.prod(dims, dtype=np.int64))
		payload = cursor.take(count * _PAYLOAD_DTYPE.itemsize, f"payload of '{name}'")
		tensors[name] = np.frombuffer(payload, dtype=_PAYLOAD_DTYPE).reshape(dims).astype(STORAGE_DTYPE)

	try:
		blob = json.loads(cursor.take(cursor.u32("config length"), "config").decode("utf-8"))
	except (UnicodeDecodeError, json.JSONDecodeError) as e:
		raise CheckpointError(f"invalid config blob: {e}")
	if cursor.position != len(data):
		raise CheckpointError(f"{len(data) - cursor.position} unexpected trailing bytes")
	if not isinstance(blob, dict):
		raise CheckpointError("config blob must be a JSON object")

	return Checkpoint(
		params=ModelParams(tensors, int(blob.get("rng_seed", 0))),
		config=blob.get("config", {}),
		vocab=blob.get("vocab"),
	)


def write_checkpoint(path: str | Path, params: ModelParams, config: dict | None = None, vocab=None):
	Path(path).write_bytes(save_checkpoint(params, config, vocab))


def read_checkpoint(path: str | Path) -> Checkpoint:
	try:
		data = Path(path).read_bytes()
	except OSError as e:
		raise CheckpointError(f"Unable to read checkpoint {path}: {e}")
	return load_checkpoint(data)
