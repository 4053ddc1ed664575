# Copyright (c) 2025, Maverick Coref contributors
# For license information, please see license.txt

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from maverick_coref import hooks
from maverick_coref.exceptions import ConfigError


@dataclass
class EncoderConfig:
	"""Toy transformer encoder dimensions."""

	d_model: int = 32
	layers: int = 2
	heads: int = 2
	max_len: int = 512
	vocab: int = 0
	d_ff: int = 64


@dataclass
class HeadConfig:
	d_hid: int = 32
	d_pair: int = 16
	incr_heads: int = 1


@dataclass
class TrainConfig:
	lr_heads: float = 3e-4
	lr_encoder: float = 2e-5
	epochs: int = 20
	grad_accum_steps: int = 4
	grad_clip: float = 1.0
	warmup_fraction: float = 0.1
	seed: int = 42
	patience: int = 20
	# Epochs between two validations; 0.5 validates twice per epoch.
	validation_interval: float = 0.5
	beta1: float = 0.9
	beta2: float = 0.999
	adam_eps: float = 1e-8


@dataclass
class RunConfig:
	encoder: EncoderConfig = field(default_factory=EncoderConfig)
	heads: HeadConfig = field(default_factory=HeadConfig)
	train: TrainConfig = field(default_factory=TrainConfig)
	clusterer: str = "s2e"
	threshold: float = 0.5
	emit_singletons: bool = False
	speaker_prefix: bool = True
	paths: dict[str, str] = field(default_factory=dict)

	SECTIONS = ("encoder", "heads", "train")

	@classmethod
	def from_dict(cls, values: dict) -> "RunConfig":
		"""Build a config from the flat JSON representation.

		Keys belonging to a section (e.g. ``d_model`` or ``lr_heads``) are routed to it;
		unknown keys raise ``ConfigError``.
		"""
		config = cls()
		for key, value in values.items():
			config.set(key, value)
		config.validate()
		return config

	@classmethod
	def from_file(cls, path: str | Path, overrides: dict | None = None) -> "RunConfig":
		try:
			values = json.loads(Path(path).read_text(encoding="utf-8"))
		except (OSError, json.JSONDecodeError) as e:
			raise ConfigError(f"Unable to read config {path}: {e}")

		if not isinstance(values, dict):
			raise ConfigError(f"Config {path} must be a JSON object")

		values.update({key: value for key, value in (overrides or {}).items() if value is not None})
		return cls.from_dict(values)

	def set(self, key: str, value):
		if key in {"clusterer", "threshold", "emit_singletons", "speaker_prefix", "paths"}:
			setattr(self, key, value)
			return

		for section_name in self.SECTIONS:
			section = getattr(self, section_name)
			if key in {f.name for f in fields(section)}:
				setattr(section, key, value)
				return

		raise ConfigError(f"Unknown config key '{key}'")

	def to_dict(self) -> dict:
		values = {}
		for section_name in self.SECTIONS:
			values.update(asdict(getattr(self, section_name)))
		values.update(
			{
				"clusterer": self.clusterer,
				"threshold": self.threshold,
				"emit_singletons": self.emit_singletons,
				"speaker_prefix": self.speaker_prefix,
				"paths": dict(self.paths),
			}
		)
		return values

	def validate(self):
		for name in ("d_model", "layers", "heads", "max_len", "d_ff"):
			if getattr(self.encoder, name) <= 0:
				raise ConfigError(f"{name} must be positive")
		if self.encoder.vocab < 0:
			raise ConfigError("vocab must not be negative")
		if self.encoder.d_model % self.encoder.heads:
			raise ConfigError("d_model must be divisible by heads")
		for name in ("d_hid", "d_pair", "incr_heads"):
			if getattr(self.heads, name) <= 0:
				raise ConfigError(f"{name} must be positive")
		if self.heads.d_pair % self.heads.incr_heads:
			raise ConfigError("d_pair must be divisible by incr_heads")
		if self.clusterer not in hooks.clusterers:
			raise ConfigError(
				"clusterer must be one of: {0}".format(", ".join(sorted(hooks.clusterers)))
			)
		if not 0 < self.threshold < 1:
			raise ConfigError("threshold must lie in (0, 1)")

		train = self.train
		if train.lr_heads <= 0 or train.lr_encoder <= 0:
			raise ConfigError("learning rates must be positive")
		if train.epochs < 1:
			raise ConfigError("epochs must be at least 1")
		if train.grad_accum_steps < 1:
			raise ConfigError("grad_accum_steps must be at least 1")
		if train.grad_clip <= 0:
			raise ConfigError("grad_clip must be positive")
		if not 0 <= train.warmup_fraction < 1:
			raise ConfigError("warmup_fraction must lie in [0, 1)")
		if train.patience < 1:
			raise ConfigError("patience must be at least 1")
		if train.validation_interval <= 0:
			raise ConfigError("validation_interval must be positive")
