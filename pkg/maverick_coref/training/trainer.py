# Copyright (c) 2025, Maverick Coref contributors
# For license information, please see license.txt

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from tqdm import tqdm

from maverick_coref.corpus.document import Document
from maverick_coref.exceptions import NumericError, TrainingError
from maverick_coref.metrics import evaluate_documents
from maverick_coref.model import CorefModel
from maverick_coref.numcore.params import ModelParams, ParamTape
from maverick_coref.training.losses import LossBreakdown
from maverick_coref.training.optimizer import Adam, clip_grad_norm

logger = logging.getLogger(__name__)


def train_step(
	model: CorefModel,
	batch: list[Document],
	params: ModelParams,
	optimizer: Adam,
	grad_clip: float | None = None,
) -> tuple[ModelParams, LossBreakdown]:
	"""One update from the summed gradients of L_coref over ``batch``."""
	grad_clip = model.config.train.grad_clip if grad_clip is None else grad_clip
	grads = {name: np.zeros(params[name].shape) for name in params}
	breakdown = LossBreakdown()

	for document in batch:
		tape = ParamTape(params)
		try:
			parts, total = model.compute_loss(document, tape)
			total.backward()
		except NumericError as e:
			raise TrainingError(f"non-finite value while training on '{document.doc_id}' (step {optimizer.t}): {e}")
		if not math.isfinite(parts.l_total):
			raise TrainingError(f"loss is {parts.l_total} on '{document.doc_id}' (step {optimizer.t})")
		for name, grad in tape.gradients().items():
			grads[name] += grad
		breakdown = breakdown + parts

	grads, norm = clip_grad_norm(grads, grad_clip)
	if not math.isfinite(norm):
		raise TrainingError(f"gradient norm is {norm} at step {optimizer.t}")
	return optimizer.step(params, grads), breakdown


@dataclass
class TrainResult:
	params: ModelParams
	best_score: float | None = None
	history: list[dict] = field(default_factory=list)
	stopped_early: bool = False


class Trainer:
	"""Epoch loop with seeded shuffling, periodic validation on CoNLL-F1 and patience."""

	def __init__(self, model: CorefModel, progress: bool = True):
		self.model = model
		self.train_config = model.config.train
		self.progress = progress

	def prepare(self, documents: list[Document]) -> list[Document]:
		return [segment for document in documents for segment in self.model.prepare(document)[1]]

	def validate(self, documents: list[Document], params: ModelParams) -> float:
		# predictions without singletons are scored against gold without singletons
		predictions = [self.model.predict(document, params) for document in documents]
		drop_singletons = not self.model.config.emit_singletons
		return float(evaluate_documents(documents, predictions, drop_singletons=drop_singletons).conll_f1)

	def fit(
		self,
		train_documents: list[Document],
		dev_documents: list[Document] | None = None,
		params: ModelParams | None = None,
		log_path: str | Path | None = None,
		stop_at: float | None = None,
	) -> TrainResult:
		"""Train and return the best parameters by dev CoNLL-F1 (the last ones without dev data).

		``stop_at`` ends training once the dev score reaches it.
		"""
		config = self.train_config
		params = self.model.init_params() if params is None else params
		units = self.prepare(train_documents)
		if not units:
			raise TrainingError("no training documents")

		rng = np.random.default_rng(config.seed)
		batch_size = config.grad_accum_steps
		steps_per_epoch = math.ceil(len(units) / batch_size)
		total_steps = config.epochs * steps_per_epoch
		validate_every = max(1, round(config.validation_interval * steps_per_epoch))
		optimizer = Adam.from_config(config, total_steps)

		result = TrainResult(params)
		best_score, bad_validations = None, 0
		running = LossBreakdown()
		log = open(log_path, "w", encoding="utf-8") if log_path else None
		try:
			for epoch in tqdm(range(config.epochs), desc="epochs", disable=not self.progress):
				order = rng.permutation(len(units))
				for batch_index in range(steps_per_epoch):
					batch = [units[i] for i in order[batch_index * batch_size : (batch_index + 1) * batch_size]]
					params, loss = train_step(self.model, batch, params, optimizer)
					running = running + loss
					if optimizer.t % validate_every and optimizer.t != total_steps:
						continue

					record = {
						"epoch": epoch + (batch_index + 1) / steps_per_epoch,
						"step": optimizer.t,
						**running.to_dict(),
					}
					running = LossBreakdown()
					if dev_documents is not None:
						score = self.validate(dev_documents, params)
						improved = best_score is None or score > best_score
						record["dev_conll_f1"] = score
						record["best"] = bool(improved)
						if improved:
							best_score, bad_validations = score, 0
							result.params = params
						else:
							bad_validations += 1
					else:
						result.params = params

					result.history.append(record)
					logger.info("validation %s", json.dumps(record, sort_keys=True))
					if log is not None:
						log.write(json.dumps(record, sort_keys=True) + "\n")
						log.flush()

					if dev_documents is not None and (
						bad_validations >= config.patience or (stop_at is not None and best_score >= stop_at)
					):
						result.stopped_early = True
						break
				if result.stopped_early:
					break
		finally:
			if log is not None:
				log.close()

		result.best_score = best_score
		if dev_documents is None:
			result.params = params
		return result
