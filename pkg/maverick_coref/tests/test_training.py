# Copyright (c) 2025, Maverick Coref contributors
# For license information, please see license.txt

import json
import math
import struct

import numpy as np
import pytest

from maverick_coref.corpus.document import CorefPrediction, Document
from maverick_coref.corpus.synthetic import overfit_corpus
from maverick_coref.exceptions import CheckpointError, NumericError, TrainingError
from maverick_coref.numcore.params import STORAGE_DTYPE, ModelParams, ParamTape, init_params
from maverick_coref.tests.conftest import make_model
from maverick_coref.training.checkpoint import (
	MAGIC,
	VERSION,
	load_checkpoint,
	read_checkpoint,
	save_checkpoint,
	write_checkpoint,
)
from maverick_coref.training.losses import (
	LossBreakdown,
	build_labels,
	incremental_targets,
	loss_clust_ant,
	loss_clust_incr,
	loss_end,
	loss_start,
)
from maverick_coref.training.optimizer import Adam, LinearWarmupDecay, clip_grad_norm
from maverick_coref.training.trainer import Trainer, train_step

LN2 = math.log(2.0)


# Losses


def test_loss_examples():
	assert loss_start(np.array([0.5]), [1.0]).item() == pytest.approx(LN2)
	assert loss_start(np.array([1 - 1e-7]), [1.0]).item() == pytest.approx(0.0, abs=1e-6)
	assert loss_end(np.array([0.5]), [1.0]).item() == pytest.approx(LN2)
	assert loss_clust_ant(np.array([0.5]), [1.0]).item() == pytest.approx(LN2)
	assert loss_clust_incr(np.array([0.5]), [1.0]).item() == pytest.approx(LN2)
	# every term is bounded by the clamp
	assert loss_start(np.array([0.0, 1.0]), [1.0, 0.0]).item() <= 2 * 16.12


def test_loss_breakdown():
	total = LossBreakdown(1.0, 2.0, 3.0) + LossBreakdown(0.5, 0.0, 0.25)
	assert total.l_total == 6.75
	assert total.to_dict() == {"l_start": 1.5, "l_end": 2.0, "l_clust": 3.25, "l_total": 6.75}


def test_build_labels(six_token_doc):
	labels = build_labels(six_token_doc)
	assert labels.start_labels.tolist() == [1, 0, 0, 1, 1, 0]
	assert labels.gold_starts == [0, 3, 4]
	assert labels.end_spans == [(0, 0), (0, 1), (0, 2), (0, 3), (3, 3), (4, 4), (4, 5)]
	assert labels.end_labels.tolist() == [0, 1, 0, 0, 1, 1, 0]
	assert labels.mentions == [(0, 1), (3, 3), (4, 4)]
	assert labels.ant_pairs == [(1, 0), (2, 0), (2, 1)]
	assert labels.ant_labels.tolist() == [0, 1, 0]


def test_incremental_targets():
	assert incremental_targets([0, 1, 0]) == [(1, [[0]], [0.0]), (2, [[0], [1]], [1.0, 0.0])]
	assert incremental_targets([0]) == []
	assert incremental_targets([3, 3, 3])[-1] == (2, [[0, 1]], [1.0])


def test_loss_on_document_without_mentions(clusterer_kind):
	document = Document("empty", ["a", "b", "c"], [2])
	model = make_model([document], clusterer_kind)
	breakdown, total = model.compute_loss(document, ParamTape(model.init_params()))
	assert breakdown.l_end == 0.0 and breakdown.l_clust == 0.0
	assert total.item() == pytest.approx(breakdown.l_total)


# Optimizer


def test_linear_warmup_decay():
	schedule = LinearWarmupDecay(total_steps=4, warmup_fraction=0.5)
	assert [schedule.factor(step) for step in range(5)] == [0.5, 1.0, 1.0, 0.5, 0.0]
	assert LinearWarmupDecay(10, 0.0).factor(0) == 1.0


def test_clip_grad_norm():
	grads = {"a": np.array([3.0]), "b": np.array([4.0])}
	clipped, norm = clip_grad_norm(grads, 1.0)
	assert norm == 5.0
	assert clipped["a"][0] == pytest.approx(0.6) and clipped["b"][0] == pytest.approx(0.8)
	unchanged, _ = clip_grad_norm(grads, 10.0)
	assert unchanged is grads


def test_adam_uses_two_learning_rates():
	params = ModelParams({"encoder.embed": np.ones(1, dtype=STORAGE_DTYPE), "clusterer.w": np.ones(1, dtype=STORAGE_DTYPE)})
	optimizer = Adam(lr_heads=0.1, lr_encoder=0.01)
	updated = optimizer.step(params, {"encoder.embed": np.array([2.0]), "clusterer.w": np.array([-3.0])})
	# the first bias-corrected step moves by the learning rate against the gradient sign
	assert updated["encoder.embed"][0] == pytest.approx(0.99, abs=1e-6)
	assert updated["clusterer.w"][0] == pytest.approx(1.1, abs=1e-6)
	assert updated["clusterer.w"].dtype == STORAGE_DTYPE
	assert params["clusterer.w"][0] == 1.0
	assert optimizer.t == 1


# Checkpoint


@pytest.fixture
def small_params() -> ModelParams:
	return init_params({"encoder.embed": (4, 3), "clusterer.s2e.W_ss": (2, 2), "encoder.ln_f.gamma": (3,)}, 9)


def test_checkpoint_round_trip(small_params):
	data = save_checkpoint(small_params, {"d_model": 3}, ["[UNK]", "a"])
	checkpoint = load_checkpoint(data)
	assert checkpoint.params == small_params
	assert checkpoint.config == {"d_model": 3}
	assert checkpoint.vocab == ["[UNK]", "a"]
	assert save_checkpoint(checkpoint.params, checkpoint.config, checkpoint.vocab) == data


def test_checkpoint_layout(small_params):
	data = save_checkpoint(small_params)
	assert data[:4] == MAGIC
	assert data[4] == VERSION
	assert struct.unpack("<I", data[5:9])[0] == 3
	# records are sorted by name
	name_length = struct.unpack("<I", data[9:13])[0]
	assert data[13 : 13 + name_length] == b"clusterer.s2e.W_ss"


def test_checkpoint_rejects_corruption(small_params):
	data = save_checkpoint(small_params, {"a": 1})
	for size in range(len(data)):
		with pytest.raises(CheckpointError):
			load_checkpoint(data[:size])
	with pytest.raises(CheckpointError, match="bad magic"):
		load_checkpoint(b"XXXX" + data[4:])
	with pytest.raises(CheckpointError, match="version"):
		load_checkpoint(data[:4] + bytes([VERSION + 1]) + data[5:])
	with pytest.raises(CheckpointError, match="trailing"):
		load_checkpoint(data + b"\x00")


def test_checkpoint_rejects_bad_records():
	record = struct.pack("<I", 1) + b"w" + struct.pack("<II", 1, 1) + np.zeros(1, "<f4").tobytes()
	blob = b"{}"
	duplicated = MAGIC + bytes([VERSION]) + struct.pack("<I", 2) + record + record
	with pytest.raises(CheckpointError, match="duplicate"):
		load_checkpoint(duplicated + struct.pack("<I", len(blob)) + blob)

	not_json = MAGIC + bytes([VERSION]) + struct.pack("<I", 1) + record + struct.pack("<I", 3) + b"{x}"
	with pytest.raises(CheckpointError, match="invalid config"):
		load_checkpoint(not_json)

	as_list = MAGIC + bytes([VERSION]) + struct.pack("<I", 0) + struct.pack("<I", 2) + b"[]"
	with pytest.raises(CheckpointError, match="JSON object"):
		load_checkpoint(as_list)


def test_checkpoint_files(tmp_path, small_params):
	path = tmp_path / "model.mvk"
	write_checkpoint(path, small_params, {"clusterer": "s2e"})
	assert read_checkpoint(path).params == small_params
	with pytest.raises(CheckpointError):
		read_checkpoint(tmp_path / "missing.mvk")


# Trainer


def tiny_train_model(documents, clusterer="s2e", **overrides):
	settings = {
		"epochs": 2,
		"grad_accum_steps": 2,
		"validation_interval": 0.5,
		"lr_heads": 1e-2,
		"lr_encoder": 1e-3,
		**overrides,
	}
	return make_model(documents, clusterer, **settings)


def test_train_step_updates_parameters():
	documents = overfit_corpus(2, seed=1)
	model = tiny_train_model(documents)
	params = model.init_params()
	optimizer = Adam.from_config(model.config.train, total_steps=10)
	updated, breakdown = train_step(model, documents, params, optimizer)
	assert breakdown.l_start > 0 and breakdown.l_end > 0 and breakdown.l_clust > 0
	assert any(not np.array_equal(params[name], updated[name]) for name in params)
	assert updated.names() == params.names()


def test_train_step_reports_numeric_errors(monkeypatch):
	documents = overfit_corpus(1, seed=1)
	model = tiny_train_model(documents)

	def broken(document, tape):
		raise NumericError("non-finite value in tensor of shape ()")

	monkeypatch.setattr(model, "compute_loss", broken)
	with pytest.raises(TrainingError, match="overfit_0000"):
		train_step(model, documents, model.init_params(), Adam(1e-3, 1e-3))


def test_fit_logs_every_validation(tmp_path):
	documents = overfit_corpus(4, seed=2)
	model = tiny_train_model(documents)
	log_path = tmp_path / "train.jsonl"
	result = Trainer(model, progress=False).fit(documents, documents, log_path=log_path)

	records = [json.loads(line) for line in log_path.read_text().splitlines()]
	# two steps per epoch, validated every step
	assert [r["step"] for r in records] == [1, 2, 3, 4]
	assert records == result.history
	assert set(records[0]) == {"epoch", "step", "l_start", "l_end", "l_clust", "l_total", "dev_conll_f1", "best"}
	assert records[0]["best"] is True
	assert result.best_score == max(r["dev_conll_f1"] for r in records)


def test_fit_logs_scores_of_non_empty_predictions(tmp_path, monkeypatch):
	documents = overfit_corpus(4, seed=2)
	model = tiny_train_model(documents)

	def first_cluster(document, params):
		return CorefPrediction(document.doc_id, [document.gold_clusters[0]], document.part)

	monkeypatch.setattr(model, "predict", first_cluster)
	log_path = tmp_path / "train.jsonl"
	result = Trainer(model, progress=False).fit(documents, documents, log_path=log_path)

	records = [json.loads(line) for line in log_path.read_text().splitlines()]
	assert len(records) >= 2
	assert all(type(r["best"]) is bool and type(r["dev_conll_f1"]) is float for r in result.history)
	assert [r["best"] for r in records][:2] == [True, False]
	assert 0.0 < records[0]["dev_conll_f1"] < 1.0


def test_validate_drops_gold_singletons_unless_emitted(six_token_doc):
	non_singletons = [cluster for cluster in six_token_doc.gold_clusters if len(cluster) > 1]

	def predict(document, params):
		return CorefPrediction(document.doc_id, non_singletons)

	def validate(emit_singletons: bool) -> float:
		model = make_model([six_token_doc], emit_singletons=emit_singletons)
		model.predict = predict
		return Trainer(model, progress=False).validate([six_token_doc], model.init_params())

	assert validate(emit_singletons=False) == pytest.approx(1.0)
	assert validate(emit_singletons=True) < 1.0


def test_fit_without_dev_returns_last_params():
	documents = overfit_corpus(2, seed=3)
	model = tiny_train_model(documents, epochs=1)
	result = Trainer(model, progress=False).fit(documents)
	assert result.best_score is None
	assert not result.stopped_early
	assert "dev_conll_f1" not in result.history[-1]
	assert result.params != model.init_params()


def test_fit_stops_at_target_score():
	documents = overfit_corpus(2, seed=4)
	model = tiny_train_model(documents, epochs=5)
	result = Trainer(model, progress=False).fit(documents, documents, stop_at=0.0)
	assert result.stopped_early
	assert len(result.history) == 1


def test_fit_needs_documents():
	model = tiny_train_model(overfit_corpus(1))
	with pytest.raises(TrainingError):
		Trainer(model, progress=False).fit([])


def test_training_is_deterministic(tmp_path, clusterer_kind):
	documents = overfit_corpus(3, seed=5)
	outputs = []
	for run in range(2):
		model = tiny_train_model(documents, clusterer_kind, seed=11)
		log_path = tmp_path / f"run{run}.jsonl"
		result = Trainer(model, progress=False).fit(documents, documents, log_path=log_path)
		outputs.append((save_checkpoint(result.params, model.config.to_dict(), model.vocab.to_list()), log_path.read_bytes()))
	assert outputs[0] == outputs[1]


@pytest.mark.slow
def test_overfit_reaches_high_conll_f1(clusterer_kind):
	documents = overfit_corpus(20, seed=0)
	model = make_model(
		documents,
		clusterer_kind,
		d_model=32,
		layers=2,
		heads=2,
		d_ff=64,
		d_hid=32,
		d_pair=16,
		max_len=512,
		epochs=300,
		grad_accum_steps=4,
		lr_heads=3e-3,
		lr_encoder=1e-3,
		warmup_fraction=0.02,
		validation_interval=5,
		patience=1000,
	)
	assert len(model.vocab) <= 200
	result = Trainer(model, progress=False).fit(documents, documents, stop_at=0.95)
	assert result.best_score >= 0.95
