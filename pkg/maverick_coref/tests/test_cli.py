# Copyright (c) 2025, Maverick Coref contributors
# For license information, please see license.txt

import json

import openpyxl
import pytest

from maverick_coref.cli import main
from maverick_coref.corpus.document import CorefPrediction
from maverick_coref.corpus.readers.jsonl import parse_jsonl
from maverick_coref.model import CorefModel
from maverick_coref.tests.conftest import TINY
from maverick_coref.training.checkpoint import MAGIC


def write_lines(path, records):
	path.write_text("".join(json.dumps(record) + "\n" for record in records), encoding="utf-8")
	return path


@pytest.fixture(scope="module")
def trained(tmp_path_factory):
	"""A synthetic corpus and a checkpoint trained on it for one epoch."""
	root = tmp_path_factory.mktemp("cli")
	corpus = root / "train.jsonl"
	assert main(["synth", "--kind", "overfit", "--docs", "3", "--seed", "1", "--output", str(corpus)]) == 0

	config = root / "config.json"
	config.write_text(json.dumps({**TINY, "grad_accum_steps": 2, "clusterer": "mes"}))
	model = root / "model.mvk"
	log = root / "train.log.jsonl"
	argv = ["train", "--config", str(config), "--train", str(corpus), "--dev", str(corpus)]
	argv += ["--out", str(model), "--log", str(log), "--epochs", "1", "--no-progress"]
	assert main(argv) == 0
	return {"root": root, "corpus": corpus, "model": model, "log": log}


def test_synth_writes_requested_documents(trained):
	documents = parse_jsonl(trained["corpus"].read_text(encoding="utf-8"))
	assert [d.doc_id for d in documents] == ["overfit_0000", "overfit_0001", "overfit_0002"]


def test_train_writes_checkpoint_and_log(trained):
	assert trained["model"].read_bytes()[:4] == MAGIC
	records = [json.loads(line) for line in trained["log"].read_text().splitlines()]
	assert records and all("dev_conll_f1" in record for record in records)


def test_predict_then_evaluate(trained, capsys):
	output = trained["root"] / "pred.jsonl"
	argv = ["predict", "--model", str(trained["model"]), "--input", str(trained["corpus"])]
	assert main([*argv, "--output", str(output), "--singletons"]) == 0
	predictions = parse_jsonl(output.read_text(encoding="utf-8"))
	assert [d.doc_id for d in predictions] == ["overfit_0000", "overfit_0001", "overfit_0002"]

	capsys.readouterr()
	assert main(["evaluate", "--gold", str(trained["corpus"]), "--pred", str(output)]) == 0
	report = json.loads(capsys.readouterr().out)
	assert set(report) == {"muc", "b3", "ceaf_phi4", "mention", "conll_f1"}
	assert 0.0 <= report["conll_f1"] <= 1.0


def test_predict_with_gold_mentions(trained):
	output = trained["root"] / "gold_mentions.jsonl"
	argv = ["predict", "--model", str(trained["model"]), "--input", str(trained["corpus"])]
	assert main([*argv, "--output", str(output), "--gold-mentions", "--singletons"]) == 0
	gold = parse_jsonl(trained["corpus"].read_text(encoding="utf-8"))
	predicted = parse_jsonl(output.read_text(encoding="utf-8"))
	assert [d.mentions for d in predicted] == [d.mentions for d in gold]


def test_predict_empty_input(trained):
	empty = trained["root"] / "empty.jsonl"
	empty.write_text("")
	output = trained["root"] / "empty_pred.jsonl"
	assert main(["predict", "--model", str(trained["model"]), "--input", str(empty), "--output", str(output)]) == 0
	assert output.read_text() == ""


def test_stats_with_model(trained, capsys):
	assert main(["stats", "--input", str(trained["corpus"]), "--model", str(trained["model"])]) == 0
	assert "train.jsonl (3 documents)" in capsys.readouterr().out


GOLD_RECORD = {"doc_id": "d", "sentences": [["a", "b", "c"]], "clusters": [[[0, 0], [1, 1], [2, 2]]]}


def test_evaluate_worked_example(tmp_path, capsys):
	gold = write_lines(tmp_path / "gold.jsonl", [GOLD_RECORD])
	pred = write_lines(tmp_path / "pred.jsonl", [{**GOLD_RECORD, "clusters": [[[0, 0], [1, 1]], [[2, 2]]]}])
	assert main(["evaluate", "--gold", str(gold), "--pred", str(pred)]) == 0
	assert json.loads(capsys.readouterr().out)["conll_f1"] == 0.638095

	assert main(["evaluate", "--gold", str(gold), "--pred", str(gold)]) == 0
	assert json.loads(capsys.readouterr().out)["conll_f1"] == 1.0


def test_evaluate_missing_document(tmp_path, caplog):
	gold = write_lines(tmp_path / "gold.jsonl", [GOLD_RECORD])
	pred = write_lines(tmp_path / "pred.jsonl", [{**GOLD_RECORD, "doc_id": "e"}])
	assert main(["evaluate", "--gold", str(gold), "--pred", str(pred)]) == 1
	assert "missing predictions" in caplog.text


def test_stats_on_gold_starts(tmp_path, capsys):
	gold = write_lines(tmp_path / "gold.jsonl", [GOLD_RECORD])
	xlsx = tmp_path / "stats.xlsx"
	assert main(["stats", "--input", str(gold), "--span-len-cap", "2", "--xlsx", str(xlsx)]) == 0
	assert "gold.jsonl (1 documents)" in capsys.readouterr().out
	rows = list(openpyxl.load_workbook(xlsx)["pipeline stats"].iter_rows(values_only=True))
	# three tokens: six enumerated spans, five of length at most two
	assert rows[1][3] == 6
	assert rows[2][3] == 5


def test_train_rejects_bad_config(tmp_path, caplog):
	corpus = write_lines(tmp_path / "train.jsonl", [GOLD_RECORD])
	config = tmp_path / "config.json"
	config.write_text(json.dumps({"d_model": 0}))
	argv = ["train", "--config", str(config), "--train", str(corpus), "--out", str(tmp_path / "m.mvk")]
	assert main(argv) == 1
	assert "d_model must be positive" in caplog.text

	config.write_text(json.dumps(TINY))
	assert main(["train", "--config", str(config), "--train", str(corpus)]) == 1
	assert not (tmp_path / "m.mvk").exists()


def test_train_takes_paths_from_config(tmp_path):
	corpus = write_lines(tmp_path / "train.jsonl", [GOLD_RECORD])
	out = tmp_path / "from_config.mvk"
	config = tmp_path / "config.json"
	config.write_text(json.dumps({**TINY, "epochs": 1, "paths": {"train": str(corpus), "out": str(out)}}))
	assert main(["train", "--config", str(config), "--no-progress"]) == 0
	assert out.exists()


def test_unreadable_input(tmp_path):
	assert main(["evaluate", "--gold", str(tmp_path / "nope.jsonl"), "--pred", str(tmp_path / "nope.jsonl")]) == 1


def test_predict_refuses_crossing_spans_in_conll(trained, tmp_path, monkeypatch, caplog):
	source = write_lines(tmp_path / "input.jsonl", [{"doc_id": "d", "sentences": [["a", "b", "c", "d"]], "clusters": []}])

	def crossing(self, document, params, **kwargs):
		return CorefPrediction(document.doc_id, [[(0, 2), (1, 3)]], document.part)

	monkeypatch.setattr(CorefModel, "predict", crossing)
	argv = ["predict", "--model", str(trained["model"]), "--input", str(source)]
	conll = tmp_path / "pred.conll"
	assert main([*argv, "--output", str(conll)]) == 1
	assert "cannot be written as CoNLL brackets" in caplog.text
	assert not conll.exists()

	jsonl = tmp_path / "pred.jsonl"
	assert main([*argv, "--output", str(jsonl)]) == 0
	[prediction] = parse_jsonl(jsonl.read_text(encoding="utf-8"))
	assert prediction.gold_clusters == [[(0, 2), (1, 3)]]


def test_evaluate_without_singletons(tmp_path, capsys):
	gold = write_lines(tmp_path / "gold.jsonl", [{**GOLD_RECORD, "clusters": [[[0, 0], [2, 2]], [[1, 1]]]}])
	pred = write_lines(tmp_path / "pred.jsonl", [{**GOLD_RECORD, "clusters": [[[0, 0], [2, 2]]]}])
	assert main(["evaluate", "--gold", str(gold), "--pred", str(pred)]) == 0
	assert json.loads(capsys.readouterr().out)["conll_f1"] < 1.0

	assert main(["evaluate", "--gold", str(gold), "--pred", str(pred), "--no-singletons"]) == 0
	assert json.loads(capsys.readouterr().out)["conll_f1"] == 1.0


def test_train_then_predict_is_reproducible(tmp_path):
	corpus = tmp_path / "train.jsonl"
	assert main(["synth", "--kind", "overfit", "--docs", "3", "--seed", "4", "--output", str(corpus)]) == 0
	config = tmp_path / "config.json"
	config.write_text(json.dumps({**TINY, "grad_accum_steps": 2, "seed": 7}))

	outputs = []
	for run in range(2):
		model = tmp_path / f"model{run}.mvk"
		argv = ["train", "--config", str(config), "--train", str(corpus), "--dev", str(corpus)]
		assert main([*argv, "--out", str(model), "--epochs", "2", "--no-progress"]) == 0
		output = tmp_path / f"pred{run}.jsonl"
		argv = ["predict", "--model", str(model), "--input", str(corpus), "--output", str(output)]
		assert main([*argv, "--threshold", "0.3", "--singletons"]) == 0
		outputs.append(output.read_bytes())
	assert outputs[0] == outputs[1]
	assert outputs[0]
