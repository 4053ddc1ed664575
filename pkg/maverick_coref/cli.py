# Copyright (c) 2025, Maverick Coref contributors
# For license information, please see license.txt

import argparse
import json
import logging
import sys
from pathlib import Path

from maverick_coref import __version__
from maverick_coref.config import RunConfig
from maverick_coref.corpus.synthetic import GENERATORS
from maverick_coref.exceptions import ConfigError, CorefError
from maverick_coref.extractor import PipelineStats, pipeline_stats
from maverick_coref.metrics import evaluate_documents
from maverick_coref.model import CorefModel
from maverick_coref.reports import CorpusStats, render_stats_table, write_stats_xlsx
from maverick_coref.training.checkpoint import read_checkpoint, write_checkpoint
from maverick_coref.training.trainer import Trainer
from maverick_coref.utils import get_reader_for_path

logger = logging.getLogger("maverick_coref")


def read_corpus(path: str | Path):
	reader = get_reader_for_path(path)
	documents = reader.read_path(path)
	logger.debug("%s: %s", path, {k: v for k, v in reader.get_preview_data(documents).items() if k != "documents_preview"})
	return documents


def write_corpus(path: str | Path, documents, predictions=None):
	get_reader_for_path(path).write_path(path, documents, predictions)


def cmd_train(args) -> int:
	overrides = {"epochs": args.epochs, "seed": args.seed, "clusterer": args.clusterer}
	config = RunConfig.from_file(args.config, overrides)
	train_path = args.train or config.paths.get("train")
	dev_path = args.dev or config.paths.get("dev")
	out_path = args.out or config.paths.get("out")
	if not train_path or not out_path:
		raise ConfigError("both a training corpus (--train) and an output path (--out) are required")

	train_documents = read_corpus(train_path)
	dev_documents = read_corpus(dev_path) if dev_path else None
	model = CorefModel.from_corpus(config, train_documents)
	logger.info(
		"Training %s on %d documents (vocabulary %d, %d parameters)",
		config.clusterer,
		len(train_documents),
		len(model.vocab),
		len(model.param_specs()),
	)

	result = Trainer(model, progress=not args.no_progress).fit(train_documents, dev_documents, log_path=args.log)
	checkpoint = model.to_checkpoint(result.params)
	write_checkpoint(out_path, checkpoint.params, checkpoint.config, checkpoint.vocab)
	if result.best_score is not None:
		logger.info("Best dev CoNLL-F1 %.4f, checkpoint written to %s", result.best_score, out_path)
	else:
		logger.info("Checkpoint written to %s", out_path)
	return 0


def load_model(path: str | Path, threshold=None, emit_singletons=None):
	overrides = {"threshold": threshold, "emit_singletons": emit_singletons}
	return CorefModel.from_checkpoint(read_checkpoint(path), overrides)


def cmd_predict(args) -> int:
	model, params = load_model(args.model, args.threshold, True if args.singletons else None)
	documents = read_corpus(args.input)
	predictions = [model.predict(document, params, gold_mentions=args.gold_mentions) for document in documents]
	write_corpus(args.output, documents, predictions)
	logger.info("Wrote predictions for %d documents to %s", len(predictions), args.output)
	return 0


def cmd_evaluate(args) -> int:
	report = evaluate_documents(read_corpus(args.gold), read_corpus(args.pred), drop_singletons=args.no_singletons)
	print(json.dumps(report.to_dict(), indent=2))
	return 0


def cmd_stats(args) -> int:
	model = params = None
	if args.model:
		model, params = load_model(args.model)

	corpora = []
	for path in args.input:
		documents = read_corpus(path)
		total = PipelineStats()
		for document in documents:
			if model is not None:
				starts, n_mentions = model.predicted_starts(document, params)
			else:
				starts, n_mentions = [span.start for span in document.mentions], None
			total = total + pipeline_stats(document, starts, args.span_len_cap, args.top_k, n_mentions)
		corpora.append(CorpusStats(Path(path).name, len(documents), total))

	print(render_stats_table(corpora))
	if args.xlsx:
		write_stats_xlsx(args.xlsx, corpora)
		logger.info("Statistics written to %s", args.xlsx)
	return 0


def cmd_synth(args) -> int:
	documents = GENERATORS[args.kind](args.docs, args.seed)
	write_corpus(args.output, documents)
	logger.info("Wrote %d %s documents to %s", len(documents), args.kind, args.output)
	return 0


def build_parser() -> argparse.ArgumentParser:
	parser = argparse.ArgumentParser(prog="coref", description="Maverick coreference toolkit")
	parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
	parser.add_argument("-v", "--verbose", action="store_true", help="log debug messages")
	commands = parser.add_subparsers(dest="command", required=True)

	train = commands.add_parser("train", help="train a model with teacher forcing")
	train.add_argument("--config", required=True, help="flat JSON run config")
	train.add_argument("--train", help="training corpus (.conll or .jsonl)")
	train.add_argument("--dev", help="validation corpus used for model selection")
	train.add_argument("--out", help="checkpoint path")
	train.add_argument("--log", help="write one JSON line per validation")
	train.add_argument("--epochs", type=int)
	train.add_argument("--seed", type=int)
	train.add_argument("--clusterer", choices=["s2e", "mes", "incr"])
	train.add_argument("--no-progress", action="store_true", help="hide the progress bar")
	train.set_defaults(func=cmd_train)

	predict = commands.add_parser("predict", help="write predicted clusters in the input's format")
	predict.add_argument("--model", required=True)
	predict.add_argument("--input", required=True)
	predict.add_argument("--output", required=True)
	predict.add_argument("--gold-mentions", action="store_true", help="cluster the gold mentions only")
	predict.add_argument("--threshold", type=float)
	predict.add_argument("--singletons", action="store_true", help="keep single-mention clusters")
	predict.set_defaults(func=cmd_predict)

	evaluate = commands.add_parser("evaluate", help="score predictions against gold annotations")
	evaluate.add_argument("--gold", required=True)
	evaluate.add_argument("--pred", required=True)
	evaluate.add_argument(
		"--no-singletons", action="store_true", help="drop single-mention clusters from gold and predictions"
	)
	evaluate.set_defaults(func=cmd_evaluate)

	stats = commands.add_parser("stats", help="candidate counts of enumeration versus start/end extraction")
	stats.add_argument("--input", required=True, nargs="+")
	stats.add_argument("--model", help="take predicted starts from this checkpoint instead of gold starts")
	stats.add_argument("--span-len-cap", type=int, default=30)
	stats.add_argument("--top-k", type=float, default=0.4)
	stats.add_argument("--xlsx", help="also write the table to a spreadsheet")
	stats.set_defaults(func=cmd_stats)

	synth = commands.add_parser("synth", help="write a synthetic corpus")
	synth.add_argument("--output", required=True)
	synth.add_argument("--docs", type=int, default=20)
	synth.add_argument("--seed", type=int, default=0)
	synth.add_argument("--kind", choices=sorted(GENERATORS), default="random")
	synth.set_defaults(func=cmd_synth)
	return parser


def main(argv: list[str] | None = None) -> int:
	args = build_parser().parse_args(argv)
	logging.basicConfig(
		level=logging.DEBUG if args.verbose else logging.INFO,
		format="%(levelname)s %(name)s: %(message)s",
	)
	try:
		return args.func(args)
	except CorefError as e:
		logger.error("%s", e)
		return 1
	except Exception:
		logger.exception("Unexpected error")
		return 2


if __name__ == "__main__":
	sys.exit(main())
