# Copyright (c) 2025, Maverick Coref contributors
# For license information, please see license.txt

"""Pipeline statistics tables: plain text for the terminal and an xlsx workbook."""

from dataclasses import dataclass
from pathlib import Path

import openpyxl
from openpyxl.styles import Font

from maverick_coref.extractor import PipelineStats

ROW_LABELS = {
	"mention extraction": ("enumeration", "start-end"),
	"regularization": ("(+) span-length", "(+) EOS"),
	"mention clustering": ("top-k", "pred-only"),
}

HEADER = ["corpus", "step", "enumeration scheme", "avg candidates", "start/end scheme", "avg candidates", "factor"]


@dataclass
class CorpusStats:
	name: str
	n_documents: int
	total: PipelineStats


def format_factor(factor: float | None) -> str:
	return "n/a" if factor is None else f"-{factor:.3f}x"


def stats_rows(corpus: CorpusStats) -> list[list]:
	averages = corpus.total.average(corpus.n_documents)
	factors = corpus.total.reduction_factors()
	rows = []
	for row, coarse, pipeline in PipelineStats.ROWS:
		coarse_label, pipeline_label = ROW_LABELS[row]
		rows.append(
			[
				corpus.name,
				row,
				coarse_label,
				round(averages[coarse], 3),
				pipeline_label,
				round(averages[pipeline], 3),
				format_factor(factors[row]),
			]
		)
	return rows


def combine(corpora: list[CorpusStats]) -> CorpusStats:
	total = PipelineStats()
	for corpus in corpora:
		total = total + corpus.total
	return CorpusStats("total", sum(c.n_documents for c in corpora), total)


def render_stats_table(corpora: list[CorpusStats]) -> str:
	"""Average candidates per document for each scheme and the reduction factor per step."""
	sections = [*corpora, combine(corpora)] if len(corpora) > 1 else list(corpora)
	lines = []
	for corpus in sections:
		lines.append(f"{corpus.name} ({corpus.n_documents} documents)")
		lines.append(f"  {'step':<20}{'enumeration':<18}{'avg':>12}  {'start/end':<12}{'avg':>12}  {'factor':>10}")
		for _, row, coarse_label, coarse, pipeline_label, pipeline, factor in stats_rows(corpus):
			lines.append(
				f"  {row:<20}{coarse_label:<18}{coarse:>12.3f}  {pipeline_label:<12}{pipeline:>12.3f}  {factor:>10}"
			)
		totals = ", ".join(f"{name}={value}" for name, value in vars(corpus.total).items())
		lines.append(f"  totals: {totals}")
		lines.append("")
	return "\n".join(lines)


def write_stats_xlsx(path: str | Path, corpora: list[CorpusStats]):
	workbook = openpyxl.Workbook()
	sheet = workbook.active
	sheet.title = "pipeline stats"
	sheet.append(HEADER)
	for cell in sheet[1]:
		cell.font = Font(bold=True)

	sections = [*corpora, combine(corpora)] if len(corpora) > 1 else list(corpora)
	for corpus in sections:
		for row in stats_rows(corpus):
			sheet.append(row)

	totals = workbook.create_sheet("totals")
	totals.append(["corpus", "documents", *vars(PipelineStats()).keys()])
	for corpus in sections:
		totals.append([corpus.name, corpus.n_documents, *vars(corpus.total).values()])
	workbook.save(path)
