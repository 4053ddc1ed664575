# Copyright (c) 2025, Maverick Coref contributors
# For license information, please see license.txt

from maverick_coref.corpus.readers.base import BaseCorpusReader
from maverick_coref.corpus.readers.conll import CoNLLReader, parse_conll, write_conll
from maverick_coref.corpus.readers.jsonl import JSONLReader, parse_jsonl, write_jsonl

__all__ = [
	"BaseCorpusReader",
	"CoNLLReader",
	"JSONLReader",
	"parse_conll",
	"parse_jsonl",
	"write_conll",
	"write_jsonl",
]
