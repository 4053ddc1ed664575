app_name = "maverick_coref"
app_title = "Maverick Coref"
app_publisher = "Maverick Coref contributors"
app_description = "Coreference resolution with start/end mention extraction and three clustering heads"
app_license = "gpl-3.0"

# Corpus Readers
# --------------
# Resolved by file extension; anything else falls back to the default reader.

corpus_readers = {
	".jsonl": "maverick_coref.corpus.readers.jsonl.JSONLReader",
	".json": "maverick_coref.corpus.readers.jsonl.JSONLReader",
	".conll": "maverick_coref.corpus.readers.conll.CoNLLReader",
	".gold_conll": "maverick_coref.corpus.readers.conll.CoNLLReader",
	".v4_gold_conll": "maverick_coref.corpus.readers.conll.CoNLLReader",
}

default_corpus_reader = "maverick_coref.corpus.readers.conll.CoNLLReader"

# Clusterers
# ----------
# Mention clustering heads selectable with the `clusterer` config key.

clusterers = {
	"s2e": "maverick_coref.clusterers.s2e.S2EClusterer",
	"mes": "maverick_coref.clusterers.mes.MultiExpertClusterer",
	"incr": "maverick_coref.clusterers.incremental.IncrementalClusterer",
}

# Resources
# ---------

pronoun_lexicon = "data/pronouns.tsv"

# Speaker prefix tokens inserted whenever the speaker changes

speaker_token = "[SPK]"
speaker_separator = ":"
