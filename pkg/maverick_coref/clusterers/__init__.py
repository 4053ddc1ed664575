# Copyright (c) 2025, Maverick Coref contributors
# For license information, please see license.txt

from maverick_coref.clusterers.base import AntecedentClusterer, BaseClusterer
from maverick_coref.clusterers.categories import PairCategory, classify_pair_category
from maverick_coref.clusterers.decoding import (
	PairProbMatrix,
	UnionFind,
	decode_antecedents,
	drop_singletons_if_configured,
)
from maverick_coref.clusterers.incremental import (
	ClusterState,
	IncrementalClusterer,
	incr_assign,
	incr_cluster_score,
	mention_repr,
)
from maverick_coref.clusterers.mes import MultiExpertClusterer, mes_pair_prob
from maverick_coref.clusterers.s2e import S2EClusterer, s2e_pair_prob

__all__ = [
	"AntecedentClusterer",
	"BaseClusterer",
	"ClusterState",
	"IncrementalClusterer",
	"MultiExpertClusterer",
	"PairCategory",
	"PairProbMatrix",
	"S2EClusterer",
	"UnionFind",
	"classify_pair_category",
	"decode_antecedents",
	"drop_singletons_if_configured",
	"incr_assign",
	"incr_cluster_score",
	"mention_repr",
	"mes_pair_prob",
	"s2e_pair_prob",
]
