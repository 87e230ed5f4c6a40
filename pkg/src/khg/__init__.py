"""Quasi-random k-graphs, F-factors, and the finite objects around them."""

__version__ = "0.1.0"

from .core import Hypergraph, KhgFormatError, dumps, loads, read_khg, write_khg
from .constructions import binomial, catalog, cone_augment, triangle_cone
from .denseness import dot_min_slack_exact, edge_min_slack_exact, is_dense, sampled_min_slack
from .embed import cover_check, good_pair, good_partner_exists, reachable_count
from .lattice import lattice_from_generators, robust_vectors, trans_decision
from .partite import gcd_size_set, realisations, size_set
from .tiling import factor_exists, max_tiling, verify_certificate

__all__ = [
    "Hypergraph", "KhgFormatError", "dumps", "loads", "read_khg", "write_khg",
    "binomial", "catalog", "cone_augment", "triangle_cone",
    "dot_min_slack_exact", "edge_min_slack_exact", "is_dense", "sampled_min_slack",
    "cover_check", "good_pair", "good_partner_exists", "reachable_count",
    "lattice_from_generators", "robust_vectors", "trans_decision",
    "gcd_size_set", "realisations", "size_set",
    "factor_exists", "max_tiling", "verify_certificate",
]
