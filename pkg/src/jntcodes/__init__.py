"""Strongly incidence-transitive codes in Johnson graphs.

Subpackages layer as ``perm`` / ``subsets`` (permutation groups and
k-subsets), ``catalog`` (group data), ``engine`` (classification) and
``analysis`` (code properties and table comparison).
"""

from .analysis import Code, CodeRecord, ExpectedTable, analyse, design_lambda, min_distance
from .catalog import CatalogEntry, load_catalog, validate_entry
from .engine import CandidateCode, chain_search, exhaustive_search
from .perm import GeneratedGroup, Permutation, build_chain
from .subsets import KSubset

__version__ = "0.1.0"

__all__ = [
    "CandidateCode", "CatalogEntry", "Code", "CodeRecord", "ExpectedTable", "GeneratedGroup",
    "KSubset", "Permutation", "analyse", "build_chain", "chain_search", "design_lambda",
    "exhaustive_search", "load_catalog", "min_distance", "validate_entry",
]
