"""Toolkit for causal-annotation corpora of scientific statements.

Parses annotation tables into typed relations, builds per-statement causal
graphs, scores their structural complexity and readability, derives gold
labels for chain and correlation benchmarks, renders prompts, and runs the
significance tests used to compare model runs.
"""

from .model import AnnotatedRelation, EventSide, StatementMeta, normalize_event
from .ingest import Dataset, load_dataset, parse_dataset, serialize_dataset, validate
from .graph import CausalGraph, build_causal_graph
from .complexity import ComplexityConfig, compute_profiles
from .chains import find_chains, label_membership, label_position

__version__ = "0.1.0"

__all__ = [
    "AnnotatedRelation",
    "EventSide",
    "StatementMeta",
    "normalize_event",
    "Dataset",
    "load_dataset",
    "parse_dataset",
    "serialize_dataset",
    "validate",
    "CausalGraph",
    "build_causal_graph",
    "ComplexityConfig",
    "compute_profiles",
    "find_chains",
    "label_membership",
    "label_position",
]
