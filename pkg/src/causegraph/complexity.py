"""Five structural complexity metrics, min-max normalization and totals."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional, Sequence

from .graph import (
    CausalGraph,
    Label,
    NestingGroups,
    RunMode,
    SubordinationForest,
    SubordinationKind,
    build_causal_graph,
    build_nesting_groups,
    build_subordination,
    find_negative_runs,
    mixed_degree_counts,
)
from .ingest import Dataset

logger = logging.getLogger(__name__)

METRICS = ("com", "ex", "nest", "corr", "pol")

__all__ = [
    "METRICS",
    "ComplexityConfig",
    "ComplexityProfile",
    "c_com",
    "c_ex",
    "c_nest",
    "c_corr",
    "c_pol",
    "polarity_complexity",
    "raw_scores",
    "normalize_and_total",
    "compute_profiles",
    "parse_log_base",
]


def parse_log_base(value) -> float:
    """Accept ``e``, ``2``, ``10`` or any number > 1."""
    if isinstance(value, str):
        if value.strip().lower() in ("e", "ln", "natural"):
            return math.e
        value = float(value)
    base = float(value)
    if not base > 1:
        raise ValueError(f"log base must be > 1, got {value!r}")
    return base


@dataclass(frozen=True)
class ComplexityConfig:
    log_base: float = math.e
    run_mode: RunMode = RunMode.MAXIMAL
    include_nested: bool = True
    weights: Mapping[str, float] = field(default_factory=lambda: {m: 1.0 for m in METRICS})

    def __post_init__(self):
        if not self.log_base > 1:
            raise ValueError(f"log base must be > 1, got {self.log_base}")
        unknown = set(self.weights) - set(METRICS)
        if unknown:
            raise ValueError(f"unknown weight keys: {sorted(unknown)}")

    def weight(self, metric: str) -> float:
        return float(self.weights.get(metric, 1.0))


@dataclass(frozen=True)
class ComplexityProfile:
    statement_id: str
    raw: Dict[str, float]
    normalized: Dict[str, float]
    total: float
    weights: Dict[str, float]

    @property
    def complex(self) -> bool:
        return self.total > 0

    def nonzero_metrics(self) -> tuple:
        return tuple(m for m in METRICS if self.raw[m] > 0)


def _forest_score(forest: SubordinationForest) -> float:
    return float(forest.edge_count + len(forest.subgraphs))


def c_com(forest: SubordinationForest) -> float:
    if forest.kind is not SubordinationKind.COMBINED:
        raise ValueError("c_com needs a Combined forest")
    return _forest_score(forest)


def c_ex(forest: SubordinationForest) -> float:
    if forest.kind is not SubordinationKind.EXAMPLES:
        raise ValueError("c_ex needs an Examples forest")
    return _forest_score(forest)


def c_nest(groups: NestingGroups, log_base: float = math.e) -> float:
    if not log_base > 1:
        raise ValueError(f"log base must be > 1, got {log_base}")
    return float(sum(t + t * math.log(t, log_base) for t in groups.groups.values() if t > 0))


def polarity_complexity(g: CausalGraph, label: Label, mode: RunMode = RunMode.MAXIMAL) -> float:
    negatives = sum(
        1
        for e in g.edges
        if (e.label.correlation if label is Label.CORRELATION else e.label.relation_type).value == "negative"
    )
    runs = find_negative_runs(g, label, mode)
    v_in, v_out = mixed_degree_counts(g, label)
    return float(negatives + runs + v_in + v_out)


def c_corr(g: CausalGraph, mode: RunMode = RunMode.MAXIMAL) -> float:
    return polarity_complexity(g, Label.CORRELATION, mode)


def c_pol(g: CausalGraph, mode: RunMode = RunMode.MAXIMAL) -> float:
    return polarity_complexity(g, Label.RELATION_TYPE, mode)


def raw_scores(relations: Sequence, config: ComplexityConfig = ComplexityConfig(),
               statement_id: Optional[str] = None) -> Dict[str, float]:
    """The five raw metrics of one statement's relations."""
    g = build_causal_graph(relations, include_nested=config.include_nested, statement_id=statement_id)
    return {
        "com": c_com(build_subordination(relations, SubordinationKind.COMBINED)),
        "ex": c_ex(build_subordination(relations, SubordinationKind.EXAMPLES)),
        "nest": c_nest(build_nesting_groups(relations), config.log_base),
        "corr": c_corr(g, config.run_mode),
        "pol": c_pol(g, config.run_mode),
    }


def normalize_and_total(raw: Mapping[str, Mapping[str, float]],
                        weights: Optional[Mapping[str, float]] = None) -> Dict[str, ComplexityProfile]:
    """Min-max normalize each metric over all statements and sum weighted scores.

    A metric whose observed range is degenerate normalizes to 0 everywhere.
    """
    if not raw:
        raise ValueError("no statements to normalize")
    w = {m: 1.0 for m in METRICS}
    if weights:
        w.update({k: float(v) for k, v in weights.items()})
    lo = {m: min(r[m] for r in raw.values()) for m in METRICS}
    hi = {m: max(r[m] for r in raw.values()) for m in METRICS}
    out = {}
    for sid, r in raw.items():
        norm = {}
        for m in METRICS:
            span = hi[m] - lo[m]
            norm[m] = (r[m] - lo[m]) / span if span > 0 else 0.0
        total = sum(w[m] * norm[m] for m in METRICS)
        out[sid] = ComplexityProfile(sid, dict(r), norm, total, dict(w))
    return out


def compute_profiles(dataset: Dataset, config: ComplexityConfig = ComplexityConfig()) -> Dict[str, ComplexityProfile]:
    """Profiles for every statement, including ones without relations (all zero)."""
    raw = {}
    for meta in dataset.statements:
        sid = meta.statement_id
        raw[sid] = raw_scores(dataset.relations_of(sid), config, statement_id=sid)
    profiles = normalize_and_total(raw, config.weights)
    logger.info("computed complexity for %d statements, %d complex",
                len(profiles), sum(p.complex for p in profiles.values()))
    return profiles
