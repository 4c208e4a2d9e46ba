"""Corpus-level report combining counts, association tests, complexity and chains."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional

from .chains import DEFAULT_PRECEDENCE, chain_gold, corr_gold, parse_precedence
from .complexity import METRICS, ComplexityConfig, ComplexityProfile, compute_profiles
from .ingest import Dataset, IngestConfig, compute_counts, validate
from .readability import corpus_summary, load_easy_words
from .stats import DegenerateMargin, ZeroVariance, chi2_independence, pearson

logger = logging.getLogger(__name__)

__all__ = ["CorpusReport", "corpus_report", "cooccurrence", "exactly_k", "token_count", "round_floats"]


def token_count(text: str) -> int:
    return len(text.split())


def cooccurrence(profiles: Mapping[str, ComplexityProfile]) -> Dict[str, Dict[str, int]]:
    """Statements complex in both metric i and j (raw score > 0); diagonal = per metric."""
    out = {a: {b: 0 for b in METRICS} for a in METRICS}
    for p in profiles.values():
        active = p.nonzero_metrics()
        for a in active:
            for b in active:
                out[a][b] += 1
    return out


def exactly_k(profiles: Mapping[str, ComplexityProfile]) -> Dict[str, int]:
    out = {str(k): 0 for k in range(1, len(METRICS) + 1)}
    for p in profiles.values():
        k = len(p.nonzero_metrics())
        if k:
            out[str(k)] += 1
    return out


def round_floats(obj, digits: int = 4):
    if isinstance(obj, float):
        return round(obj, digits)
    if isinstance(obj, dict):
        return {k: round_floats(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(v, digits) for v in obj]
    return obj


@dataclass
class CorpusReport:
    counts: Dict[str, int]
    association: Dict[str, Optional[dict]]
    complexity: dict
    cooccurrence: Dict[str, Dict[str, int]]
    pearson: Optional[dict]
    tasks: Dict[str, Dict[str, int]]
    readability: Dict[str, Dict[str, float]] = field(default_factory=dict)
    config: dict = field(default_factory=dict)

    def to_dict(self, precise: bool = False) -> dict:
        out = {
            "counts": self.counts,
            "association": self.association,
            "complexity": self.complexity,
            "cooccurrence": self.cooccurrence,
            "pearson": self.pearson,
            "tasks": self.tasks,
            "readability": self.readability,
            "config": self.config,
        }
        return out if precise else round_floats(out)


def _association(dataset: Dataset) -> Dict[str, Optional[dict]]:
    out = {}
    for name, table in compute_counts(dataset).as_dict().items():
        try:
            res = chi2_independence(table)
        except DegenerateMargin:
            out[name] = None
            continue
        out[name] = {"table": [list(r) for r in table], "chi2": res.statistic, "p_value": res.p_value, "df": res.df}
    return out


def corpus_report(dataset: Dataset, config: ComplexityConfig = ComplexityConfig(),
                  profiles: Optional[Mapping[str, ComplexityProfile]] = None,
                  precedence=DEFAULT_PRECEDENCE, easy_words=None, dc_adjusted: bool = False,
                  ingest_config: IngestConfig = IngestConfig()) -> CorpusReport:
    counts = validate(dataset, ingest_config).counts
    if profiles is None:
        profiles = compute_profiles(dataset, config) if dataset.statements else {}
    complex_ids = [sid for sid, p in profiles.items() if p.complex]
    n_stmt = len(dataset.statements)
    complexity = {
        "statements": n_stmt,
        "complex_statements": len(complex_ids),
        "complex_share": len(complex_ids) / n_stmt if n_stmt else 0.0,
        "exactly_k": exactly_k(profiles),
        "max_total": max((p.total for p in profiles.values()), default=0.0),
        "max_raw": {m: max((p.raw[m] for p in profiles.values()), default=0.0) for m in METRICS},
        "nonzero": {m: sum(1 for p in profiles.values() if p.raw[m] > 0) for m in METRICS},
    }

    texts = {m.statement_id: m.text for m in dataset.statements}
    pear = None
    if len(complex_ids) >= 3:
        try:
            res = pearson([token_count(texts[s]) for s in complex_ids], [profiles[s].total for s in complex_ids])
            pear = {"r": res.statistic, "p_value": res.p_value, "n": len(complex_ids)}
        except ZeroVariance:
            logger.warning("pearson skipped: zero variance among complex statements")

    corr = {"positive": 0, "negative": 0}
    for pair in corr_gold(dataset):
        corr[pair.label] += 1
    member = {"yes": 0, "no": 0}
    position = {"start": 0, "middle": 0, "end": 0, "none": 0}
    for gold in chain_gold(dataset, precedence, include_nested=config.include_nested):
        for v in gold.membership.values():
            member[v] += 1
        for v in gold.position.values():
            position[v] += 1

    readability = {}
    if dataset.statements:
        words = easy_words if easy_words is not None else load_easy_words()
        readability = corpus_summary(dataset, words, dc_adjusted)

    return CorpusReport(
        counts=dict(counts),
        association=_association(dataset),
        complexity=complexity,
        cooccurrence=cooccurrence(profiles),
        pearson=pear,
        tasks={"corri": corr, "ccr-membership": member, "ccr-position": position},
        readability=readability,
        config={
            "log_base": config.log_base,
            "run_mode": config.run_mode.value,
            "include_nested": config.include_nested,
            "precedence": ">".join(parse_precedence(precedence)),
            "dc_adjusted": dc_adjusted,
        },
    )
