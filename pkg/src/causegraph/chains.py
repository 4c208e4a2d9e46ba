"""Causal chains in statement graphs and the gold labels derived from them."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence, Tuple

from .graph import CausalGraph, build_causal_graph, maximal_simple_paths

logger = logging.getLogger(__name__)

__all__ = [
    "DEFAULT_PRECEDENCE",
    "parse_precedence",
    "find_chains",
    "label_membership",
    "label_position",
    "ChainGold",
    "chain_gold",
    "CorrPair",
    "corr_gold",
    "membership_items",
    "position_items",
    "corr_items",
    "write_jsonl",
]

DEFAULT_PRECEDENCE = ("middle", "start", "end")
_ROLES = frozenset(DEFAULT_PRECEDENCE)


def parse_precedence(spec) -> Tuple[str, str, str]:
    """``"middle>start>end"`` or a sequence of the three role names."""
    parts = tuple(p.strip().lower() for p in (spec.split(">") if isinstance(spec, str) else spec))
    if len(parts) != 3 or set(parts) != _ROLES:
        raise ValueError(f"precedence must order start, middle and end, got {spec!r}")
    return parts


def find_chains(g: CausalGraph) -> List[Tuple[str, ...]]:
    """All maximal directed simple paths with at least three nodes, sorted."""
    succ = {n: g.successors(n) for n in g.nodes}
    pred = {n: g.predecessors(n) for n in g.nodes}
    return sorted(set(maximal_simple_paths(g.nodes, succ, pred, min_nodes=3)))


def _roles(chains: Iterable[Sequence[str]]) -> Dict[str, set]:
    roles: Dict[str, set] = {}
    for chain in chains:
        roles.setdefault(chain[0], set()).add("start")
        roles.setdefault(chain[-1], set()).add("end")
        for node in chain[1:-1]:
            roles.setdefault(node, set()).add("middle")
    return roles


def label_membership(g: CausalGraph, chains=None) -> Dict[str, str]:
    on_chain = {n for c in (find_chains(g) if chains is None else chains) for n in c}
    return {n: "yes" if n in on_chain else "no" for n in g.nodes}


def label_position(g: CausalGraph, precedence=DEFAULT_PRECEDENCE, chains=None) -> Dict[str, str]:
    order = parse_precedence(precedence)
    roles = _roles(find_chains(g) if chains is None else chains)
    out = {}
    for n in g.nodes:
        have = roles.get(n)
        out[n] = next(r for r in order if r in have) if have else "none"
    return out


@dataclass(frozen=True)
class ChainGold:
    statement_id: str
    chains: tuple
    membership: dict
    position: dict
    display: dict

    def counts(self) -> Dict[str, int]:
        out = {"yes": 0, "no": 0, "start": 0, "middle": 0, "end": 0, "none": 0}
        for v in self.membership.values():
            out[v] += 1
        for v in self.position.values():
            out[v] += 1
        return out


def chain_gold(dataset, precedence=DEFAULT_PRECEDENCE, include_nested: bool = True) -> List[ChainGold]:
    out = []
    for meta in dataset.statements:
        rels = dataset.relations_of(meta.statement_id)
        if not rels:
            continue
        g = build_causal_graph(rels, include_nested=include_nested, statement_id=meta.statement_id)
        chains = find_chains(g)
        out.append(ChainGold(
            meta.statement_id,
            tuple(chains),
            label_membership(g, chains),
            label_position(g, precedence, chains),
            dict(g.node_labels),
        ))
    return out


@dataclass(frozen=True)
class CorrPair:
    statement_id: str
    cause: str
    effect: str
    label: str
    row: int = -1


def corr_gold(dataset) -> List[CorrPair]:
    """One pair per relation row, in file order."""
    return [
        CorrPair(
            r.statement_id,
            r.cause.no_quantifier or r.cause.np,
            r.effect.no_quantifier or r.effect.np,
            r.correlation.value,
            r.row,
        )
        for r in dataset.relations
    ]


def corr_items(pairs: Sequence[CorrPair]) -> List[dict]:
    return [
        {"item_id": f"corri:{i:04d}", "statement_id": p.statement_id,
         "pair": [p.cause, p.effect], "label": p.label}
        for i, p in enumerate(pairs)
    ]


def _event_items(golds: Sequence[ChainGold], task: str, field: str) -> List[dict]:
    items = []
    for gold in golds:
        labels = getattr(gold, field)
        for node, label in labels.items():
            items.append({
                "item_id": f"{task}:{gold.statement_id}:{node}",
                "statement_id": gold.statement_id,
                "event": gold.display.get(node, node),
                "label": label,
            })
    return items


def membership_items(golds: Sequence[ChainGold]) -> List[dict]:
    return _event_items(golds, "ccr-membership", "membership")


def position_items(golds: Sequence[ChainGold]) -> List[dict]:
    return _event_items(golds, "ccr-position", "position")


def write_jsonl(items: Iterable[dict], stream) -> int:
    n = 0
    for item in items:
        stream.write(json.dumps(item, sort_keys=True, ensure_ascii=False) + "\n")
        n += 1
    return n
