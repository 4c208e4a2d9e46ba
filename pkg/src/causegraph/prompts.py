"""Benchmark prompt templates, graph encodings and per-item prompt builders."""

from __future__ import annotations

import enum
import json
import logging
import string
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Dict, List, Mapping, Optional, Sequence

from .chains import chain_gold, corr_gold, corr_items, membership_items, position_items
from .graph import CausalGraph, build_causal_graph, to_graphml

logger = logging.getLogger(__name__)

__all__ = [
    "TASKS",
    "MissingBinding",
    "UnknownVariant",
    "GraphMode",
    "PromptSpec",
    "PromptItem",
    "load_templates",
    "parse_task",
    "parse_variant",
    "variants",
    "label_set",
    "gold_task",
    "render_prompt",
    "encode_graph",
    "format_event_list",
    "build_prompt_items",
]

TASKS = ("CorrI", "CorrI_RC", "CCR_member", "CCR_position", "CCR_ECI_member", "CCR_ECI_position")

# which gold file each prompt task is scored against
_GOLD_TASK = {
    "CorrI": "corri",
    "CorrI_RC": "corri",
    "CCR_member": "ccr-membership",
    "CCR_ECI_member": "ccr-membership",
    "CCR_position": "ccr-position",
    "CCR_ECI_position": "ccr-position",
}


class MissingBinding(KeyError):
    pass


class UnknownVariant(ValueError):
    pass


class GraphMode(enum.Enum):
    ADJACENCY = "A"
    SINGLE_NODE = "SN"
    GRAPHML = "ML"


@lru_cache(maxsize=1)
def load_templates() -> Dict[str, Dict[str, dict]]:
    text = resources.files("causegraph").joinpath("data/prompt_templates.json").read_text("utf-8")
    return json.loads(text)


def parse_task(task: str) -> str:
    key = task.strip().replace("-", "_").replace("+", "_").lower()
    for t in TASKS:
        if t.lower() == key:
            return t
    raise UnknownVariant(f"unknown task {task!r}; expected one of {', '.join(TASKS)}")


def parse_variant(task: str, variant: str) -> str:
    """Accept ``0-1`` or ``0_1`` (and any case for the prefix)."""
    task = parse_task(task)
    key = variant.strip().replace("-", "_")
    table = load_templates()[task]
    for v in table:
        if v.lower() == key.lower():
            return v
    raise UnknownVariant(f"{task} has no variant {variant!r}; known: {', '.join(sorted(table))}")


def variants(task: str) -> List[str]:
    return sorted(load_templates()[parse_task(task)])


def label_set(task: str, variant: str) -> List[str]:
    task = parse_task(task)
    return list(load_templates()[task][parse_variant(task, variant)]["labels"])


def gold_task(task: str) -> str:
    return _GOLD_TASK[parse_task(task)]


@dataclass(frozen=True)
class PromptSpec:
    task: str
    variant: str
    bindings: Mapping[str, str] = field(default_factory=dict)


def render_prompt(spec: PromptSpec) -> str:
    task = parse_task(spec.task)
    variant = parse_variant(task, spec.variant)
    template = string.Template(load_templates()[task][variant]["template"])
    needed = {m.group("named") or m.group("braced") for m in template.pattern.finditer(template.template)} - {None}
    missing = sorted(needed - set(spec.bindings))
    if missing:
        raise MissingBinding(f"{task} {variant} needs binding(s): {', '.join(missing)}")
    return template.substitute({k: str(v) for k, v in spec.bindings.items()})


def graph_mode_of(variant: str) -> Optional[GraphMode]:
    prefix = variant.split("_", 1)[0].upper()
    for mode in GraphMode:
        if mode.value == prefix:
            return mode
    return None


def encode_graph(g: CausalGraph, mode: GraphMode) -> str:
    """Textual graph encodings used inside CCR prompts; edges in input order."""
    if mode is GraphMode.ADJACENCY:
        return "\n".join(f"{g.display(e.source)} causes {g.display(e.target)}" for e in g.edges)
    if mode is GraphMode.SINGLE_NODE:
        lines = []
        for n in g.nodes:
            effects = [g.display(v) for v in g.successors(n)]
            lines.append(f"{g.display(n)} causes: {', '.join(effects) if effects else 'nothing'}")
        return "\n".join(lines)
    return to_graphml(g)


def format_event_list(events: Sequence[str]) -> str:
    return "[" + ", ".join(events) + "]"


@dataclass(frozen=True)
class PromptItem:
    item_id: str
    statement_id: str
    text: str
    bindings: dict


def build_prompt_items(dataset, task: str, variant: str, include_nested: bool = True) -> List[PromptItem]:
    """One rendered prompt per gold item, with item ids matching the gold files."""
    task = parse_task(task)
    variant = parse_variant(task, variant)
    texts = {m.statement_id: m.text for m in dataset.statements}
    out = []
    if task in ("CorrI", "CorrI_RC"):
        for item in corr_items(corr_gold(dataset)):
            b = {"e_i": item["pair"][0], "e_j": item["pair"][1]}
            if task == "CorrI_RC":
                b["s"] = texts[item["statement_id"]]
            out.append(PromptItem(item["item_id"], item["statement_id"], render_prompt(PromptSpec(task, variant, b)), b))
        return out

    golds = chain_gold(dataset, include_nested=include_nested)
    items = membership_items(golds) if gold_task(task) == "ccr-membership" else position_items(golds)
    graph_text: Dict[str, str] = {}
    event_lists: Dict[str, str] = {}
    mode = graph_mode_of(variant)
    for gold in golds:
        sid = gold.statement_id
        if task.startswith("CCR_ECI"):
            event_lists[sid] = format_event_list([gold.display[n] for n in gold.membership])
        else:
            g = build_causal_graph(dataset.relations_of(sid), include_nested=include_nested, statement_id=sid)
            graph_text[sid] = encode_graph(g, mode)
    for item in items:
        sid = item["statement_id"]
        b = {"e_i": item["event"]}
        if task.startswith("CCR_ECI"):
            b.update(s=texts[sid], event_list=event_lists[sid])
        else:
            b["graph"] = graph_text[sid]
        out.append(PromptItem(item["item_id"], sid, render_prompt(PromptSpec(task, variant, b)), b))
    return out
