"""Per-statement causal graphs and the structures the complexity metrics read.

Nodes are normalized ``no_quantifier`` strings. Node and edge order follow
first appearance in the input rows, so every traversal below is
deterministic for a given file.
"""

from __future__ import annotations

import enum
import logging
import xml.etree.ElementTree as ET
from collections import OrderedDict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .model import AnnotatedRelation, Combined, Explicitness, Polarity, normalize_event

logger = logging.getLogger(__name__)

__all__ = [
    "EdgeLabel",
    "Edge",
    "CausalGraph",
    "SubordinationKind",
    "Subgraph",
    "SubordinationForest",
    "NestingGroups",
    "Label",
    "RunMode",
    "build_causal_graph",
    "graph_from_edges",
    "build_subordination",
    "build_nesting_groups",
    "find_negative_runs",
    "mixed_degree_counts",
    "to_graphml",
    "from_graphml",
    "to_dot",
]


@dataclass(frozen=True)
class EdgeLabel:
    correlation: Polarity = Polarity.POSITIVE
    relation_type: Polarity = Polarity.POSITIVE
    explicitness: Explicitness = Explicitness.EXPLICIT


@dataclass(frozen=True)
class Edge:
    source: str
    target: str
    label: EdgeLabel = EdgeLabel()


class Label(enum.Enum):
    CORRELATION = "correlation"
    RELATION_TYPE = "relation_type"


class RunMode(enum.Enum):
    MAXIMAL = "maximal"
    OVERLAPPING = "overlapping"


@dataclass(frozen=True)
class CausalGraph:
    statement_id: str
    nodes: tuple
    edges: tuple
    node_labels: dict = field(default_factory=dict, compare=False)
    warnings: tuple = field(default=(), compare=False)

    @cached_property
    def _adjacency(self):
        succ: Dict[str, List[Edge]] = {n: [] for n in self.nodes}
        pred: Dict[str, List[Edge]] = {n: [] for n in self.nodes}
        for e in self.edges:
            succ[e.source].append(e)
            pred[e.target].append(e)
        return succ, pred

    def out_edges(self, node: str) -> List[Edge]:
        return self._adjacency[0][node]

    def in_edges(self, node: str) -> List[Edge]:
        return self._adjacency[1][node]

    def successors(self, node: str) -> List[str]:
        return [e.target for e in self.out_edges(node)]

    def predecessors(self, node: str) -> List[str]:
        return [e.source for e in self.in_edges(node)]

    def display(self, node: str) -> str:
        return self.node_labels.get(node, node)

    def __len__(self):
        return len(self.nodes)


def graph_from_edges(edges: Iterable, statement_id: str = "", nodes: Sequence[str] = ()) -> CausalGraph:
    """Build a graph from ``(u, v)`` or ``(u, v, EdgeLabel)`` tuples (test and tooling helper)."""
    order: "OrderedDict[str, None]" = OrderedDict((n, None) for n in nodes)
    out = []
    seen = set()
    for item in edges:
        u, v = item[0], item[1]
        label = item[2] if len(item) > 2 else EdgeLabel()
        order.setdefault(u)
        order.setdefault(v)
        if (u, v) in seen:
            continue
        seen.add((u, v))
        out.append(Edge(u, v, label))
    return CausalGraph(statement_id, tuple(order), tuple(out))


def build_causal_graph(
    relations: Sequence[AnnotatedRelation],
    include_nested: bool = True,
    statement_id: Optional[str] = None,
) -> CausalGraph:
    """One edge per distinct normalized (cause, effect) pair of a statement.

    Duplicate pairs keep the first-seen label; disagreeing duplicates and
    self-loops are reported in ``warnings`` (self-loops are dropped).
    """
    ids = {r.statement_id for r in relations}
    if len(ids) > 1:
        raise ValueError(f"relations span {len(ids)} statements")
    sid = statement_id if statement_id is not None else (ids.pop() if ids else "")

    nodes: "OrderedDict[str, None]" = OrderedDict()
    labels: Dict[str, str] = {}
    edges: "OrderedDict[Tuple[str, str], Edge]" = OrderedDict()
    warnings = []
    for rel in relations:
        if rel.nested and not include_nested:
            continue
        u, v = rel.cause.node, rel.effect.node
        if u == v:
            warnings.append(f"row {rel.row}: self-loop on {u!r} dropped")
            continue
        for node, side in ((u, rel.cause), (v, rel.effect)):
            if node not in nodes:
                nodes[node] = None
                labels[node] = " ".join((side.no_quantifier or side.np).split())
        label = EdgeLabel(rel.correlation, rel.relation_type, rel.explicitness)
        existing = edges.get((u, v))
        if existing is None:
            edges[(u, v)] = Edge(u, v, label)
        elif (existing.label.correlation, existing.label.relation_type) != (
            label.correlation,
            label.relation_type,
        ):
            warnings.append(f"row {rel.row}: label conflict on {u!r} -> {v!r}, keeping first")
    for w in warnings:
        logger.debug("%s: %s", sid, w)
    return CausalGraph(sid, tuple(nodes), tuple(edges.values()), labels, tuple(warnings))


class SubordinationKind(enum.Enum):
    COMBINED = "combined"
    EXAMPLES = "examples"


@dataclass(frozen=True)
class Subgraph:
    """A connected set of member -> overarching edges."""

    nodes: tuple
    edges: tuple  # (member, overarching) pairs

    @property
    def overarching(self) -> tuple:
        targets = {v for _, v in self.edges}
        return tuple(n for n in self.nodes if n in targets)

    @property
    def edge_count(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class SubordinationForest:
    kind: SubordinationKind
    subgraphs: tuple

    @property
    def edge_count(self) -> int:
        return sum(g.edge_count for g in self.subgraphs)

    def __len__(self):
        return len(self.subgraphs)


def _selected_for(kind: SubordinationKind, rel: AnnotatedRelation) -> bool:
    if kind is SubordinationKind.COMBINED:
        return rel.combined is Combined.YES
    return rel.combined is Combined.NO and not rel.nested and rel.has_overarching


def _components(edges: Sequence[Tuple[str, str]]) -> List[Subgraph]:
    parent: Dict[str, str] = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    order: "OrderedDict[str, None]" = OrderedDict()
    for u, v in edges:
        for n in (u, v):
            if n not in parent:
                parent[n] = n
                order[n] = None
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[rv] = ru
    groups: "OrderedDict[str, Tuple[List[str], List[Tuple[str, str]]]]" = OrderedDict()
    for n in order:
        groups.setdefault(find(n), ([], []))[0].append(n)
    for u, v in edges:
        groups[find(u)][1].append((u, v))
    return [Subgraph(tuple(ns), tuple(es)) for ns, es in groups.values()]


def build_subordination(relations: Sequence[AnnotatedRelation], kind: SubordinationKind) -> SubordinationForest:
    """Member -> overarching edges for one statement, split into components.

    ``COMBINED`` takes rows with Combined = yes; ``EXAMPLES`` takes rows with
    Combined = no, Nested = no and some Belongs_to. Edges are deduplicated.
    """
    edges: "OrderedDict[Tuple[str, str], None]" = OrderedDict()
    for rel in relations:
        if not _selected_for(kind, rel):
            continue
        for side in (rel.cause, rel.effect):
            if side.belongs_to:
                member, whole = side.node, normalize_event(side.belongs_to)
                if member != whole:
                    edges.setdefault((member, whole))
    return SubordinationForest(kind, tuple(_components(list(edges))))


@dataclass(frozen=True)
class NestingGroups:
    groups: dict  # nesting event -> number of relations nested within it

    def __len__(self):
        return len(self.groups)


def build_nesting_groups(relations: Sequence[AnnotatedRelation]) -> NestingGroups:
    groups: "OrderedDict[str, int]" = OrderedDict()
    for rel in relations:
        if rel.nested and rel.effect.belongs_to:
            key = normalize_event(rel.effect.belongs_to)
            groups[key] = groups.get(key, 0) + 1
    return NestingGroups(dict(groups))


def _polarity(edge: Edge, label: Label) -> Polarity:
    return edge.label.correlation if label is Label.CORRELATION else edge.label.relation_type


def _negative_successors(g: CausalGraph, label: Label) -> Dict[str, List[str]]:
    return {
        n: [e.target for e in g.out_edges(n) if _polarity(e, label) is Polarity.NEGATIVE]
        for n in g.nodes
    }


def find_negative_runs(g: CausalGraph, label: Label = Label.CORRELATION,
                       mode: RunMode = RunMode.MAXIMAL) -> int:
    """Count runs of two or more consecutive negative edges.

    ``MAXIMAL`` counts directed simple paths of negative edges that cannot be
    extended at either end by a node not already on them; a straight run of
    any length counts once, and every branch yields its own run.
    ``OVERLAPPING`` counts every simple negative path of length >= 2 edges.
    """
    nsucc = _negative_successors(g, label)
    if sum(len(v) for v in nsucc.values()) < 2:
        return 0
    if mode is RunMode.MAXIMAL:
        npred: Dict[str, List[str]] = {n: [] for n in g.nodes}
        for u, vs in nsucc.items():
            for v in vs:
                npred[v].append(u)
        return sum(1 for _ in maximal_simple_paths(g.nodes, nsucc, npred, min_nodes=3))
    return sum(1 for p in _simple_paths(g.nodes, nsucc) if len(p) >= 3)


def _simple_paths(nodes, succ):
    """Yield every simple path with at least one edge, depth-first."""
    path: List[str] = []
    on_path = set()

    def walk(node):
        path.append(node)
        on_path.add(node)
        if len(path) >= 2:
            yield tuple(path)
        for v in succ[node]:
            if v not in on_path:
                yield from walk(v)
        path.pop()
        on_path.discard(node)

    for start in nodes:
        yield from walk(start)


def maximal_simple_paths(nodes, succ, pred, min_nodes: int):
    """Yield maximal simple paths (as tuples) with at least ``min_nodes`` nodes.

    A path is maximal when every successor of its last node and every
    predecessor of its first node already lies on it.
    """
    path: List[str] = []
    on_path = set()

    def walk(node):
        path.append(node)
        on_path.add(node)
        nexts = [v for v in succ[node] if v not in on_path]
        if not nexts:
            if len(path) >= min_nodes and all(p in on_path for p in pred[path[0]]):
                yield tuple(path)
        else:
            for v in nexts:
                yield from walk(v)
        path.pop()
        on_path.discard(node)

    for start in nodes:
        if not succ[start]:
            continue
        yield from walk(start)


def mixed_degree_counts(g: CausalGraph, label: Label = Label.CORRELATION) -> Tuple[int, int]:
    """Nodes with both a positive and a negative incoming (resp. outgoing) edge."""

    def mixed(edges):
        signs = {_polarity(e, label) for e in edges}
        return len(signs) == 2

    v_in = sum(1 for n in g.nodes if mixed(g.in_edges(n)))
    v_out = sum(1 for n in g.nodes if mixed(g.out_edges(n)))
    return v_in, v_out


_GRAPHML_NS = "http://graphml.graphdrawing.org/xmlns"
_EDGE_KEYS = ("correlation", "relation_type", "explicitness")


def to_graphml(g: CausalGraph) -> str:
    """Serialize as GraphML: node id = normalized event, label = display text."""
    ET.register_namespace("", _GRAPHML_NS)
    root = ET.Element(f"{{{_GRAPHML_NS}}}graphml")
    ET.SubElement(root, f"{{{_GRAPHML_NS}}}key", id="label", attrib={"for": "node",
                  "attr.name": "label", "attr.type": "string"})
    for key in _EDGE_KEYS:
        ET.SubElement(root, f"{{{_GRAPHML_NS}}}key", id=key, attrib={"for": "edge",
                      "attr.name": key, "attr.type": "string"})
    graph = ET.SubElement(root, f"{{{_GRAPHML_NS}}}graph", id=g.statement_id or "G",
                          edgedefault="directed")
    for n in g.nodes:
        node = ET.SubElement(graph, f"{{{_GRAPHML_NS}}}node", id=n)
        ET.SubElement(node, f"{{{_GRAPHML_NS}}}data", key="label").text = g.display(n)
    for e in g.edges:
        edge = ET.SubElement(graph, f"{{{_GRAPHML_NS}}}edge", source=e.source, target=e.target)
        ET.SubElement(edge, f"{{{_GRAPHML_NS}}}data", key="correlation").text = e.label.correlation.value
        ET.SubElement(edge, f"{{{_GRAPHML_NS}}}data", key="relation_type").text = e.label.relation_type.value
        ET.SubElement(edge, f"{{{_GRAPHML_NS}}}data", key="explicitness").text = e.label.explicitness.value
    ET.indent(root)
    return ET.tostring(root, encoding="unicode", xml_declaration=True)


def from_graphml(text: str) -> CausalGraph:
    root = ET.fromstring(text)
    ns = {"g": _GRAPHML_NS}
    graph = root.find("g:graph", ns)
    if graph is None:
        raise ValueError("no <graph> element")
    nodes, labels = [], {}
    for node in graph.findall("g:node", ns):
        nid = node.get("id")
        nodes.append(nid)
        data = node.find("g:data[@key='label']", ns)
        labels[nid] = data.text if data is not None and data.text is not None else nid
    edges = []
    for edge in graph.findall("g:edge", ns):
        attrs = {d.get("key"): d.text for d in edge.findall("g:data", ns)}
        label = EdgeLabel(
            Polarity(attrs.get("correlation", "positive")),
            Polarity(attrs.get("relation_type", "positive")),
            Explicitness(attrs.get("explicitness", "E")),
        )
        edges.append(Edge(edge.get("source"), edge.get("target"), label))
    sid = graph.get("id", "")
    return CausalGraph("" if sid == "G" else sid, tuple(nodes), tuple(edges), labels)


def _dot_quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(g: CausalGraph) -> str:
    lines = [f"digraph {_dot_quote(g.statement_id or 'G')} {{"]
    for n in g.nodes:
        lines.append(f"  {_dot_quote(n)} [label={_dot_quote(g.display(n))}];")
    for e in g.edges:
        lines.append(
            f"  {_dot_quote(e.source)} -> {_dot_quote(e.target)} "
            f"[correlation={e.label.correlation.value}, relation_type={e.label.relation_type.value}, "
            f"explicitness={e.label.explicitness.value}];"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"
