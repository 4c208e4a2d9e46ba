"""Randomized checks against independent oracles (criterion 8 runs this module)."""

import itertools
import math
import random

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import rankdata

from causegraph.chains import find_chains, label_membership, label_position
from causegraph.complexity import METRICS, c_com, c_nest, normalize_and_total
from causegraph.graph import NestingGroups, SubordinationKind, build_subordination, graph_from_edges
from causegraph.ingest import parse_dataset, serialize_dataset
from causegraph.scoring import score_classification
from causegraph.stats import holm, kruskal_wallis, mcnemar

from conftest import make_csv

N_DAGS = 1000


def random_dag(rng, max_nodes=8):
    n = rng.randint(1, max_nodes)
    names = [f"n{i}" for i in range(n)]
    rng.shuffle(names)
    p = rng.uniform(0.1, 0.6)
    edges = [(names[i], names[j]) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    return names, edges


def oracle_chains(names, edges):
    """Simple paths with >= 3 nodes that are not a contiguous piece of a longer simple path."""
    g = nx.DiGraph()
    g.add_nodes_from(names)
    g.add_edges_from(edges)
    paths = set()
    for s, t in itertools.permutations(names, 2):
        for p in nx.all_simple_paths(g, s, t):
            paths.add(tuple(p))

    def inside(p, q):
        return len(p) < len(q) and any(q[i:i + len(p)] == p for i in range(len(q) - len(p) + 1))

    return sorted(p for p in paths if len(p) >= 3 and not any(inside(p, q) for q in paths))


def test_chains_match_bruteforce_on_random_dags():
    rng = random.Random(20240611)
    for _ in range(N_DAGS):
        names, edges = random_dag(rng)
        g = graph_from_edges(edges, nodes=names)
        expected = oracle_chains(names, edges)
        assert find_chains(g) == expected
        on_chain = {v for c in expected for v in c}
        mem = label_membership(g)
        assert {v for v, m in mem.items() if m == "yes"} == on_chain
        pos = label_position(g)
        for c in expected:
            assert pos[c[0]] == "start" and pos[c[-1]] == "end"
            assert all(pos[v] == "middle" for v in c[1:-1])


def kw_h(values, sizes):
    ranks = rankdata(values)
    n = len(values)
    h, i = 0.0, 0
    for s in sizes:
        r = ranks[i:i + s]
        h += r.sum() ** 2 / s
        i += s
    return 12 / (n * (n + 1)) * h - 3 * (n + 1)


def oracle_kw_p(groups):
    pooled = [v for g in groups for v in g]
    sizes = [len(g) for g in groups]
    observed = kw_h(pooled, sizes)
    n = len(pooled)
    hits = total = 0

    def assignments(remaining, k):
        if k == len(sizes) - 1:
            yield [sorted(remaining)]
            return
        for combo in itertools.combinations(sorted(remaining), sizes[k]):
            rest = set(remaining) - set(combo)
            for tail in assignments(rest, k + 1):
                yield [list(combo)] + tail

    for parts in assignments(set(range(n)), 0):
        vals = [pooled[i] for part in parts for i in part]
        total += 1
        if kw_h(vals, sizes) >= observed - 1e-9:
            hits += 1
    return hits / total


def test_kruskal_exact_matches_permutation_oracle():
    rng = random.Random(7)
    checked = 0
    while checked < 40:
        k = rng.randint(2, 3)
        sizes = [rng.randint(1, 3) for _ in range(k)]
        if sum(sizes) > 8:
            continue
        groups = [[rng.randint(0, 5) for _ in range(s)] for s in sizes]
        pooled = [v for g in groups for v in g]
        if len(set(pooled)) == 1:
            continue
        res = kruskal_wallis(groups)
        assert abs(res.p_value - oracle_kw_p(groups)) <= 0.02
        checked += 1


bools = st.lists(st.tuples(st.booleans(), st.booleans()), min_size=1, max_size=60)


@settings(max_examples=150, deadline=None)
@given(bools, st.booleans())
def test_mcnemar_symmetric_in_runs(pairs, exact):
    a = {str(i): x for i, (x, _) in enumerate(pairs)}
    b = {str(i): y for i, (_, y) in enumerate(pairs)}
    ab, ba = mcnemar(a, b, exact=exact), mcnemar(b, a, exact=exact)
    assert ab.statistic == pytest.approx(ba.statistic)
    assert ab.p_value == pytest.approx(ba.p_value)
    assert 0.0 <= ab.p_value <= 1.0


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=1, max_size=20))
def test_holm_monotone_and_dominates_raw(ps):
    adj = holm(ps)
    assert all(a >= p - 1e-15 and a <= 1.0 for a, p in zip(adj, ps))
    order = sorted(range(len(ps)), key=lambda i: ps[i])
    ranked = [adj[i] for i in order]
    assert all(x <= y + 1e-15 for x, y in zip(ranked, ranked[1:]))


labels = st.sampled_from(["start", "middle", "end", "none"])


@settings(max_examples=150, deadline=None)
@given(st.lists(st.tuples(labels, labels), min_size=1, max_size=40))
def test_f1_bounds(pairs):
    gold = {str(i): g for i, (g, _) in enumerate(pairs)}
    pred = {str(i): p for i, (_, p) in enumerate(pairs)}
    rep = score_classification(pred, gold, task="ccr-position")
    assert 0.0 <= rep.macro.f1 <= 1.0
    # harmonic mean lies between its arguments; macro F1 averages class F1s so is exempt
    for s in rep.per_class.values():
        lo, hi = sorted((s.precision, s.recall))
        assert lo - 1e-12 <= s.f1 <= hi + 1e-12


raw_rows = st.lists(st.tuples(*[st.floats(0, 50, allow_nan=False)] * len(METRICS)), min_size=1, max_size=12)


@settings(max_examples=150, deadline=None)
@given(raw_rows)
def test_normalization_endpoints(rows):
    raw = {f"s{i}": dict(zip(METRICS, r)) for i, r in enumerate(rows)}
    prof = normalize_and_total(raw)
    for m in METRICS:
        vals = [p.normalized[m] for p in prof.values()]
        assert all(0.0 <= v <= 1.0 for v in vals)
        if max(r[m] for r in raw.values()) > min(r[m] for r in raw.values()):
            assert min(vals) == 0.0 and max(vals) == 1.0
        else:
            assert set(vals) == {0.0}
    for p in prof.values():
        assert p.total == pytest.approx(sum(p.normalized.values()))


@settings(max_examples=150, deadline=None)
@given(st.lists(st.integers(1, 12), max_size=6), st.integers(0, 5), st.sampled_from([math.e, 2.0, 10.0]))
def test_nesting_monotone_in_group_size(sizes, which, base):
    groups = {f"g{i}": t for i, t in enumerate(sizes)}
    before = c_nest(NestingGroups(groups), base)
    key = f"g{which}"
    groups[key] = groups.get(key, 0) + 1
    assert c_nest(NestingGroups(groups), base) > before


members = st.lists(st.tuples(st.sampled_from("abcdef"), st.sampled_from("uvw")), min_size=1, max_size=10)


@settings(max_examples=100, deadline=None)
@given(members, st.tuples(st.sampled_from("abcdefgh"), st.sampled_from("uvwxy")))
def test_combined_score_grows_with_rows(pairs, extra):
    def score(ps):
        rows = [{"statement_link": "s", "statement": "t", "cause": c, "effect": f"e{i}", "cause_belongs_to": o,
                 "combined": "Yes"} for i, (c, o) in enumerate(ps)]
        ds = parse_dataset(make_csv(rows))
        return c_com(build_subordination(ds.relations, SubordinationKind.COMBINED))

    assert score(pairs + [extra]) >= score(pairs)


cell = st.text(alphabet='abcXYZ ,"\'-;', min_size=1, max_size=12).map(str.strip).filter(lambda s: s not in ("", "/"))


@st.composite
def corpora(draw):
    rows = []
    for s in range(draw(st.integers(1, 3))):
        text = draw(cell)
        for _ in range(draw(st.integers(1, 3))):
            rows.append({
                "statement_link": f"stmt{s}",
                "statement": text,
                "cause": draw(cell),
                "effect": draw(cell),
                "correlation": draw(st.sampled_from(["Positive", "Negative"])),
                "relation_type": draw(st.sampled_from(["Positive", "Negative"])),
                "explicitness": draw(st.sampled_from(["E", "I"])),
            })
    return rows


@settings(max_examples=60, deadline=None)
@given(corpora())
def test_ingest_serialize_roundtrip(rows):
    ds = parse_dataset(make_csv(rows))
    once = serialize_dataset(ds)
    again = parse_dataset(once)
    assert serialize_dataset(again) == once
    assert len(again.relations) == len(rows)
    assert [r.cause.no_quantifier for r in again.relations] == [r["cause"] for r in rows]
