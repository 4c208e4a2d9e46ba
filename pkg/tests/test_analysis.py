import pytest
from scipy import stats as sps

from causegraph.analysis import corpus_report, cooccurrence, exactly_k, round_floats, token_count
from causegraph.complexity import METRICS, ComplexityConfig, compute_profiles
from causegraph.ingest import parse_dataset

from conftest import FIGURE1_MEDIATORS, make_csv


@pytest.fixture
def report(mixed_dataset):
    return corpus_report(mixed_dataset).to_dict(precise=True)


def test_complexity_summary(report):
    cx = report["complexity"]
    # wetlands (com), slow-onset (ex), fig1 (corr), nested (nest, corr, pol)
    assert cx["statements"] == 6
    assert cx["complex_statements"] == 4
    assert cx["exactly_k"] == {"1": 3, "2": 0, "3": 1, "4": 0, "5": 0}
    assert cx["nonzero"] == {"com": 1, "ex": 1, "nest": 1, "corr": 2, "pol": 1}
    assert cx["max_raw"] == {"com": 5.0, "ex": 4.0, "nest": 1.0, "corr": 12.0, "pol": 1.0}
    assert cx["max_total"] == pytest.approx(2 + 1 / 12)


def test_cooccurrence_matrix(report):
    m = report["cooccurrence"]
    assert m["corr"]["nest"] == m["nest"]["pol"] == m["corr"]["pol"] == 1
    assert m["com"]["ex"] == 0
    for a in METRICS:
        assert m[a][a] == report["complexity"]["nonzero"][a]
        for b in METRICS:
            assert m[a][b] == m[b][a]
            assert m[a][b] <= m[a][a]


def test_exactly_k_sums_to_complex_count(mixed_dataset):
    profiles = compute_profiles(mixed_dataset, ComplexityConfig())
    assert sum(exactly_k(profiles).values()) == sum(p.complex for p in profiles.values())
    # off-diagonal pairs counted once per statement equal sum of C(k, 2)
    m = cooccurrence(profiles)
    off = sum(m[a][b] for i, a in enumerate(METRICS) for b in METRICS[i + 1:])
    assert off == sum(int(k) * (int(k) - 1) // 2 * n for k, n in exactly_k(profiles).items())


def test_association_against_scipy(report):
    for name, assoc in report["association"].items():
        ref = sps.chi2_contingency(assoc["table"], correction=False)
        assert assoc["chi2"] == pytest.approx(ref[0])
        assert assoc["p_value"] == pytest.approx(ref[1])
    assert report["association"]["explicitness"]["table"] == [[16, 1], [13, 0]]


def test_task_counts(report):
    t = report["tasks"]
    assert t["corri"] == {"positive": 17, "negative": 13}
    # fig1 mediators plus the two security nodes feeding the SDG end node
    assert t["ccr-position"]["middle"] == len(FIGURE1_MEDIATORS) + 2
    assert t["ccr-membership"]["yes"] == t["ccr-position"]["start"] + t["ccr-position"]["middle"] + t["ccr-position"]["end"]
    assert t["ccr-membership"]["no"] == t["ccr-position"]["none"]


def test_pearson_and_readability_present(report, mixed_dataset):
    assert report["pearson"]["n"] == 4
    assert -1 <= report["pearson"]["r"] <= 1
    assert set(report["readability"]) == {"FRE", "FKG", "CLI", "ARI", "DCRS"}
    assert report["counts"]["relations"] == 30


def test_empty_dataset_report():
    ds = parse_dataset(make_csv([]))
    rep = corpus_report(ds).to_dict()
    assert rep["complexity"]["complex_statements"] == 0
    assert rep["complexity"]["max_total"] == 0.0
    assert rep["pearson"] is None
    assert rep["readability"] == {}
    assert all(v is None for v in rep["association"].values())
    assert all(v == 0 for row in rep["cooccurrence"].values() for v in row.values())


def test_config_echoed(mixed_dataset):
    rep = corpus_report(mixed_dataset, ComplexityConfig(log_base=2.0), precedence="start>middle>end").to_dict()
    assert rep["config"]["log_base"] == 2.0
    assert rep["config"]["precedence"] == "start>middle>end"


def test_helpers():
    assert token_count("  a b\tc ") == 3
    assert round_floats({"x": [1.23456, (2.0, "s")]}) == {"x": [1.2346, [2.0, "s"]]}
