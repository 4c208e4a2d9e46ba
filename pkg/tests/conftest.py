import csv
import io
import os
from pathlib import Path

import pytest

from causegraph.ingest import COLUMNS, parse_dataset

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"

HEADERS = [h for h, _ in COLUMNS.values()]
KEYS = list(COLUMNS)

DEFAULTS = {
    "section": "1 Test section",
    "paragraph": "1.a",
    "series_ordinal": "1",
    "confidence": "/",
    "causation": "Yes",
    "target": "causes",
    "explicitness": "E",
    "cause_context": "/",
    "cause_belongs_to": "/",
    "effect_context": "/",
    "effect_belongs_to": "/",
    "relation_type": "Positive",
    "correlation": "Positive",
    "abbreviations": "/",
    "combined": "/",
    "nested": "/",
}


def make_csv(rows):
    """Rows are dicts keyed by canonical column keys; unset cells get defaults.

    ``cause``/``effect`` shortcuts fill both NP and No_Quantifier.
    """
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADERS)
    for r in rows:
        r = dict(r)
        for side in ("cause", "effect"):
            if side in r:
                val = r.pop(side)
                r.setdefault(f"{side}_np", val)
                r.setdefault(f"{side}_no_quantifier", val)
        cells = {**DEFAULTS, **r}
        w.writerow([cells.get(k, "/") for k in KEYS])
    return buf.getvalue().encode("utf-8")


def rel_rows(sid, text, edges, **extra):
    """One row per (cause, effect[, correlation[, relation_type]]) tuple."""
    out = []
    for e in edges:
        row = {"statement_link": sid, "statement": text, "cause": e[0], "effect": e[1]}
        if len(e) > 2:
            row["correlation"] = e[2]
        if len(e) > 3:
            row["relation_type"] = e[3]
        row.update(extra)
        out.append(row)
    return out


TABLE2_LINK = "https://kg-ipclimatec-reports.wikibase.cloud/entity/statement/Q31-91700757-4207-5de4-c0c1-5682b1be9db0"
TABLE2_TEXT = (
    "Climate change has caused substantial damages, and increasingly irreversible losses, in terrestrial, "
    "freshwater, cryospheric and coastal and open ocean ecosystems."
)
TABLE2_ROW = {
    "statement_link": TABLE2_LINK,
    "section": "2.1.2 Observed Climate System Changes and Impacts to Date",
    "paragraph": "2.1.2.c",
    "series_ordinal": "1",
    "statement": TABLE2_TEXT,
    "confidence": "High confidence",
    "causation": "Yes",
    "target": "has caused",
    "explicitness": "Explicit",
    "cause_np": "climate change",
    "cause_no_quantifier": "climate change",
    "effect_np": "increasingly irreversible losses in freshwater ecosystems",
    "effect_no_quantifier": "irreversible losses in freshwater ecosystems",
    "relation_type": "Positive",
    "correlation": "Positive",
}

FIGURE1_MEDIATORS = [
    "greater intensity of climatic extremes",
    "greater frequency of climatic extremes",
    "loss of cryospheric elements",
    "reduction of cryospheric elements",
    "changing precipitation patterns",
    "warming",
]


def figure1_edges():
    edges = [("climate change", m) for m in FIGURE1_MEDIATORS]
    for m in FIGURE1_MEDIATORS:
        edges.append((m, "food security", "Negative"))
        edges.append((m, "water security", "Negative"))
    edges.append(("food security", "efforts to meet SDGs"))
    edges.append(("water security", "efforts to meet SDGs"))
    return edges


WETLANDS_WHOLE = "combined effects of localised human pressures, sea level rise, warming and extreme climate events"


def wetlands_rows(sid="wetlands"):
    text = (
        "Around 50% of coastal wetlands have been lost over the last 100 years, as a result of the combined "
        "effects of localised human pressures, sea level rise, warming and extreme climate events."
    )
    causes = ["localised human pressures", "sea level rise", "warming", "extreme climate events"]
    return [
        {
            "statement_link": sid,
            "statement": text,
            "cause": c,
            "cause_belongs_to": WETLANDS_WHOLE,
            "effect_np": "loss of nearly 50% of coastal wetlands",
            "effect_no_quantifier": "loss of coastal wetlands",
            "combined": "Yes",
            "target": "as a result of",
        }
        for c in causes
    ]


def slow_onset_rows(sid="slow-onset"):
    text = (
        "Impacts in ecosystems from slow-onset processes such as ocean acidification, sea level rise or "
        "regional decreases in precipitation have also been attributed to human-induced climate change."
    )
    causes = ["ocean acidification", "sea level rise", "regional decreases in precipitation"]
    return [
        {
            "statement_link": sid,
            "statement": text,
            "cause": c,
            "cause_belongs_to": "slow-onset processes",
            "effect": "impacts in ecosystems",
            "combined": "No",
            "target": "from",
        }
        for c in causes
    ]


FIGURE1_TEXT = (
    "Climate change increases the intensity and frequency of climatic extremes, reduces and causes loss of "
    "cryospheric elements, changes precipitation patterns and warms, all of which threaten food and water "
    "security and thereby efforts to meet the SDGs."
)


@pytest.fixture
def table2_dataset():
    return parse_dataset(make_csv([TABLE2_ROW]))


@pytest.fixture
def figure1_dataset():
    return parse_dataset(make_csv(rel_rows("fig1", FIGURE1_TEXT, figure1_edges())))


@pytest.fixture
def wetlands_dataset():
    return parse_dataset(make_csv(wetlands_rows()))


@pytest.fixture
def slow_onset_dataset():
    return parse_dataset(make_csv(slow_onset_rows()))


def mixed_corpus_rows():
    """A small corpus touching every feature, used by analysis and CLI tests."""
    rows = [TABLE2_ROW]
    rows += rel_rows("fig1", FIGURE1_TEXT, figure1_edges())
    rows += wetlands_rows()
    rows += slow_onset_rows()
    rows.append({
        "statement_link": "nested",
        "statement": "Rising GHG emissions from land use change drive warming, which reduces crop yields.",
        "cause": "land use change",
        "effect": "GHG emissions",
        "effect_belongs_to": "warming",
        "nested": "Yes",
        "explicitness": "I",
        "target": "/",
        "abbreviations": "{GHG = Greenhouse gases}",
    })
    rows += rel_rows(
        "nested",
        "Rising GHG emissions from land use change drive warming, which reduces crop yields.",
        [("warming", "crop yields", "Negative", "Negative")],
        target="reduces",
    )
    rows.append({
        "statement_link": "noncausal",
        "statement": "Global surface temperature was 1.1 degrees above the pre-industrial level in 2011 to 2020.",
        "causation": "No",
        "target": "/",
        "explicitness": "/",
        "relation_type": "/",
        "correlation": "/",
    })
    return rows


@pytest.fixture
def mixed_csv():
    return make_csv(mixed_corpus_rows())


@pytest.fixture
def mixed_dataset(mixed_csv):
    return parse_dataset(mixed_csv)


def published_csv_path():
    env = os.environ.get("CLIMATECAUSE_CSV")
    if env and Path(env).is_file():
        return Path(env)
    p = FIXTURES / "ClimateCause.csv"
    return p if p.is_file() else None
