import pytest

from causegraph.model import (
    IPCC_ABBREVIATIONS,
    ConfidenceLevel,
    EmptyEvent,
    EventSide,
    StatementMeta,
    format_abbreviations,
    normalize_event,
    parse_abbreviations,
    parse_confidence,
    resolve_abbreviations,
)


def test_normalize_collapses_and_casefolds():
    assert normalize_event("  GHG   emissions ") == "ghg emissions"
    assert normalize_event("Warming\tand\nrain") == "warming and rain"
    assert normalize_event("Efforts to meet SDGs") == "efforts to meet sdgs"


@pytest.mark.parametrize("raw", ["", "   ", "\n\t"])
def test_normalize_empty_raises(raw):
    with pytest.raises(EmptyEvent):
        normalize_event(raw)


def test_event_side_node_prefers_no_quantifier():
    side = EventSide(np="increasingly irreversible losses", no_quantifier="Irreversible  losses")
    assert side.node == "irreversible losses"
    assert EventSide(np="Warming", no_quantifier="").node == "warming"


def test_statement_meta_rejects_bad_values():
    with pytest.raises(ValueError):
        StatementMeta("", "text")
    with pytest.raises(ValueError):
        StatementMeta("id", "   ")
    with pytest.raises(ValueError):
        StatementMeta("id", "text", series_ordinal=0)


def test_confidence_parsing():
    c = parse_confidence("High confidence")
    assert c.level is ConfidenceLevel.HIGH and c.known
    assert parse_confidence("medium-to-high").level is ConfidenceLevel.MEDIUM_TO_HIGH
    assert parse_confidence("VERY HIGH CONFIDENCE").level is ConfidenceLevel.VERY_HIGH
    odd = parse_confidence("virtually certain")
    assert odd.raw == "virtually certain" and not odd.known
    assert parse_confidence("/") is None and parse_confidence("") is None


def test_confidence_levels_ordered():
    assert ConfidenceLevel.LOW < ConfidenceLevel.MEDIUM < ConfidenceLevel.VERY_HIGH


def test_resolve_whole_tokens_only():
    table = [("GHG", "greenhouse gases"), ("CO2", "carbon dioxide")]
    assert resolve_abbreviations("GHG emissions", table) == "greenhouse gases emissions"
    assert resolve_abbreviations("GHGs and CO2-FFI", table) == "GHGs and CO2-FFI"


def test_resolve_prefers_longest_short_form():
    text = "CO2-FFI rose while CO2 fell"
    out = resolve_abbreviations(text, IPCC_ABBREVIATIONS)
    assert out.startswith("Carbon dioxide from fossil fuels and industrial processes rose")
    assert out.endswith("while Carbon dioxide fell")


def test_resolve_single_pass():
    # the long form contains a short form; it must not be expanded again
    assert resolve_abbreviations("A", [("A", "B A"), ("B", "x")]) == "B A"


def test_resolve_empty_short_form_rejected():
    with pytest.raises(ValueError):
        resolve_abbreviations("x", [("", "nothing")])


def test_abbreviation_table_spelling():
    longs = dict(IPCC_ABBREVIATIONS)
    assert longs["CO2"] == "Carbon dioxide"
    assert len(IPCC_ABBREVIATIONS) == 12


def test_parse_and_format_abbreviations():
    pairs = parse_abbreviations("{GHG = Greenhouse gases; AFOLU = Agriculture, Forestry, and Other Land Use}")
    assert pairs == (("GHG", "Greenhouse gases"), ("AFOLU", "Agriculture, Forestry, and Other Land Use"))
    assert parse_abbreviations(format_abbreviations(pairs)) == pairs
    assert parse_abbreviations("/") == ()
    assert format_abbreviations(()) == "/"
    assert parse_abbreviations("GHG") == (("GHG", ""),)
