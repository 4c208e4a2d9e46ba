import xml.etree.ElementTree as ET

import pytest

from causegraph.graph import build_causal_graph, graph_from_edges
from causegraph.prompts import (
    TASKS,
    GraphMode,
    MissingBinding,
    PromptSpec,
    UnknownVariant,
    build_prompt_items,
    encode_graph,
    format_event_list,
    gold_task,
    label_set,
    load_templates,
    parse_task,
    parse_variant,
    render_prompt,
    variants,
)

from conftest import GOLDEN

PAIR = {"e_i": "warming", "e_j": "food security"}


def golden(name):
    return (GOLDEN / name).read_text(encoding="utf-8")


def test_corri_zero_shot_golden():
    assert render_prompt(PromptSpec("CorrI", "0_1", PAIR)) == golden("corri_0_1.txt")


def test_corri_few_shot_golden():
    assert render_prompt(PromptSpec("CorrI", "F-1", PAIR)) == golden("corri_f_1.txt")


def test_ccr_member_adjacency_golden():
    g = graph_from_edges([("climate change", "warming"), ("warming", "food security")])
    text = render_prompt(PromptSpec("CCR_member", "A_4", {"e_i": "warming", "graph": encode_graph(g, GraphMode.ADJACENCY)}))
    assert text == golden("ccr_member_a_4.txt")
    assert text.startswith("You will be given a causal graph.")


def test_every_variant_renders():
    binds = {"e_i": "x", "e_j": "y", "s": "Some statement.", "event_list": "[x, y]", "graph": "x causes y"}
    tables = load_templates()
    assert set(tables) == set(TASKS)
    for task in TASKS:
        assert len(variants(task)) == 9
        for v in variants(task):
            text = render_prompt(PromptSpec(task, v, binds))
            assert "$" not in text and "\\" not in text and "``" not in text


def test_label_sets():
    assert label_set("CorrI", "0_2") == ["same", "opposite"]
    assert label_set("CorrI_RC", "CoT_3") == ["increase", "decrease"]
    assert label_set("CCR_position", "SN_5") == ["start", "middle", "end", "none"]
    assert label_set("CCR_ECI_member", "F_4") == ["Yes", "No"]


def test_unknown_variant_and_task():
    with pytest.raises(UnknownVariant):
        render_prompt(PromptSpec("CorrI", "X_9", PAIR))
    with pytest.raises(UnknownVariant):
        parse_task("CorrX")
    with pytest.raises(UnknownVariant):
        parse_variant("CCR_member", "0_4")


def test_missing_binding():
    with pytest.raises(MissingBinding) as err:
        render_prompt(PromptSpec("CorrI_RC", "0_1", PAIR))
    assert "s" in str(err.value)


def test_task_aliases():
    assert parse_task("corri+rc") == "CorrI_RC"
    assert parse_task("ccr-eci-position") == "CCR_ECI_position"
    assert parse_variant("CorrI", "cot-2") == "CoT_2"
    assert gold_task("CCR_ECI_member") == "ccr-membership"


def test_adjacency_encoding():
    g = graph_from_edges([("A", "B"), ("A", "C")])
    assert encode_graph(g, GraphMode.ADJACENCY) == "A causes B\nA causes C"


def test_single_node_encoding():
    g = graph_from_edges([("A", "B"), ("A", "C")])
    assert encode_graph(g, GraphMode.SINGLE_NODE) == "A causes: B, C\nB causes: nothing\nC causes: nothing"


def test_graphml_encoding_wellformed():
    g = graph_from_edges([("A", "B")])
    root = ET.fromstring(encode_graph(g, GraphMode.GRAPHML))
    ns = {"g": "http://graphml.graphdrawing.org/xmlns"}
    assert root.find("g:graph", ns).get("edgedefault") == "directed"
    empty = ET.fromstring(encode_graph(graph_from_edges([]), GraphMode.GRAPHML))
    assert empty.find("g:graph", ns).findall("g:edge", ns) == []


def test_event_list_format():
    assert format_event_list(["a", "b c"]) == "[a, b c]"


def test_build_items_match_gold_ids(figure1_dataset):
    from causegraph.chains import chain_gold, membership_items

    items = build_prompt_items(figure1_dataset, "CCR_member", "SN_5")
    gold_ids = [i["item_id"] for i in membership_items(chain_gold(figure1_dataset))]
    assert [i.item_id for i in items] == gold_ids
    assert "warming causes: food security, water security" in items[0].text


def test_build_eci_items_list_events(figure1_dataset):
    items = build_prompt_items(figure1_dataset, "CCR_ECI_position", "0_4")
    first = items[0]
    assert first.bindings["event_list"].startswith("[climate change, greater intensity")
    assert 'Statement: "Climate change increases' in first.text


def test_build_corri_rc_items(table2_dataset):
    items = build_prompt_items(table2_dataset, "CorrI_RC", "0_1")
    assert len(items) == 1
    assert "Statement: Climate change has caused" in items[0].text
    assert "between climate change and irreversible losses in freshwater ecosystems." in items[0].text


def test_graph_encoding_uses_display_labels(figure1_dataset):
    g = build_causal_graph(figure1_dataset.relations)
    assert "food security causes efforts to meet SDGs" in encode_graph(g, GraphMode.ADJACENCY)
