import pytest

from hypodb.causal import encode_fds, total_causal_mapping
from hypodb.errors import (
    BadInput,
    DuplicateHypothesis,
    DuplicatePhenomenon,
    DuplicateRelation,
    DuplicateTarget,
    KeyViolation,
    UnknownAttribute,
    UnknownPhenomenon,
    UnknownRelation,
    UnknownSymbol,
)
from hypodb.ingest import parse_descriptor, parse_phenomenon
from hypodb.relstore import (
    Catalog,
    DeployedRelation,
    HypothesisEntry,
    RelationStore,
    TrialDataset,
    h0_relation,
    load_trial,
    parse_trial_csv,
)
from hypodb.simkit import OdeModel, TimeGrid, trial_csv
from hypodb.synthesis import fold_fds, synthesize_4c

import helpers


def hypothesis_entry(name, hid):
    structure = parse_descriptor(helpers.fixture_bytes(name))
    folded = fold_fds(encode_fds(structure, total_causal_mapping(structure)))
    return HypothesisEntry(hid, structure.name, structure,
                           synthesize_4c(folded, hid))


def deployed(name="logistic.xml", hid=2):
    entry = hypothesis_entry(name, hid)
    store = RelationStore()
    store.deploy_schema(entry.schema)
    return store, entry


def trial(series, params=None, hid=2, phi=1, index="t"):
    params = params if params is not None else {"x0": 30.0, "K": 80.0, "b": 1.0}
    return TrialDataset(hid, phi, params, series, index)


SERIES = [(0.0, {"x": 30.0}), (1.0, {"x": 50.0}), (2.0, {"x": 66.0})]


def test_deployment_prepends_the_trial_id_everywhere():
    store, _ = deployed()
    params = store.get("H_2^1")
    assert params.attributes == ["tid", "phi", "x0", "K", "b"]
    assert params.keys == [frozenset({"tid", "phi"})]
    series = store.get("H_2^2")
    assert series.attributes == ["tid", "phi", "upsilon", "t", "x"]
    assert series.keys == [frozenset({"tid", "phi", "upsilon", "t"})]


def test_deployment_refuses_to_clobber():
    store, entry = deployed()
    with pytest.raises(DuplicateRelation):
        store.deploy_schema(entry.schema)
    with pytest.raises(UnknownRelation):
        store.get("H_5^1")


def test_key_enforcement():
    rel = DeployedRelation("R", ["tid", "phi", "x"],
                           [frozenset({"tid", "phi"})])
    rel.insert({"tid": 1, "phi": 1, "x": 0.5})
    with pytest.raises(KeyViolation):
        rel.insert({"tid": 1, "phi": 1, "x": 0.7})
    rel.insert({"tid": 1, "phi": 2, "x": 0.5})
    assert len(rel.rows) == 2


def test_rows_must_match_the_attribute_set():
    rel = DeployedRelation("R", ["tid", "x"], [frozenset({"tid"})])
    with pytest.raises(UnknownSymbol, match="missing"):
        rel.insert({"tid": 1})
    with pytest.raises(UnknownSymbol, match="unexpected"):
        rel.insert({"tid": 1, "x": 0.0, "y": 1.0})
    assert rel.rows == []


def test_select_filters_and_orders_by_key():
    rel = DeployedRelation("R", ["tid", "phi", "x"],
                           [frozenset({"tid", "phi"})])
    for tid, phi, x in [(2, 1, 0.3), (1, 2, 0.1), (1, 1, 0.2), (2, 2, 0.4)]:
        rel.insert({"tid": tid, "phi": phi, "x": x})
    assert [(r["tid"], r["phi"]) for r in rel.select()] == [
        (1, 1), (1, 2), (2, 1), (2, 2)]
    assert [r["x"] for r in rel.select({"phi": 2})] == [0.1, 0.4]
    with pytest.raises(UnknownAttribute):
        rel.select({"nope": 1})


def test_csv_round_trip_is_bit_exact():
    rel = DeployedRelation("R", ["tid", "phi", "x"],
                           [frozenset({"tid", "phi"})])
    rel.insert({"tid": 1, "phi": 1, "x": 0.1 + 0.2})
    rel.insert({"tid": 2, "phi": 1, "x": 1.0 / 3.0})
    again = DeployedRelation.from_csv("R", rel.to_csv(), rel.keys)
    assert again.rows == rel.select()
    assert isinstance(again.rows[0]["tid"], int)
    assert again.rows[0]["x"] == 0.1 + 0.2


def test_csv_rejects_junk():
    with pytest.raises(BadInput, match="empty"):
        DeployedRelation.from_csv("R", "", [])
    with pytest.raises(BadInput, match="bad value"):
        DeployedRelation.from_csv("R", "tid,x\noops,1.0\n", [])


def test_trial_file_round_trip():
    model = OdeModel("logistic", {"x0": 30.0, "K": 80.0, "b": 1.0},
                     TimeGrid(0.0, 3.0, 1.0, 0.05))
    text = trial_csv(model)
    parameters, series, index_symbol, outputs = parse_trial_csv(text)
    assert parameters == {"x0": 30.0, "K": 80.0, "b": 1.0}
    assert index_symbol == "t"
    assert outputs == ["x"]
    assert [s for s, _ in series] == [0.0, 1.0, 2.0, 3.0]
    assert series[0][1]["x"] == 30.0


@pytest.mark.parametrize("text,match", [
    ("param:a\n1.0\n", "parameter rows and a series"),
    ("a,b\n1,2\nt,x\n0,1\n", "param:<symbol>"),
    ("param:a\n1.0,2.0\nt,x\n0,1\n", "does not match its header"),
    ("param:a\n1.0\nt\n0\n", "at least one output"),
    ("param:a\n1.0\nt,x\n0\n", "does not match"),
    ("param:a\n1.0\nt,x\n0,hi\n", "non-number"),
    ("param:a\nhi\nt,x\n0,1\n", "numbers"),
])
def test_trial_file_rejects_junk(text, match):
    with pytest.raises(BadInput, match=match):
        parse_trial_csv(text)


def test_trial_ids_count_per_phenomenon():
    store, entry = deployed()
    assert load_trial(store, entry, trial(SERIES, phi=1)) == 1
    assert load_trial(store, entry, trial(SERIES, phi=1)) == 2
    assert load_trial(store, entry, trial(SERIES, phi=7)) == 1
    assert load_trial(store, entry, trial(SERIES, phi=1)) == 3
    series_rows = store.get("H_2^2").select({"phi": 1, "tid": 3})
    assert [r["x"] for r in series_rows] == [30.0, 50.0, 66.0]
    assert all(r["upsilon"] == 2 for r in series_rows)


def test_trial_loading_is_atomic():
    store, entry = deployed()
    dupe = SERIES + [(1.0, {"x": 51.0})]
    with pytest.raises(KeyViolation, match="occurs twice"):
        load_trial(store, entry, trial(dupe))
    assert store.get("H_2^1").rows == []
    assert store.get("H_2^2").rows == []


@pytest.mark.parametrize("bad,match", [
    (trial(SERIES, params={"x0": 1.0}), "do not match"),
    (trial(SERIES, params={"x0": 1.0, "K": 2.0, "b": 3.0, "z": 4.0}),
     "do not match"),
    (trial([(0.0, {"y": 1.0})]), "outputs"),
    (trial(SERIES, index="x"), "not an index variable"),
])
def test_trial_loading_validates_against_the_structure(bad, match):
    store, entry = deployed()
    with pytest.raises(UnknownSymbol, match=match):
        load_trial(store, entry, bad)


def test_two_output_series_spread_over_both_columns():
    store, entry = deployed("lotka_volterra.xml", 3)
    series = [(1900.0, {"x": 30.0, "y": 4.0}), (1901.0, {"x": 44.0, "y": 5.0})]
    params = {"x0": 30.0, "b": 0.5, "p": 0.02, "y0": 4.0, "d": 0.75, "r": 0.02}
    load_trial(store, entry, trial(series, params=params, hid=3, phi=2))
    rows = store.get("H_3^2").select()
    assert [(r["t"], r["y"], r["x"]) for r in rows] == [
        (1900.0, 4.0, 30.0), (1901.0, 5.0, 44.0)]


def test_catalog_registry_guards():
    catalog = Catalog()
    catalog.add_phenomenon(parse_phenomenon(
        helpers.fixture_bytes("phenomenon_1.xml")))
    with pytest.raises(DuplicatePhenomenon):
        catalog.add_phenomenon(parse_phenomenon(
            helpers.fixture_bytes("phenomenon_1.xml")))
    entry = hypothesis_entry("malthus.xml", 1)
    catalog.add_hypothesis(entry)
    with pytest.raises(DuplicateHypothesis):
        catalog.add_hypothesis(entry)
    catalog.add_target(1, 1)
    with pytest.raises(DuplicateTarget):
        catalog.add_target(1, 1)
    with pytest.raises(UnknownPhenomenon):
        catalog.add_target(9, 1)
    assert catalog.targets_of(1) == [1]
    assert catalog.targets_of(9) == []


def test_parameter_and_output_relation_lookup():
    entry = hypothesis_entry("lotka_volterra.xml", 3)
    assert entry.parameter_relation() == "H_3^1"
    assert entry.output_relations() == ["H_3^2"]


def test_hypothesis_pool_relation_shape():
    h0 = h0_relation()
    assert h0.name == "H_0"
    assert h0.attributes == ["phi", "upsilon"]
    h0.insert({"phi": 1, "upsilon": 1})
    with pytest.raises(KeyViolation):
        h0.insert({"phi": 1, "upsilon": 1})
