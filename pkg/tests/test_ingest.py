import pytest

from hypodb.errors import (
    BadInput,
    DuplicateEquationId,
    MalformedXml,
    UndeclaredVariable,
    UnknownElement,
)
from hypodb.ingest import (
    Apply,
    Ci,
    Cn,
    expression_symbols,
    parse_descriptor,
    parse_phenomenon,
    serialize_descriptor,
    validate_structure,
)

import helpers


def descriptor(body, hid=7, name="demo"):
    return f'<hypothesis id="{hid}" name="{name}">{body}</hypothesis>'.encode()


VARIABLES = (
    '<variable symbol="t" role="index"/>'
    '<variable symbol="a" role="parameter"/>'
    '<variable symbol="x" role="output"/>'
)


def test_parses_fixture_descriptors():
    for name, hid, count in [("malthus.xml", 1, 4), ("logistic.xml", 2, 5),
                             ("lotka_volterra.xml", 3, 9)]:
        s = parse_descriptor(helpers.fixture_bytes(name))
        assert s.hypothesis_id == hid
        assert len(s.equations) == len(s.declarations) == count
        assert validate_structure(s).valid


def test_roles_and_symbols():
    s = parse_descriptor(helpers.fixture_bytes("lotka_volterra.xml"))
    assert s.variables_with_role("index") == ["t"]
    assert s.variables_with_role("output") == ["x", "y"]
    assert s.roles()["b"] == "parameter"
    assert s.symbols() == {"t", "x0", "b", "p", "y0", "d", "r", "x", "y"}


def test_valued_subsidiary_equation():
    s = parse_descriptor(helpers.fixture_bytes("malthus.xml"))
    by_id = {e.eq_id: e for e in s.equations}
    assert by_id["f2"].value == 30.0
    assert by_id["f2"].variables == frozenset({"x0"})
    assert by_id["f4"].expression is None
    assert by_id["f4"].variables == frozenset({"x", "t", "x0", "b"})


def test_diff_with_bvar_counts_the_bound_variable():
    data = descriptor(
        VARIABLES
        + '<equation id="f1" vars="t"/>'
        + '<equation id="f2" vars="a"/>'
        + '<equation id="f3"><math><apply><eq/>'
        + "<apply><diff/><bvar><ci>t</ci></bvar><ci>x</ci></apply>"
        + "<apply><times/><ci>a</ci><ci>x</ci></apply>"
        + "</apply></math></equation>"
    )
    s = parse_descriptor(data)
    eq = {e.eq_id: e for e in s.equations}["f3"]
    assert eq.variables == frozenset({"t", "a", "x"})
    assert eq.value is None


def test_expression_symbols_walks_nested_applies():
    expr = Apply("plus", (Ci("a"), Apply("power", (Ci("x"), Cn(2.0)))))
    assert expression_symbols(expr) == {"a", "x"}


def test_serialize_round_trip():
    for name in ["malthus.xml", "logistic.xml", "lotka_volterra.xml"]:
        s = parse_descriptor(helpers.fixture_bytes(name))
        assert parse_descriptor(serialize_descriptor(s)) == s


def test_round_trip_keeps_mathml_expressions():
    data = descriptor(
        VARIABLES
        + '<equation id="f1" vars="t"/>'
        + '<equation id="f2"><math><apply><eq/><ci>a</ci>'
        + "<apply><divide/><cn>1</cn><cn>4</cn></apply></apply></math></equation>"
        + '<equation id="f3" vars="x t a"/>'
    )
    s = parse_descriptor(data)
    again = parse_descriptor(serialize_descriptor(s))
    assert again.equations[1].expression == s.equations[1].expression


@pytest.mark.parametrize("data,error", [
    (b"not xml at all", MalformedXml),
    (b"<equations/>", MalformedXml),
    (b'<hypothesis id="zero" name="n"/>', MalformedXml),
    (b'<hypothesis id="0" name="n"/>', MalformedXml),
    (b'<hypothesis id="-3" name="n"/>', MalformedXml),
])
def test_malformed_envelopes(data, error):
    with pytest.raises(error):
        parse_descriptor(data)


def test_duplicate_variable_symbol():
    data = descriptor('<variable symbol="a" role="parameter"/>' * 2)
    with pytest.raises(MalformedXml, match="duplicate variable"):
        parse_descriptor(data)


def test_unknown_role():
    data = descriptor('<variable symbol="a" role="thing"/>')
    with pytest.raises(MalformedXml, match="unknown role"):
        parse_descriptor(data)


def test_duplicate_equation_id():
    data = descriptor(VARIABLES + '<equation id="f1" vars="t"/>' * 2)
    with pytest.raises(DuplicateEquationId):
        parse_descriptor(data)


def test_equation_needs_vars_or_math_not_both():
    body = VARIABLES + '<equation id="f1" vars="t"><math><ci>t</ci></math></equation>'
    with pytest.raises(MalformedXml, match="both"):
        parse_descriptor(descriptor(body))
    with pytest.raises(MalformedXml, match="exactly one"):
        parse_descriptor(descriptor(VARIABLES + '<equation id="f1"/>'))


def test_unsupported_operator_is_loud():
    body = (
        VARIABLES
        + '<equation id="f1"><math><apply><sin/><ci>t</ci></apply></math></equation>'
    )
    with pytest.raises(UnknownElement, match="sin"):
        parse_descriptor(descriptor(body))


def test_unknown_descriptor_element():
    with pytest.raises(UnknownElement):
        parse_descriptor(descriptor("<metadata/>"))


def test_undeclared_variable_in_equation():
    data = descriptor(VARIABLES + '<equation id="f1" vars="t q"/>')
    with pytest.raises(UndeclaredVariable, match="q"):
        parse_descriptor(data)


def test_bad_leaves():
    with pytest.raises(MalformedXml):
        parse_descriptor(descriptor(
            VARIABLES + '<equation id="f1"><math><ci> </ci></math></equation>'))
    with pytest.raises(MalformedXml):
        parse_descriptor(descriptor(
            VARIABLES + '<equation id="f1"><math><cn>one</cn></math></equation>'))


def test_validity_report_lists_all_violations():
    s = parse_descriptor(descriptor(
        VARIABLES
        + '<equation id="f1" vars="t"/>'
        + '<equation id="f2" vars="t"/>'
    ))
    report = validate_structure(s)
    assert not report.valid
    assert "NoPerfectMatching" in report.reasons
    assert "CountMismatch" in report.reasons
    assert "OrphanVariable" in report.reasons


def test_valid_structure_has_empty_reasons():
    s = parse_descriptor(helpers.fixture_bytes("logistic.xml"))
    assert validate_structure(s).reasons == []


def test_phenomenon_xml_and_json():
    xml = parse_phenomenon(helpers.fixture_bytes("phenomenon_1.xml"))
    assert (xml.phenomenon_id, xml.description[:13]) == (1, "US population")
    obj = parse_phenomenon(helpers.fixture_bytes("phenomenon_2.json"))
    assert obj.phenomenon_id == 2
    assert "Lynx" in obj.description


@pytest.mark.parametrize("data", [
    b'<phenomenon id="x"/>',
    b'<phenomenon id="0"/>',
    b'{"id": "two"}',
    b'{"description": "no id"}',
    b"{broken",
    b"\xff\xfe",
])
def test_phenomenon_rejects_malformed_input(data):
    with pytest.raises((BadInput, MalformedXml)):
        parse_phenomenon(data)
