import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypodb.causal import (
    FdSet,
    encode_fds,
    fd,
    maximum_matching,
    total_causal_mapping,
)
from hypodb.errors import NoPerfectMatching, RoleConflict
from hypodb.ingest import Equation, parse_descriptor

import helpers
import oracles


def golden(fdset):
    return {(tuple(sorted(item.determinant)), item.dependent)
            for item in fdset.fds}


def load(name):
    return parse_descriptor(helpers.fixture_bytes(name))


def test_growth_model_dependencies():
    s = load("malthus.xml")
    fdset = encode_fds(s, total_causal_mapping(s))
    assert golden(fdset) == {
        (("phi",), "x0"),
        (("phi",), "b"),
        (("b", "t", "upsilon", "x0"), "x"),
    }
    assert fdset.attributes == {"t", "x0", "b", "x", "phi", "upsilon"}


def test_saturating_model_dependencies():
    s = load("logistic.xml")
    fdset = encode_fds(s, total_causal_mapping(s))
    assert golden(fdset) == {
        (("phi",), "x0"),
        (("phi",), "K"),
        (("phi",), "b"),
        (("K", "b", "t", "upsilon", "x0"), "x"),
    }


def test_predator_prey_dependencies():
    s = load("lotka_volterra.xml")
    fdset = encode_fds(s, total_causal_mapping(s))
    assert golden(fdset) == {
        (("phi",), "x0"),
        (("phi",), "b"),
        (("phi",), "p"),
        (("phi",), "y0"),
        (("phi",), "d"),
        (("phi",), "r"),
        (("b", "p", "t", "upsilon", "x0", "y"), "x"),
        (("d", "r", "t", "upsilon", "x", "y0"), "y"),
    }


def test_ambiguity_flagged_only_where_it_exists():
    for name, expect in [("malthus.xml", False), ("logistic.xml", False),
                         ("lotka_volterra.xml", True)]:
        mapping = total_causal_mapping(load(name))
        flagged = any("AmbiguousOrdering" in w for w in mapping.warnings)
        assert flagged == expect, name
        count = len(oracles.all_perfect_matchings(load(name).equations))
        assert (count > 1) == expect, name


def test_fixture_mappings_are_valid_matchings():
    for name in ["malthus.xml", "logistic.xml", "lotka_volterra.xml"]:
        s = load(name)
        mapping = total_causal_mapping(s)
        assert mapping.pairs in oracles.all_perfect_matchings(s.equations)


def test_deterministic_tie_break_on_the_coupled_pair():
    s = load("lotka_volterra.xml")
    pairs = total_causal_mapping(s).pairs
    # f8 mentions x first (lexicographically smallest of its free vars)
    assert pairs["f8"] == "x"
    assert pairs["f9"] == "y"


@st.composite
def equations_with_perfect_matching(draw):
    n = draw(st.integers(min_value=1, max_value=6))
    symbols = [f"v{i}" for i in range(n)]
    eqs = []
    for i in range(n):
        extras = draw(st.sets(st.sampled_from(symbols), max_size=n - 1))
        eqs.append(Equation(f"e{i}", frozenset({symbols[i]}) | extras))
    return eqs


@settings(max_examples=200, deadline=None)
@given(equations_with_perfect_matching())
def test_matching_agrees_with_enumeration(eqs):
    every = oracles.all_perfect_matchings(eqs)
    assert every, "generator must guarantee a perfect matching"
    pairs = maximum_matching(eqs)
    assert pairs in every


def test_no_perfect_matching_is_an_error():
    eqs = [Equation("e1", frozenset({"a"})), Equation("e2", frozenset({"a"}))]
    s = load("malthus.xml")
    s.equations = eqs
    with pytest.raises(NoPerfectMatching, match="e2"):
        total_causal_mapping(s)


def test_role_conflicts_are_rejected():
    s = load("malthus.xml")
    # force the output onto an arity-1 equation
    s.equations = [
        Equation("f1", frozenset({"t"})),
        Equation("f2", frozenset({"x"})),
        Equation("f3", frozenset({"b"})),
        Equation("f4", frozenset({"x0", "t", "b", "x"})),
    ]
    with pytest.raises(RoleConflict):
        encode_fds(s, total_causal_mapping(s))


def test_fd_rejects_self_dependence():
    with pytest.raises(ValueError):
        fd({"a", "b"}, "a")


def test_fdset_round_trips_through_plain_objects():
    s = load("logistic.xml")
    fdset = encode_fds(s, total_causal_mapping(s))
    again = FdSet.from_obj(fdset.to_obj(), attributes=fdset.attributes)
    assert again.as_set() == fdset.as_set()
    assert again.attributes == fdset.attributes


def test_universe_may_exceed_mentioned_symbols():
    data = (b'<hypothesis id="9" name="bare">'
            b'<variable symbol="t" role="index"/>'
            b'<equation id="f1" vars="t"/></hypothesis>')
    s = parse_descriptor(data)
    fdset = encode_fds(s, total_causal_mapping(s))
    assert fdset.fds == []
    assert fdset.attributes == {"t", "phi", "upsilon"}
    assert fdset.mentioned() == set()
