from __future__ import annotations

import json
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from conftest import chain_logic, expected_terms
from dast import terms as T
from dast.engine import (
    DerivationLimits,
    Lattice,
    WorkingMemory,
    apply_rule,
    derive,
    lattice_terms,
    match,
)
from dast.errors import DerivationError, LimitExceeded
from dast.logic import SemanticLogic, logic_id, parse_logic, quantize_text
from dast.terms import Atom

P = T.parse_term


def test_match_variable_head():
    assert match(P("$A(See)"), [P("How(See)")]) == [{"A": Atom("How")}]


def test_match_no_hit():
    assert match(P("Foo"), [P("Bar")]) == []


def test_match_subterm_hit():
    assert match(P("See(Unseen)"), [P("How(Ability(See(Unseen)))")]) == [{}]


def test_match_order_follows_memory_then_subterms():
    mem = WorkingMemory([P("f(a, g(b))"), P("g(c)")])
    subs = match(P("g($X)"), mem)
    assert subs == [{"X": Atom("b")}, {"X": Atom("c")}]


def test_apply_rule():
    logic = parse_logic("theory T:\n    rule: $A ==> Wrapped($A) And Other($A)\n")
    (rule,) = logic.rules
    assert apply_rule(rule, {"A": Atom("X")}) == [P("Wrapped(X)"), P("Other(X)")]


def test_apply_ground_rule():
    logic = parse_logic(
        "theory Cognitive:\n    rule: (See <> Unseen) And See(Unseen) ==> Wonder(See(Unseen))\n"
    )
    assert apply_rule(logic.rules[0], {}) == [P("Wonder(See(Unseen))")]


def test_chain_derivation():
    lat = derive([Atom("s0")], chain_logic(2))
    assert [n.level for n in lat.nodes] == [1, 2, 3]
    assert lat.nodes[-1].produced == (Atom("s2"),)
    assert lattice_terms(lat) == {Atom("s0"), Atom("s1"), Atom("s2")}


def test_empty_rule_set_gives_axioms_only():
    lat = derive([Atom("a"), Atom("b"), Atom("a")], SemanticLogic(()))
    assert [n.rule_id for n in lat.nodes] == ["axiom", "axiom"]
    assert all(n.level == 1 and n.premises == () for n in lat.nodes)


def test_initial_terms_must_be_ground_and_present():
    with pytest.raises(DerivationError):
        derive([], SemanticLogic(()))
    with pytest.raises(DerivationError):
        derive([P("$X")], SemanticLogic(()))


def test_iteration_limit_keeps_partial_lattice():
    with pytest.raises(LimitExceeded) as info:
        derive([Atom("s0")], chain_logic(10), DerivationLimits(max_iterations=3))
    assert len(info.value.lattice.nodes) == 4


def test_depth_limit():
    logic = parse_logic("theory Grow:\n    rule: $X ==> f($X)\n")
    with pytest.raises(LimitExceeded) as info:
        derive([Atom("a")], logic, DerivationLimits(max_term_depth=5))
    assert all(T.depth(t) <= 5 for t in lattice_terms(info.value.lattice))


def test_limits_must_be_positive():
    with pytest.raises(ValueError):
        DerivationLimits(0, 10)


def test_sl2_closure_contains_expected_deductions(sl2):
    lat = derive(quantize_text("#S", sl2), sl2, text="#S")
    closure = lattice_terms(lat)
    missing = [T.render_term(t) for t in expected_terms() if t not in closure]
    assert missing == []


def test_serialization_roundtrip(sl2):
    lat = derive(quantize_text("#S", sl2), sl2, text="#S")
    data = json.loads(lat.to_json())
    assert list(data) == sorted(data)
    assert set(data["nodes"][0]) == {"id", "level", "rule", "terms", "premises"}
    assert Lattice.from_json(lat.to_json()) == lat
    assert lat.logic_id == logic_id(sl2)


def _check_lattice_laws(lat, logic):
    by_id = {n.id: n for n in lat.nodes}
    for n in lat.nodes:
        if n.is_axiom:
            assert n.level == 1 and n.premises == ()
        else:
            assert n.premises
            assert all(p < n.id for p in n.premises)  # creation order is topological
            assert n.level == 1 + max(by_id[p].level for p in n.premises)
    counts = Counter(t for n in lat.nodes for t in n.produced)
    assert all(c == 1 for c in counts.values())
    # fixpoint: nothing new can fire
    closure = lattice_terms(lat)
    again = derive(list(closure), logic)
    assert lattice_terms(again) == closure


def test_lattice_laws_on_fixtures(sl1, sl2):
    for logic in (sl1, sl2):
        _check_lattice_laws(derive(quantize_text("#S", logic), logic), logic)


_SYMS = ["a", "b", "c", "d", "e"]


@st.composite
def random_logic(draw):
    lines = ["theory R:"]
    for _ in range(draw(st.integers(0, 6))):
        kind = draw(st.integers(0, 2))
        x, y = draw(st.sampled_from(_SYMS)), draw(st.sampled_from(_SYMS))
        if kind == 0:
            lines.append(f"    rule: {x} ==> {y}")
        elif kind == 1:
            lines.append(f"    rule: {x}($V) ==> {y}($V)")
        else:
            lines.append(f"    rule: {x} And {y} ==> {x}({y})")
    return parse_logic("\n".join(lines) + "\n")


@settings(max_examples=60, deadline=None)
@given(random_logic(), st.lists(st.sampled_from(_SYMS), min_size=1, max_size=3))
def test_random_derivations_obey_laws(logic, initial):
    lat = derive([Atom(s) for s in initial], logic)
    _check_lattice_laws(lat, logic)
    # determinism
    assert derive([Atom(s) for s in initial], logic).to_json() == lat.to_json()


@settings(max_examples=40, deadline=None)
@given(random_logic(), st.lists(st.sampled_from(_SYMS), min_size=1, max_size=3), st.integers(1, 4))
def test_rounds_are_monotone(logic, initial, k):
    init = [Atom(s) for s in initial]
    try:
        early = lattice_terms(derive(init, logic, DerivationLimits(max_iterations=k)))
    except LimitExceeded as exc:
        early = lattice_terms(exc.lattice)
    assert early <= lattice_terms(derive(init, logic))
