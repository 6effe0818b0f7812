import itertools

import pytest
from hypothesis import given, settings, strategies as st

from stablerel.errors import TooLargeError
from stablerel.grounder import GroundAtom, GroundProgram, GroundRule, ground
from stablerel.stable import (
    enumerate_stable_models,
    find_stable_model,
    ground_strata,
    is_stable,
    minimal_model,
    reduct,
    show_model,
    stratified_eval,
)


def prog(*rules):
    """Build a ground program from ``(head, [pos...], [neg...])`` triples of names."""
    return GroundProgram.from_rules(
        [GroundRule(GroundAtom(h), tuple(map(GroundAtom, pos)), tuple(map(GroundAtom, neg))) for h, pos, neg in rules]
    )


def named(pi, models):
    return {frozenset(str(pi.atoms[i]) for i in m) for m in models}


def ids(pi, *names):
    return frozenset(pi.index[GroundAtom(n)] for n in names)


# -- a reference implementation written straight from the definitions --------------


def ref_least(definite_rules):
    true = set()
    while True:
        new = {h for h, pos in definite_rules if set(pos) <= true} - true
        if not new:
            return true
        true |= new


def ref_stable_models(rules, atoms):
    out = set()
    for k in range(len(atoms) + 1):
        for combo in itertools.combinations(atoms, k):
            m = set(combo)
            red = [(h, pos) for h, pos, neg in rules if not set(neg) & m]
            if ref_least(red) == m:
                out.add(frozenset(m))
    return out


# -- examples ---------------------------------------------------------------------


def test_reduct_example():
    pi = prog(("p", [], ["q"]), ("q", [], ["p"]), ("r", ["p"], []))
    red = reduct(pi, ids(pi, "p"))
    assert [str(r) for r in red.rules] == ["p.", "r :- p."]
    assert red.atoms == pi.atoms


def test_minimal_model_and_stability():
    pi = prog(("a", [], []), ("b", ["a"], []), ("c", ["d"], []))
    assert named(pi, [minimal_model(pi)]) == {frozenset({"a", "b"})}
    assert is_stable(pi, ids(pi, "a", "b"))
    assert not is_stable(pi, ids(pi, "a", "b", "c"))
    with pytest.raises(ValueError):
        minimal_model(prog(("a", [], ["b"])))


def test_even_loop_has_two_models():
    pi = prog(("p", [], ["q"]), ("q", [], ["p"]))
    assert named(pi, enumerate_stable_models(pi)) == {frozenset({"p"}), frozenset({"q"})}
    assert named(pi, enumerate_stable_models(pi, oracle=True)) == {frozenset({"p"}), frozenset({"q"})}


def test_odd_loop_has_none(unsat):
    pi = ground(unsat.program, set(unsat.program.relations))
    assert enumerate_stable_models(pi) == []
    assert enumerate_stable_models(pi, oracle=True) == []


def test_find_stable_model_constraints():
    pi = prog(("p", [], ["q"]), ("q", [], ["p"]), ("r", ["p"], []))
    m = find_stable_model(pi, must=ids(pi, "r"))
    assert named(pi, [m]) == {frozenset({"p", "r"})}
    assert find_stable_model(pi, must=ids(pi, "r"), must_not=ids(pi, "p")) is None


def test_final_scc_stratified(final_scc):
    pi = ground(final_scc.program, set(final_scc.program.relations))
    layering = ground_strata(pi)
    assert layering is not None
    model = stratified_eval(pi, layering)
    assert sum(pi.atoms[i].name == "fullyReduce" for i in model) == 28
    assert [model] == enumerate_stable_models(pi)


def test_stratified_eval_rejects_normal_programs():
    pi = prog(("p", [], ["q"]), ("q", [], ["p"]))
    assert ground_strata(pi) is None
    with pytest.raises(ValueError):
        stratified_eval(pi, {})


def test_oracle_cap():
    pi = prog(*[(f"a{i}", [], [f"b{i}"]) for i in range(13)])
    with pytest.raises(TooLargeError, match="26 atoms"):
        enumerate_stable_models(pi, cap=24, oracle=True)
    # components here are single atoms, so the splitting route is unaffected
    assert len(enumerate_stable_models(pi, cap=24)) == 1


def test_show_model():
    pi = prog(("b", [], []), ("a", [], []))
    assert show_model(pi, frozenset(range(2))) == "{a b}"


# -- random ground normal programs ------------------------------------------------


@st.composite
def programs(draw, max_atoms=12, negation=True):
    n = draw(st.integers(1, max_atoms))
    names = [f"x{i}" for i in range(n)]
    rules = draw(
        st.lists(
            st.tuples(
                st.sampled_from(names),
                st.lists(st.sampled_from(names), max_size=2),
                st.lists(st.sampled_from(names), max_size=2) if negation else st.just([]),
            ),
            max_size=14,
        )
    )
    return prog(*rules) if rules else GroundProgram()


def _ref(pi):
    rules = [(str(r.head), [str(a) for a in r.pos_body], [str(a) for a in r.neg_body]) for r in pi.rules]
    return ref_stable_models(rules, [str(a) for a in pi.atoms])


@settings(max_examples=300, deadline=None)
@given(programs())
def test_splitting_search_matches_oracle(pi):
    expected = _ref(pi)
    assert named(pi, enumerate_stable_models(pi, oracle=True)) == expected
    assert named(pi, enumerate_stable_models(pi)) == expected


@settings(max_examples=200, deadline=None)
@given(programs())
def test_stable_models_are_minimal_and_stable(pi):
    models = enumerate_stable_models(pi)
    for m in models:
        assert is_stable(pi, m)
    for a, b in itertools.permutations(models, 2):
        assert not a < b


@settings(max_examples=200, deadline=None)
@given(programs(), st.data())
def test_reduct_is_negation_free(pi, data):
    m = data.draw(st.sets(st.sampled_from(range(len(pi.atoms))))) if pi.atoms else set()
    red = reduct(pi, m)
    assert all(not r.neg_body for r in red.rules)
    for r in red.rules:
        assert not any(a in {pi.atoms[i] for i in m} for a in r.neg_body)


@settings(max_examples=200, deadline=None)
@given(programs(negation=False))
def test_definite_programs_have_one_model(pi):
    (m,) = enumerate_stable_models(pi)
    assert m == minimal_model(pi)


@settings(max_examples=200, deadline=None)
@given(programs())
def test_stratified_programs_have_one_model(pi):
    layering = ground_strata(pi)
    if layering is None:
        return
    models = enumerate_stable_models(pi, oracle=True)
    assert models == [stratified_eval(pi, layering)]


@settings(max_examples=200, deadline=None)
@given(programs(), st.data())
def test_constrained_search_agrees_with_filtering(pi, data):
    idx = range(len(pi.atoms))
    must = data.draw(st.frozensets(st.sampled_from(idx), max_size=2)) if pi.atoms else frozenset()
    must_not = data.draw(st.frozensets(st.sampled_from(idx), max_size=2)) if pi.atoms else frozenset()
    allowed = [m for m in enumerate_stable_models(pi) if must <= m and not (must_not & m)]
    got = find_stable_model(pi, must, must_not)
    assert (got is None) == (not allowed)
    if got is not None:
        assert got in allowed
