# test_tree_automaton.py
import networkx as N
import pytest

import config
from conftest import CORPUS, random_formula
from exceptions import AlphabetCapError, ConstructionError, PriorityCompletionError
from models.automata import APT, StateKind
from models.formula import BOT, TOP, atom
from services.formula_service import analyze, parse_clean, pretty, unfold
from services.tree_automaton import classify_apt, complete_priority_map, formula_to_apt, has_local_cycle


def _apt(text):
    f = parse_clean(text)
    table, report = analyze(f)
    return f, table, report, formula_to_apt(f, table)


def test_eventually_automaton():
    f, table, _, a = _apt("mu X. p | <>X")
    assert len(a.labels) == len(table) + 2
    index = {label: q for q, label in enumerate(a.labels)}
    assert a.initial == index[f]
    assert a.kinds[index[f]] == StateKind.OR
    assert a.priorities[index[f]] == 1
    assert a.successors[index[f]] == (index[unfold(f)],)
    assert a.kinds[a.top] == StateKind.AND and a.priorities[a.top] == 0
    assert a.kinds[a.bottom] == StateKind.OR and a.priorities[a.bottom] == 1
    # states on the fixpoint cycle inherit its priority, the literal is on no cycle
    assert {a.priorities[q] for q in a.states if a.literals[q] is None and not a.is_sink(q)} == {1}
    assert a.priorities[index[atom("p")]] == 0


def test_literal_transitions_depend_on_the_letter():
    _, _, _, a = _apt("p & ~p")
    positive = next(q for q in a.states if a.literals[q] == (0, True))
    negative = next(q for q in a.states if a.literals[q] == (0, False))
    assert a.delta(positive, 1) == (a.top,)
    assert a.delta(positive, 0) == (a.bottom,)
    assert a.delta(negative, 0) == (a.top,)


def test_sinks_are_always_present():
    _, _, _, a = _apt("p")
    assert a.labels[a.top] == TOP and a.labels[a.bottom] == BOT
    assert a.successors[a.top] == (a.top,) and a.successors[a.bottom] == (a.bottom,)


@pytest.mark.parametrize("text", [text for text, _, _ in CORPUS])
def test_rank_bounded_by_alternation_depth(text):
    _, _, report, a = _apt(text)
    assert a.rank <= max(report.ad, 1) + 1


def test_rank_bound_on_random_formulas(rng):
    for _ in range(150):
        _, _, report, a = _apt(pretty(random_formula(rng, 5)))
        assert a.rank <= max(report.ad, 1) + 1


def test_guarded_formulas_have_no_local_cycles(rng):
    for _ in range(100):
        _, _, _, a = _apt(pretty(random_formula(rng, 5)))
        assert not has_local_cycle(a)


def test_local_cycle_is_detected():
    a = APT(atoms=(), labels=("x", "y"), initial=0, kinds=(StateKind.OR, StateKind.AND),
            successors=((1,), (0,)), priorities=(0, 0))
    assert has_local_cycle(a)


def test_modal_states_need_one_successor():
    with pytest.raises(ConstructionError):
        APT(atoms=(), labels=("x", "y"), initial=0, kinds=(StateKind.DIAMOND, StateKind.AND),
            successors=((0, 1), (1,)), priorities=(0, 0))


def test_alphabet_cap(monkeypatch):
    monkeypatch.setattr(config, "MAX_ATOMS", 1)
    with pytest.raises(AlphabetCapError):
        _apt("p & q")


def test_priority_completion_takes_the_best_cycle():
    graph = N.DiGraph([("n", "a"), ("a", "n"), ("n", "b"), ("b", "n"), ("c", "n")])
    completed = complete_priority_map(graph, {"a": 1, "b": 3})
    assert completed["n"] == 1
    assert completed["c"] == 0


def test_priority_completion_keeps_the_odd_inner_loop():
    # loops n-a (1) and n-b (2); the n-a cycle must stay odd
    graph = N.DiGraph([("n", "a"), ("a", "n"), ("n", "b"), ("b", "n")])
    completed = complete_priority_map(graph, {"a": 1, "b": 2})
    assert completed["n"] == 1
    assert max(completed[q] for q in ("n", "a")) == 1


def test_priority_completion_needs_an_assigned_state_on_every_cycle():
    graph = N.DiGraph([("x", "y"), ("y", "x"), ("y", "z"), ("z", "z")])
    with pytest.raises(PriorityCompletionError):
        complete_priority_map(graph, {"z": 0})


def test_always_is_weak_and_limit_linear():
    _, _, _, a = _apt("nu X. p & []X")
    flags = classify_apt(a)
    assert flags.weak and flags.limit_linear and flags.limit_deterministic


def test_eventually_is_limit_linear():
    _, _, _, a = _apt("mu X. p | <>X")
    assert classify_apt(a).limit_linear


def test_branching_least_fixpoint_is_not_limit_linear():
    _, _, _, a = _apt("mu X. p | <>X | []X")
    flags = classify_apt(a)
    assert flags.weak
    assert not flags.limit_linear
    assert flags.limit_deterministic


def test_alternating_formula_is_not_weak():
    _, _, _, a = _apt("nu X. mu Y. (p & <>X) | <>Y")
    assert not classify_apt(a).weak


@pytest.mark.parametrize("text", [text for text, _, fragment in CORPUS
                                  if fragment in ("limit-linear", "alternation-free aconjunctive")])
def test_aconjunctive_alternation_free_automata_are_limit_deterministic(text):
    _, _, _, a = _apt(text)
    assert classify_apt(a).limit_deterministic


def test_limit_linear_formulas_give_limit_linear_automata(rng):
    checked = 0
    for _ in range(300):
        _, _, report, a = _apt(pretty(random_formula(rng, 5)))
        if report.limit_linear:
            checked += 1
            flags = classify_apt(a)
            assert flags.limit_linear and flags.limit_deterministic
    assert checked > 0


def test_conjunction_on_an_odd_cycle_is_not_aconjunctive():
    # both conjuncts return to the least fixpoint, one through the inner greatest one
    _, _, report, a = _apt("mu X. nu Z. <>X & <>Z")
    assert not report.aconjunctive and not report.alternation_free
    assert report.best_fragment.value == "unrestricted"
    assert not classify_apt(a).limit_deterministic


def test_aconjunctive_formulas_give_limit_deterministic_automata(rng):
    checked = 0
    for _ in range(500):
        text = pretty(random_formula(rng, 5))
        _, _, report, a = _apt(text)
        if report.aconjunctive:
            checked += 1
            assert classify_apt(a).limit_deterministic, text
    assert checked > 0
