# test_emptiness_game.py
import pytest

from conftest import CORPUS, random_formula
from exceptions import ConstructionError
from models.automata import StateKind, WordAutomaton
from models.games import Player
from models.kripke import KripkeStructure, World
from services.emptiness_game import (REJECTING, arena_alphabet, build_acceptance_game, build_arena,
                                     build_product_game, build_tracking, normalize_tracking)
from services.formula_service import analyze, parse_clean, pretty
from services.game_solver import solve, solve_parity
from services.tree_automaton import classify_apt, formula_to_apt
from services.word_automaton import classify_word, miyano_hayashi, parity_to_buchi, trim, weak_to_cobuchi


def _apt(text):
    f = parse_clean(text)
    table, _ = analyze(f)
    return formula_to_apt(f, table)


def test_contradiction_reaches_the_losing_node():
    a = _apt("p & ~p")
    arena = build_arena(a, sat_mode=True)
    assert any(node.losing for node in arena.nodes)
    assert arena.nodes[arena.initial].letter is None


def test_contradiction_is_lost_after_one_local_step():
    a = _apt("p & ~p")
    arena = build_arena(a, sat_mode=True)
    lose = next(v for v, node in enumerate(arena.nodes) if node.losing)
    for label, letter_node in arena.edges[arena.initial]:
        assert label[0] == "letter"
        assert all(target == lose for _, target in arena.edges[letter_node])


def test_literal_letters_resolve_literals_locally():
    a = _apt("p & ~p")
    arena = build_arena(a, sat_mode=False)
    assert any(node.losing for node in arena.nodes)
    # both letters are offered and no node other than the losing one is stuck
    assert len(arena.edges[arena.initial]) == 2
    assert all(out for v, out in enumerate(arena.edges) if not arena.nodes[v].losing)


def test_sat_mode_offers_a_single_letter():
    a = _apt("p | q")
    assert len(build_arena(a, sat_mode=True).edges[0]) == 1
    assert len(build_arena(a, sat_mode=False).edges[0]) == 4


def test_box_only_node_makes_a_serial_move():
    a = _apt("[]p")
    arena = build_arena(a, sat_mode=True)
    labels = [label for out in arena.edges for label, _ in out]
    assert ("modal", 0, None) in labels


def test_node_without_modal_obligations_is_a_dead_end_for_box():
    a = _apt("p")
    arena = build_arena(a, sat_mode=True)
    ends = [v for v, out in enumerate(arena.edges) if not out and not arena.nodes[v].losing]
    assert ends
    assert all(arena.owners[v] == Player.BOX for v in ends)


def test_owners_follow_local_states():
    a = _apt("mu X. p | <>X")
    arena = build_arena(a, sat_mode=True)
    for v, node in enumerate(arena.nodes):
        if node.losing or node.letter is None:
            assert arena.owners[v] == Player.DIAMOND
        elif any(a.kinds[q].is_local and a.literals[q] is None for q in node.states):
            assert arena.owners[v] == Player.DIAMOND
        else:
            assert arena.owners[v] == Player.BOX


@pytest.mark.parametrize("text", [text for text, _, _ in CORPUS])
def test_arena_size_bound(text):
    a = _apt(text)
    for sat_mode in (True, False):
        arena = build_arena(a, sat_mode=sat_mode)
        letters = 1 if sat_mode else 2 ** len(a.atoms)
        assert len(arena) <= (letters + 1) * 2 ** len(a.labels)


@pytest.mark.parametrize("text", [text for text, _, _ in CORPUS])
def test_tracking_automaton_shape(text):
    a = _apt(text)
    tracking = build_tracking(a, build_arena(a))
    assert len(tracking.states) == len(a.labels)
    assert tracking.initial == a.initial
    for q in a.states:
        assert tracking.priorities[q] == a.priorities[q] + 1
    for (q, _), targets in tracking.transitions.items():
        if len(targets) > 1:
            assert a.kinds[q] == StateKind.AND


@pytest.mark.parametrize("text", [text for text, _, _ in CORPUS])
def test_weak_automata_give_weak_tracking_automata(text):
    a = _apt(text)
    tracking = build_tracking(a, build_arena(a))
    if classify_apt(a).weak:
        assert classify_word(tracking).weak


def _buchi_tracking(a):
    tracking = normalize_tracking(build_tracking(a, build_arena(a)), a)
    return trim(parity_to_buchi(tracking, confine=True))


@pytest.mark.parametrize("text", [text for text, _, _ in CORPUS])
def test_limit_deterministic_automata_give_limit_deterministic_tracking(text):
    a = _apt(text)
    if classify_apt(a).limit_deterministic:
        assert classify_word(_buchi_tracking(a)).limit_deterministic


def test_tracking_limit_determinism_on_random_formulas(rng):
    checked = 0
    for _ in range(300):
        text = pretty(random_formula(rng, 4))
        a = _apt(text)
        if classify_apt(a).limit_deterministic:
            checked += 1
            assert classify_word(_buchi_tracking(a)).limit_deterministic, text
    assert checked > 0


def test_letter_labels_stutter():
    a = _apt("mu X. p | <>X")
    tracking = build_tracking(a, build_arena(a))
    for label in tracking.alphabet:
        if label[0] == "letter":
            assert all(tracking.delta(q, label) == {q} for q in tracking.states)


def test_normalized_tracking_drops_sinks():
    a = _apt("mu X. p | <>X")
    normalized = normalize_tracking(build_tracking(a, build_arena(a)), a)
    assert a.top not in normalized.states
    assert a.bottom not in normalized.states


def test_deterministic_tracking_gives_single_successor_label_nodes():
    a = _apt("mu X. p | <>X | []X")
    arena = build_arena(a)
    h = miyano_hayashi(weak_to_cobuchi(normalize_tracking(build_tracking(a, arena), a)))
    product = build_product_game(arena, h)
    game = product.game
    for v in game.nodes:
        if game.labels[v][0] == "label":
            assert len(game.successors[v]) == 1
            assert game.owners[v] == Player.BOX
    assert len(product.main_nodes) <= len(arena) * (len(h.states) + 1)


def test_product_rejects_foreign_alphabets():
    a = _apt("nu X. <>X")
    h = WordAutomaton.cobuchi([("x", "other", "x")], "x", {"x"})
    with pytest.raises(ConstructionError):
        build_product_game(build_arena(a), h)


def test_dead_tracking_runs_move_to_the_rejecting_sink():
    a = _apt("nu X. <>X")
    arena = build_arena(a)
    h = normalize_tracking(build_tracking(a, arena), a)
    product = build_product_game(arena, h)
    assert any(t == REJECTING for _, t in product.main_nodes)
    assert solve(product.game).winner(product.initial) == Player.DIAMOND


def test_arena_alphabet_is_in_first_seen_order():
    arena = build_arena(_apt("mu X. p | <>X"))
    labels = arena_alphabet(arena)
    assert labels[0] == ("letter", 0)
    assert set(labels) == arena.labels


def _structure():
    return KripkeStructure(
        worlds=[World(id="a", atoms=["p"]), World(id="b"), World(id="c", atoms=["p", "q"])],
        initial="a",
        edges=[("a", "b"), ("b", "c"), ("c", "c"), ("b", "a")],
    )


def test_acceptance_game_size():
    a = _apt("mu X. q | <>X")
    game = build_acceptance_game(a, _structure())
    assert len(game) == 3 * len(a.labels)
    assert solve_parity(game).winner(game.initial) == Player.DIAMOND


def test_acceptance_game_on_an_infinite_path():
    game = build_acceptance_game(_apt("nu X. <>X"), _structure())
    assert solve_parity(game).winner(game.initial) == Player.DIAMOND
    game = build_acceptance_game(_apt("nu X. p & []X"), _structure())
    assert solve_parity(game).winner(game.initial) == Player.BOX


@pytest.mark.parametrize("text", [text for text, _, _ in CORPUS])
def test_arena_updates_are_functions(text):
    a = _apt(text)
    first, second = build_arena(a), build_arena(a)
    assert first.nodes == second.nodes
    assert first.edges == second.edges
