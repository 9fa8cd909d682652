# test_export.py
import json

import pytest

from exceptions import MuSatError
from models.automata import FocusState, FreshInitial, UPWord
from services.export import (describe, render, upword_vectors_from_json, upword_vectors_to_json,
                             word_automaton_from_json, word_automaton_to_json)
from services.pipeline import build_stage
from services.word_automaton import membership_upword


def test_describe():
    assert describe(frozenset({"y", "x"})) == "{x,y}"
    assert describe(FocusState(frozenset({"x"}), "x")) == "{x}|x"
    assert describe(FocusState(frozenset({"x"}), None)) == "{x}"
    assert describe(FreshInitial("x")) == "x'"
    assert describe(("label", 0, None)) == "(label,0,-)"


@pytest.mark.parametrize("stage", ["apt", "tracking", "arena", "game"])
def test_every_stage_renders_as_dot(stage):
    text = render(build_stage("mu X. p | <>X", stage), "dot")
    assert text.startswith("digraph")
    assert text.rstrip().endswith("}")


def test_apt_json():
    data = json.loads(render(build_stage("mu X. p | <>X", "apt")))
    assert data["atoms"] == ["p"]
    assert len(data["states"]) == 6
    top = data["states"][data["top"]]
    assert top["kind"] == "and" and top["priority"] == 0
    assert {"id", "formula", "kind", "priority", "successors", "literal"} <= set(data["states"][0])


def test_arena_json():
    data = json.loads(render(build_stage("p & ~p", "arena", sat_mode=True)))
    assert data["sat_mode"] is True
    assert any(node["losing"] for node in data["nodes"])
    assert {node["owner"] for node in data["nodes"]} <= {"diamond", "box"}


def test_game_json_and_pgsolver():
    game = build_stage("nu X. <>X", "game")
    data = json.loads(render(game))
    assert len(data["nodes"]) == len(game)
    assert render(game, "pgsolver").startswith("parity ")


def test_render_errors():
    apt = build_stage("p", "apt")
    with pytest.raises(MuSatError):
        render(apt, "pgsolver")
    with pytest.raises(MuSatError):
        render(apt, "svg")
    with pytest.raises(MuSatError):
        render(object())


def test_word_automaton_json_round_trip(circle_example):
    again = word_automaton_from_json(json.loads(json.dumps(word_automaton_to_json(circle_example))))
    assert again.acceptance == circle_example.acceptance
    assert set(again.states) == set(circle_example.states)
    assert again.transitions == circle_example.transitions
    assert membership_upword(again, UPWord(("a",), ("b", "a")))


@pytest.mark.parametrize("data", [{}, {"transitions": [["x", "a"]], "initial": "x", "priorities": {}},
                                  {"transitions": [], "initial": "x", "priorities": {"x": 0}, "acceptance": "rabin"}])
def test_malformed_automaton_json(data):
    with pytest.raises(MuSatError):
        word_automaton_from_json(data)


def test_upword_vectors():
    vectors = [(UPWord(("a",), ("b",)), True), (UPWord((), ("a", "b")), False)]
    assert upword_vectors_from_json(upword_vectors_to_json(vectors)) == vectors
    with pytest.raises(MuSatError):
        upword_vectors_from_json('[["a"]]')
