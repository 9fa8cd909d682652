# test_pipeline.py
import pytest

from conftest import ALTERNATING_CONJUNCTIONS, CORPUS, UNRESTRICTED, random_formula
from exceptions import UnsupportedFragmentError
from models.report import Construction, Fragment, Verdict
from services.formula_service import analyze, parse_clean, pretty
from services.pipeline import (STAGES, build_stage, compare_tracking, decide_many, decide_sat, model_check,
                               model_check_game, run_pipeline)
from services.semantics import random_structure, satisfiable_small, satisfies
from services.tree_automaton import mentioned_atoms

ALTERNATION_FREE = [entry for entry in CORPUS if entry[2] != Fragment.ACONJUNCTIVE.value]


@pytest.mark.parametrize("text,expected,fragment", CORPUS)
def test_verdicts(text, expected, fragment):
    report = decide_sat(text, verify=True)
    assert report.fragment.best_fragment.value == fragment
    assert report.verdict == (Verdict.SAT if expected else Verdict.UNSAT)
    if expected:
        assert report.witness is not None
        assert report.witness_verified
        assert satisfies(parse_clean(text), report.witness)
    else:
        assert report.witness is None


def test_infinite_path_witness():
    report = decide_sat("nu X. <>X", verify=True)
    model = report.witness
    assert report.witness_verified
    assert {source for source, _ in model.edges} == {w.id for w in model.worlds}


@pytest.mark.parametrize("text", [text for text, expected, fragment in CORPUS
                                  if expected and fragment != Fragment.ACONJUNCTIVE.value])
def test_alternation_free_witnesses_stay_within_the_model_size_bound(text):
    report = decide_sat(text, verify=True)
    assert len(report.witness.worlds) <= 3 ** report.sizes["closure"]


def test_eventually_witness_carries_the_atom():
    report = decide_sat("mu X. p | <>X", verify=True)
    assert any("p" in world.atoms for world in report.witness.worlds)


def test_witness_can_be_skipped():
    report = decide_sat("nu X. <>X", witness=False)
    assert report.verdict == Verdict.SAT
    assert report.witness is None


def test_unrestricted_formulas_are_rejected():
    with pytest.raises(UnsupportedFragmentError):
        decide_sat(UNRESTRICTED)


@pytest.mark.parametrize("text", ALTERNATING_CONJUNCTIONS)
def test_conjunctions_on_one_odd_cycle_are_rejected_before_determinization(text):
    with pytest.raises(UnsupportedFragmentError, match="unrestricted"):
        decide_sat(text, witness=False)


@pytest.mark.slow
def test_aconjunctive_random_formulas_are_decided(rng):
    checked = 0
    for _ in range(300):
        f = parse_clean(pretty(random_formula(rng, 4)))
        _, fragment = analyze(f)
        if fragment.best_fragment != Fragment.ACONJUNCTIVE:
            continue
        checked += 1
        run = run_pipeline(f)
        assert run.construction == Construction.PERMUTATION, pretty(f)
    assert checked > 0


def test_alternating_formulas_have_no_cobuchi_tracking():
    with pytest.raises(UnsupportedFragmentError):
        decide_sat("nu X. mu Y. (p & <>X) | <>Y", construction=Construction.MIYANO_HAYASHI)


@pytest.mark.parametrize("text,expected,_", ALTERNATION_FREE)
def test_miyano_hayashi_agrees_with_dispatch(text, expected, _):
    report = decide_sat(text, construction=Construction.MIYANO_HAYASHI, witness=False)
    assert report.construction == Construction.MIYANO_HAYASHI
    assert (report.verdict == Verdict.SAT) == expected


@pytest.mark.parametrize("text,expected,_", CORPUS)
def test_literal_letters_agree_with_sat_mode(text, expected, _):
    run = run_pipeline(text, sat_mode=False)
    assert run.satisfiable == expected
    assert not run.arena.sat_mode


@pytest.mark.parametrize("text,expected,fragment", CORPUS)
def test_unsatisfiable_formulas_have_no_small_model(text, expected, fragment):
    if not expected:
        f = parse_clean(text)
        table, _ = analyze(f)
        assert satisfiable_small(f, mentioned_atoms(table), max_worlds=3) is None


@pytest.mark.parametrize("text", [text for text, _, fragment in CORPUS
                                  if fragment == Fragment.AF_ACONJUNCTIVE.value])
def test_tracking_pipelines_agree(text):
    verdicts = compare_tracking(text)
    assert verdicts["mh"] == verdicts["focus"]


def test_focus_witness():
    report = decide_sat("mu X. p | <>X | []X", construction=Construction.FOCUS, verify=True)
    assert report.construction == Construction.FOCUS
    assert report.witness_verified


def test_permutation_pipeline_reports_buchi_states():
    report = decide_sat("nu X. mu Y. (p & <>X) | <>Y", witness=False)
    assert report.construction == Construction.PERMUTATION
    assert report.verdict == Verdict.SAT
    assert "buchi_states" in report.sizes


def test_sizes_and_bounds():
    report = decide_sat("mu X. p | <>X", witness=False)
    for key in ("closure", "apt_states", "priorities", "arena_nodes", "tracking_states",
                "normalized_tracking_states", "h_states", "game_nodes"):
        assert key in report.sizes
    assert report.sizes["apt_states"] == report.sizes["closure"] + 2
    assert report.sizes["arena_nodes"] <= report.bounds["arena_nodes"]
    assert report.sizes["h_states"] <= report.bounds["h"]
    assert {"parse", "apt", "arena", "tracking", "determinize", "product", "solve"} <= set(report.timings)


def test_fallback_is_recorded():
    run = run_pipeline("mu X. p | <>X | []X", construction=Construction.CIRCLE)
    if run.construction != Construction.CIRCLE:
        assert run.fallbacks == ["circle->mh"]
    assert run.satisfiable


def test_decide_many_keeps_the_order():
    texts = [text for text, _, _ in CORPUS[:6]]
    reports = decide_many(texts, workers=3, witness=False)
    assert [r.verdict == Verdict.SAT for r in reports] == [expected for _, expected, _ in CORPUS[:6]]


def test_build_stage():
    assert len(build_stage("mu X. p | <>X", "apt").labels) == 6
    assert len(build_stage("mu X. p | <>X", "game")) > 0
    assert len(build_stage("mu X. p | <>X", "arena")) > 1
    assert set(STAGES) == {"apt", "tracking", "arena", "game"}
    with pytest.raises(ValueError):
        build_stage("p", "nothing")


def test_model_check_game_size(rng):
    k = random_structure(rng, 3, ["p"])
    holds, game = model_check_game("mu X. p | <>X", k)
    assert len(game) == 3 * 6
    assert holds == satisfies(parse_clean("mu X. p | <>X"), k)


def test_model_checking_agrees_with_the_semantics(rng):
    for _ in range(300):
        f = parse_clean(pretty(random_formula(rng, 4)))
        k = random_structure(rng, rng.randint(1, 6), ["p", "q"])
        assert model_check(f, k) == satisfies(f, k), pretty(f)


@pytest.mark.slow
def test_random_verdicts_are_sound(rng):
    checked = 0
    for _ in range(80):
        f = parse_clean(pretty(random_formula(rng, 4)))
        table, fragment = analyze(f)
        if fragment.best_fragment == Fragment.UNRESTRICTED:
            continue
        checked += 1
        report = decide_sat(f, verify=True)
        if report.verdict == Verdict.UNSAT:
            assert satisfiable_small(f, mentioned_atoms(table), max_worlds=3) is None, pretty(f)
    assert checked > 0
