# services/pipeline.py
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import config
from exceptions import ConstructionError, UnsupportedFragmentError, WitnessVerificationError
from models.automata import APT, WordAutomaton
from models.formula import ClosureTable, Formula
from models.games import ParityGame, Player, ProductGame, Solution, StrategyArena
from models.kripke import KripkeStructure, World
from models.report import Construction, Fragment, FragmentReport, PipelineReport, Verdict
from services.emptiness_game import (build_acceptance_game, build_arena, build_product_game, build_tracking,
                                     normalize_tracking)
from services.formula_service import analyze, parse_clean, prepare, pretty
from services.game_solver import solve, solve_parity
from services.semantics import satisfies
from services.tree_automaton import formula_to_apt
from services.word_automaton import (circle_determinize, classify_word, focus_history_determinize, miyano_hayashi,
                                     parity_to_buchi, permutation_determinize, trim, weak_to_cobuchi)
from utils import check_bound, stage_timer

logger = logging.getLogger(__name__)

DISPATCH = {
    Fragment.LIMIT_LINEAR: Construction.CIRCLE,
    Fragment.AF_ACONJUNCTIVE: Construction.FOCUS,
    Fragment.ALTERNATION_FREE: Construction.MIYANO_HAYASHI,
    Fragment.ACONJUNCTIVE: Construction.PERMUTATION,
    Fragment.UNRESTRICTED: Construction.UNSUPPORTED,
}


@dataclass
class PipelineRun:
    """Every intermediate object of one decision, kept for dumps and witness extraction"""
    formula: Formula
    table: ClosureTable
    fragment: FragmentReport
    apt: APT
    arena: StrategyArena
    tracking: WordAutomaton
    normalized: WordAutomaton
    construction: Construction = Construction.UNSUPPORTED
    h: Optional[WordAutomaton] = None
    product: Optional[ProductGame] = None
    solution: Optional[Solution] = None
    sizes: Dict[str, int] = field(default_factory=dict)
    bounds: Dict[str, float] = field(default_factory=dict)
    timings: Dict[str, float] = field(default_factory=dict)
    fallbacks: List[str] = field(default_factory=list)

    @property
    def satisfiable(self) -> bool:
        return self.solution.winner(self.product.initial) == Player.DIAMOND


def _as_float(value) -> float:
    try:
        return float(value)
    except OverflowError:
        return math.inf


def _fall_back(run: PipelineRun, source: Construction, target: Construction, reason: str) -> Construction:
    logger.warning(f"Falling back from {source.value} to {target.value}: {reason}")
    run.fallbacks.append(f"{source.value}->{target.value}")
    return target


def _unsupported(fragment: FragmentReport) -> UnsupportedFragmentError:
    return UnsupportedFragmentError(
        f"formulas of the {fragment.best_fragment.value} fragment need Safra-Piterman or "
        f"Henzinger-Piterman determinization, which is not available"
    )


def _cobuchi_tracking(run: PipelineRun, construction: Construction) -> WordAutomaton:
    try:
        return weak_to_cobuchi(run.normalized)
    except ConstructionError as e:
        raise UnsupportedFragmentError(f"{construction.value} needs an alternation-free formula: {e}") from e


def _determinize(run: PipelineRun, construction: Construction, fallback: bool) -> Tuple[Construction, WordAutomaton]:
    n = len(run.normalized.states)
    if construction == Construction.UNSUPPORTED:
        raise _unsupported(run.fragment)

    if construction == Construction.CIRCLE:
        cobuchi = _cobuchi_tracking(run, construction)
        if classify_word(cobuchi, synchronizing=True).limit_linear:
            f = len(cobuchi.accepting)
            run.bounds["h"] = _as_float(n * n * 2 ** n if f < n else n * (f + 1) * 2 ** n)
            return construction, circle_determinize(cobuchi)
        if not fallback:
            raise ConstructionError("tracking automaton is not limit-linear")
        construction = _fall_back(run, construction, Construction.MIYANO_HAYASHI, "tracking automaton is not limit-linear")

    if construction == Construction.FOCUS:
        cobuchi = _cobuchi_tracking(run, construction)
        if classify_word(cobuchi).limit_deterministic:
            run.bounds["h"] = _as_float((len(cobuchi.accepting) + 1) * 2 ** n)
            return construction, focus_history_determinize(cobuchi)
        if not fallback:
            raise ConstructionError("tracking automaton is not limit-deterministic")
        construction = _fall_back(run, construction, Construction.MIYANO_HAYASHI,
                                  "tracking automaton is not limit-deterministic")

    if construction == Construction.MIYANO_HAYASHI:
        run.bounds["h"] = _as_float(3 ** n)
        return construction, miyano_hayashi(_cobuchi_tracking(run, construction))

    buchi = trim(parity_to_buchi(run.normalized, confine=True))
    run.sizes["buchi_states"] = len(buchi.states)
    if not classify_word(buchi).limit_deterministic:
        raise UnsupportedFragmentError("the Buchi tracking automaton is not limit-deterministic")
    m = len(buchi.states)
    run.bounds["h"] = _as_float(math.e * math.factorial(m + 2)) if m < 160 else math.inf
    return construction, permutation_determinize(buchi)


def run_pipeline(f: Union[Formula, str], construction: Optional[Construction] = None, sat_mode: Optional[bool] = None,
                 fallback: bool = True) -> PipelineRun:
    """Translate, build arena and tracking automaton, determinize, build and solve the product game"""
    timings: Dict[str, float] = {}
    with stage_timer(timings, "parse"):
        f = parse_clean(f) if isinstance(f, str) else prepare(f)
        table, fragment = analyze(f)
    with stage_timer(timings, "apt"):
        apt = formula_to_apt(f, table)
    with stage_timer(timings, "arena"):
        arena = build_arena(apt, sat_mode)
    with stage_timer(timings, "tracking"):
        tracking = build_tracking(apt, arena)
        normalized = normalize_tracking(tracking, apt)

    run = PipelineRun(formula=f, table=table, fragment=fragment, apt=apt, arena=arena, tracking=tracking,
                      normalized=normalized, timings=timings)
    n = len(apt.labels)
    letters = 1 if arena.sat_mode else 2 ** len(apt.atoms)
    run.sizes.update({
        "closure": len(table),
        "apt_states": n,
        "priorities": apt.rank,
        "arena_nodes": len(arena),
        "tracking_states": len(tracking.states),
        "normalized_tracking_states": len(normalized.states),
    })
    run.bounds.update({"apt_states": len(table) + 2, "arena_nodes": _as_float((letters + 1) * 2 ** n)})
    check_bound("tracking automaton", len(tracking.states), n)

    requested = construction or DISPATCH[fragment.best_fragment]
    with stage_timer(timings, "determinize"):
        run.construction, run.h = _determinize(run, requested, fallback)
    run.sizes["h_states"] = len(run.h.states)
    if "h" in run.bounds:
        check_bound(f"{run.construction.value} automaton", len(run.h.states), run.bounds["h"])

    with stage_timer(timings, "product"):
        run.product = build_product_game(arena, run.h)
    run.sizes["game_nodes"] = len(run.product.game)
    run.bounds["game_main_nodes"] = _as_float(len(arena) * (len(run.h.states) + 1))
    with stage_timer(timings, "solve"):
        run.solution = solve(run.product.game)
    logger.info(f"{pretty(f)} is {'satisfiable' if run.satisfiable else 'unsatisfiable'} "
                f"via {run.construction.value}")
    return run


def _advance(product: ProductGame, solution: Solution, node: int) -> int:
    """Follow diamond's strategy and forced label nodes until a box-owned main node"""
    game = product.game
    seen = set()
    while game.owners[node] == Player.DIAMOND or game.labels[node][0] == "label":
        if node in seen:
            raise ConstructionError(f"strategy loops through {game.labels[node]} without reaching a world")
        seen.add(node)
        if game.labels[node][0] == "label":
            if len(game.successors[node]) != 1:
                raise ConstructionError("witness extraction needs a deterministic tracking automaton")
            node = game.successors[node][0]
            continue
        if not game.successors[node]:
            raise ConstructionError("witness extraction reached a node lost by diamond")
        node = solution.strategies[Player.DIAMOND].get(node, game.successors[node][0])
    return node


def _world_atoms(product: ProductGame, apt: APT, node: int) -> List[str]:
    """Positive literals of the modal node in sat mode, the chosen letter otherwise"""
    arena = product.arena
    _, v, _ = product.game.labels[node]
    arena_node = arena.nodes[v]
    atoms = apt.atoms
    if arena.sat_mode:
        positive = [apt.literals[q] for q in arena_node.states if apt.literals[q] is not None]
        return sorted(atoms[i] for i, holds in positive if holds)
    letter = arena_node.letter or 0
    return [name for i, name in enumerate(atoms) if letter >> i & 1]


def extract_model(solution: Solution, product: ProductGame, apt: APT) -> KripkeStructure:
    """Kripke structure on the box-owned product nodes reached under diamond's strategy"""
    if not product.tracking.is_deterministic:
        raise ConstructionError("witness extraction needs a deterministic tracking automaton")
    if solution.winner(product.initial) != Player.DIAMOND:
        raise ConstructionError("diamond does not win the product game; there is nothing to extract")
    game = product.game
    start = _advance(product, solution, product.initial)
    ids = {start: "w0"}
    order = [start]
    edges: List[Tuple[str, str]] = []
    i = 0
    while i < len(order):
        world = order[i]
        i += 1
        targets = []
        for middle in game.successors[world]:
            if game.labels[middle][0] != "label":
                continue
            targets.append(_advance(product, solution, game.successors[middle][0]))
        if not targets:
            targets = [world]
        for target in dict.fromkeys(targets):
            if target not in ids:
                ids[target] = f"w{len(ids)}"
                order.append(target)
            edges.append((ids[world], ids[target]))

    model = KripkeStructure(
        worlds=[World(id=ids[w], atoms=_world_atoms(product, apt, w)) for w in order],
        initial="w0",
        edges=edges,
    )
    logger.info(f"Extracted witness with {len(order)} worlds and {len(edges)} edges")
    return model


def _report(run: PipelineRun) -> PipelineReport:
    return PipelineReport(
        formula=pretty(run.formula),
        fragment=run.fragment,
        construction=run.construction,
        verdict=Verdict.SAT if run.satisfiable else Verdict.UNSAT,
        sizes=run.sizes,
        bounds=run.bounds,
        timings=run.timings,
        fallbacks=run.fallbacks,
    )


def decide_sat(f: Union[Formula, str], construction: Optional[Construction] = None, sat_mode: Optional[bool] = None,
               verify: Optional[bool] = None, witness: bool = True) -> PipelineReport:
    """Satisfiability verdict, with a verified witness model for satisfiable input"""
    verify = config.VERIFY_WITNESS if verify is None else verify
    run = run_pipeline(f, construction, sat_mode)
    report = _report(run)
    if not run.satisfiable or not witness:
        return report

    source = run
    if not run.h.is_deterministic:
        logger.warning(f"Extracting the witness through {Construction.MIYANO_HAYASHI.value}; "
                       f"{run.construction.value} is not deterministic")
        report.fallbacks.append(f"{run.construction.value}->{Construction.MIYANO_HAYASHI.value} witness")
        source = run_pipeline(run.formula, Construction.MIYANO_HAYASHI, sat_mode)
        if not source.satisfiable:
            raise WitnessVerificationError("deterministic pipeline disagrees with the history-deterministic one")

    with stage_timer(report.timings, "witness"):
        model = extract_model(source.solution, source.product, source.apt)
    report.witness = model
    if verify:
        if not satisfies(run.formula, model):
            raise WitnessVerificationError(f"extracted witness does not satisfy {pretty(run.formula)}")
        report.witness_verified = True
    return report


def model_check_game(f: Union[Formula, str], k: KripkeStructure) -> Tuple[bool, ParityGame]:
    f = parse_clean(f) if isinstance(f, str) else prepare(f)
    table, _ = analyze(f)
    apt = formula_to_apt(f, table)
    game = build_acceptance_game(apt, k)
    check_bound("acceptance game", len(game), len(k.worlds) * len(apt.labels))
    solution = solve_parity(game)
    return solution.winner(game.initial) == Player.DIAMOND, game


def model_check(f: Union[Formula, str], k: KripkeStructure) -> bool:
    holds, _ = model_check_game(f, k)
    return holds


def compare_tracking(f: Union[Formula, str], sat_mode: Optional[bool] = None) -> Dict[str, Verdict]:
    """Winners of the deterministic and the history-deterministic product game"""
    verdicts = {}
    for construction in (Construction.MIYANO_HAYASHI, Construction.FOCUS):
        run = run_pipeline(f, construction, sat_mode, fallback=False)
        verdicts[construction.value] = Verdict.SAT if run.satisfiable else Verdict.UNSAT
    if len(set(verdicts.values())) > 1:
        logger.error(f"Tracking pipelines disagree on {f}: {verdicts}")
    return verdicts


def decide_many(formulas: Sequence[Union[Formula, str]], workers: int = 4, **options) -> List[PipelineReport]:
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda f: decide_sat(f, **options), formulas))


STAGES = ("apt", "tracking", "arena", "game")


def build_stage(f: Union[Formula, str], stage: str, construction: Optional[Construction] = None,
                sat_mode: Optional[bool] = None) -> Union[APT, WordAutomaton, StrategyArena, ParityGame]:
    """Intermediate object of one pipeline stage, for dumps"""
    if stage not in STAGES:
        raise ValueError(f"unknown stage {stage!r}; expected one of {', '.join(STAGES)}")
    if stage == "game":
        return run_pipeline(f, construction, sat_mode).product.game
    f = parse_clean(f) if isinstance(f, str) else prepare(f)
    table, _ = analyze(f)
    apt = formula_to_apt(f, table)
    if stage == "apt":
        return apt
    arena = build_arena(apt, sat_mode)
    return arena if stage == "arena" else build_tracking(apt, arena)
