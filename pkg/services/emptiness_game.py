# services/emptiness_game.py
import itertools
import logging
from collections import deque
from dataclasses import dataclass
from typing import Dict, FrozenSet, Hashable, Iterable, List, Optional, Tuple

import config
from exceptions import BoundViolationError, ConstructionError
from models.automata import APT, Acceptance, StateKind, WordAutomaton
from models.games import (LOSING, SERIAL, ArenaNode, ParityGame, Player, ProductGame, StrategyArena,
                          letter_label, local_label, modal_label)
from models.kripke import KripkeStructure, index_structure
from services.word_automaton import restrict, trim
from utils import check_bound

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RejectingSink:
    """Tracking state reached once no tracked run is left"""

    def __str__(self) -> str:
        return "sink"


REJECTING = RejectingSink()


def _settle(a: APT, states: Iterable[int], sat_mode: bool) -> Optional[FrozenSet[int]]:
    """Drop discharged obligations; None when the macro-state is lost for diamond"""
    s = set(states)
    s.discard(a.top)
    if a.bottom in s:
        return None
    if sat_mode:
        seen = {a.literals[q] for q in s if a.literals[q] is not None}
        if any((atom, not positive) in seen for atom, positive in seen):
            return None
    return frozenset(s)


def _local_states(a: APT, s: FrozenSet[int], sat_mode: bool) -> List[int]:
    return sorted(q for q in s if a.kinds[q].is_local and not (sat_mode and a.literals[q] is not None))


def _arena_moves(a: APT, node: ArenaNode, sat_mode: bool) -> List[Tuple[tuple, Optional[FrozenSet[int]], Optional[int]]]:
    """(label, target states, target letter) for every move out of node; None states means lost"""
    s = node.states
    if node.letter is None:
        letters = [0] if sat_mode else list(a.letters)
        return [(letter_label(sigma), s, sigma) for sigma in letters]

    sigma = node.letter
    local = _local_states(a, s, sat_mode)
    if local:
        keep = s - set(local)
        forced = set()
        choosers = []
        for q in local:
            if a.kinds[q] == StateKind.OR:
                choosers.append(q)
            else:
                forced |= set(a.delta(q, sigma))
        moves = {}
        for picks in itertools.product(*(sorted(set(a.delta(q, sigma))) for q in choosers)):
            label = local_label(sigma, zip(choosers, picks))
            if label not in moves:
                moves[label] = (label, _settle(a, keep | forced | set(picks), sat_mode), sigma)
        return list(moves.values())

    diamonds = sorted(q for q in s if a.kinds[q] == StateKind.DIAMOND)
    boxes = sorted(q for q in s if a.kinds[q] == StateKind.BOX)
    universal = set()
    for q in boxes:
        universal |= set(a.delta(q, sigma))
    if diamonds:
        return [(modal_label(sigma, q), _settle(a, universal | set(a.delta(q, sigma)), sat_mode), None) for q in diamonds]
    if boxes:
        return [(modal_label(sigma, SERIAL), _settle(a, universal, sat_mode), None)]
    return []


def _owner(a: APT, node: ArenaNode, sat_mode: bool) -> Player:
    if node.losing or node.letter is None or _local_states(a, node.states, sat_mode):
        return Player.DIAMOND
    return Player.BOX


def build_arena(a: APT, sat_mode: Optional[bool] = None) -> StrategyArena:
    """Reachable strategy arena from {q0}; lost macro-states collapse into LOSING"""
    sat_mode = config.SAT_MODE if sat_mode is None else sat_mode
    start = _settle(a, {a.initial}, sat_mode)
    initial = LOSING if start is None else ArenaNode(start)
    index: Dict[ArenaNode, int] = {initial: 0}
    nodes: List[ArenaNode] = [initial]
    edges: List[List[Tuple[tuple, int]]] = [[]]
    letters = 1 if sat_mode else len(list(a.letters))
    bound = (letters + 1) * 2 ** len(a.labels)

    queue = deque([initial])
    while queue:
        node = queue.popleft()
        if node.losing:
            continue
        out = edges[index[node]]
        for label, states, letter in _arena_moves(a, node, sat_mode):
            target = LOSING if states is None else ArenaNode(states, letter)
            if target not in index:
                index[target] = len(nodes)
                nodes.append(target)
                edges.append([])
                queue.append(target)
                check_bound("strategy arena", len(nodes), bound)
                if len(nodes) > config.MAX_GAME_NODES:
                    raise BoundViolationError(f"strategy arena exceeds {config.MAX_GAME_NODES} nodes")
            out.append((label, index[target]))

    arena = StrategyArena(
        nodes=tuple(nodes),
        owners=tuple(_owner(a, node, sat_mode) for node in nodes),
        edges=tuple(tuple(out) for out in edges),
        initial=0,
        sat_mode=sat_mode,
    )
    logger.info(f"Built strategy arena with {len(nodes)} nodes and {arena.edge_count} edges (bound {bound})")
    return arena


def arena_alphabet(arena: StrategyArena) -> Tuple[tuple, ...]:
    """Edge labels of the arena in order of first appearance"""
    seen = {}
    for out in arena.edges:
        for label, _ in out:
            seen.setdefault(label, None)
    return tuple(seen)


def _gamma(a: APT, q: int, label: tuple) -> Tuple[int, ...]:
    if a.is_sink(q) or label[0] == "letter":
        return (q,)
    kind = a.kinds[q]
    sigma = label[1]
    if label[0] == "local":
        if kind == StateKind.OR:
            choice = dict(label[2])
            return (choice[q],) if q in choice else ()
        if kind == StateKind.AND:
            return a.delta(q, sigma)
        return (q,)
    chosen = label[2]
    if kind == StateKind.OR:
        return ()
    if kind == StateKind.AND or kind == StateKind.BOX:
        return a.delta(q, sigma)
    return a.delta(q, sigma) if chosen == q else ()


def build_tracking(a: APT, arena: StrategyArena) -> WordAutomaton:
    """Nondeterministic parity automaton over arena labels accepting the bad branches"""
    alphabet = arena_alphabet(arena)
    transitions = {}
    for q in a.states:
        for label in alphabet:
            targets = _gamma(a, q, label)
            if targets:
                transitions[(q, label)] = frozenset(targets)
    tracking = WordAutomaton(
        alphabet=alphabet,
        states=tuple(a.states),
        initial=a.initial,
        transitions=transitions,
        priorities={q: a.priorities[q] + 1 for q in a.states},
        acceptance=Acceptance.PARITY,
    )
    logger.info(f"Built tracking automaton with {len(tracking.states)} states over {len(alphabet)} labels")
    return tracking


def normalize_tracking(t: WordAutomaton, a: APT) -> WordAutomaton:
    """Remove top and bottom, then the states without accepting future"""
    keep = [q for q in t.states if not a.is_sink(q)]
    return trim(restrict(t, keep))


def _step(h: WordAutomaton, t: Hashable, label: tuple) -> List[Hashable]:
    if t == REJECTING:
        return [REJECTING]
    targets = h.canonical(h.delta(t, label))
    return targets or [REJECTING]


def _tracking_priority(h: WordAutomaton, t: Hashable) -> int:
    return 1 if t == REJECTING else h.priorities[t]


def build_product_game(g: StrategyArena, h: WordAutomaton) -> ProductGame:
    """Parity game on arena nodes paired with H states; diamond wins iff H rejects the play"""
    alphabet = set(h.alphabet)
    unknown = [label for label in arena_alphabet(g) if label not in alphabet]
    if unknown:
        raise ConstructionError(f"arena label {unknown[0]} is not a letter of the tracking automaton")

    labels: List[Hashable] = []
    owners: List[Player] = []
    priorities: List[int] = []
    successors: List[List[int]] = []
    index: Dict[Hashable, int] = {}
    main_nodes: Dict[Tuple[int, Hashable], int] = {}

    def add(key, owner: Player, priority: int) -> Tuple[int, bool]:
        if key in index:
            return index[key], False
        index[key] = len(labels)
        labels.append(key)
        owners.append(owner)
        priorities.append(priority)
        successors.append([])
        if len(labels) > config.MAX_GAME_NODES:
            raise BoundViolationError(f"product game exceeds {config.MAX_GAME_NODES} nodes")
        return index[key], True

    start = (g.initial, h.initial)
    root, _ = add(("main",) + start, g.owners[g.initial], _tracking_priority(h, h.initial) + 1)
    main_nodes[start] = root
    queue = deque([start])
    while queue:
        v, t = queue.popleft()
        here = main_nodes[(v, t)]
        for label, target in g.edges[v]:
            if g.nodes[target].losing:
                lose, _ = add(("lose",), Player.DIAMOND, 1)
                successors[here].append(lose)
                continue
            middle, fresh = add(("label", label, target, t), Player.BOX, _tracking_priority(h, t) + 1)
            if middle not in successors[here]:
                successors[here].append(middle)
            if not fresh:
                continue
            for following in _step(h, t, label):
                key = (target, following)
                if key not in main_nodes:
                    node, _ = add(("main",) + key, g.owners[target], _tracking_priority(h, following) + 1)
                    main_nodes[key] = node
                    queue.append(key)
                successors[middle].append(main_nodes[key])

    # the losing sink may be reached many times but carries a single node
    successors = [list(dict.fromkeys(out)) for out in successors]
    check_bound("product game main nodes", len(main_nodes), len(g) * (len(h.states) + 1))
    game = ParityGame(
        owners=tuple(owners),
        successors=tuple(tuple(out) for out in successors),
        priorities=tuple(priorities),
        initial=root,
        labels=tuple(labels),
    )
    logger.info(f"Built product game with {len(game)} nodes ({len(main_nodes)} arena-state pairs)")
    return ProductGame(game=game, arena=g, tracking=h, main_nodes=main_nodes)


def build_acceptance_game(a: APT, k: KripkeStructure) -> ParityGame:
    """Model-checking game on worlds times states; diamond owns disjunctive and diamond states"""
    index = index_structure(k)
    atom_position = {name: i for i, name in enumerate(a.atoms)}
    letters = [sum(1 << atom_position[p] for p in index.labels[w] if p in atom_position) for w in range(index.size)]
    n = len(a.labels)

    def node(w: int, q: int) -> int:
        return w * n + q

    owners, successors, priorities, labels = [], [], [], []
    for w in range(index.size):
        for q in a.states:
            kind = a.kinds[q]
            owners.append(Player.DIAMOND if kind.is_existential else Player.BOX)
            priorities.append(a.priorities[q])
            labels.append((index.ids[w], q))
            if kind.is_local:
                targets = [node(w, r) for r in a.delta(q, letters[w])]
            else:
                (r,) = a.delta(q, letters[w])
                targets = [node(v, r) for v in index.successor_list(w)]
            successors.append(tuple(dict.fromkeys(targets)))

    game = ParityGame(
        owners=tuple(owners),
        successors=tuple(successors),
        priorities=tuple(priorities),
        initial=node(index.initial, a.initial),
        labels=tuple(labels),
    )
    logger.info(f"Built acceptance game with {len(game)} nodes for {index.size} worlds")
    return game
