# services/game_solver.py
"""
Zielonka's recursive algorithm (max-parity, with positional strategies) and the
classical Buchi game algorithm. A node without successors loses for its owner.
"""
import logging
from collections import deque
from typing import Dict, Iterable, Optional, Set, Tuple

from exceptions import ConstructionError
from models.games import ParityGame, Player, Solution

logger = logging.getLogger(__name__)

Regions = Dict[Player, Set[int]]
Strategies = Dict[Player, Dict[int, int]]


def attractor(game: ParityGame, target: Iterable[int], player: Player,
              within: Optional[Set[int]] = None) -> Tuple[Set[int], Dict[int, int]]:
    """Nodes of within from which player can force a visit to target.

    Returns the region and player's attracting moves on the nodes it added.
    """
    within = set(game.nodes) if within is None else within
    region = {v for v in target if v in within}
    strategy: Dict[int, int] = {}
    escapes = {}
    queue = deque(region)
    while queue:
        w = queue.popleft()
        for v in game.predecessors[w]:
            if v not in within or v in region:
                continue
            if game.owners[v] == player:
                region.add(v)
                strategy[v] = w
                queue.append(v)
                continue
            if v not in escapes:
                escapes[v] = sum(1 for u in game.successors[v] if u in within)
            escapes[v] -= 1
            if escapes[v] == 0:
                region.add(v)
                queue.append(v)
    return region, strategy


def _stay(game: ParityGame, v: int, nodes: Set[int]) -> int:
    for w in game.successors[v]:
        if w in nodes:
            return w
    raise ConstructionError(f"node {game.labels[v]} has no move inside its subgame")


def _empty() -> Tuple[Regions, Strategies]:
    return {p: set() for p in Player}, {p: {} for p in Player}


def _dead_ends(game: ParityGame) -> Tuple[Regions, Strategies, Set[int]]:
    """Settle everything attracted to dead ends; the rest has none"""
    regions, strategies = _empty()
    nodes = set(game.nodes)
    for loser in (Player.BOX, Player.DIAMOND):
        winner = loser.opponent
        stuck = [v for v in nodes if not game.successors[v] and game.owners[v] == loser]
        if not stuck:
            continue
        won, moves = attractor(game, stuck, winner, nodes)
        regions[winner] |= won
        strategies[winner].update(moves)
        nodes -= won
    return regions, strategies, nodes


def _zielonka(game: ParityGame, nodes: Set[int]) -> Tuple[Regions, Strategies]:
    regions, strategies = _empty()
    nodes = set(nodes)
    while nodes:
        top = max(game.priorities[v] for v in nodes)
        player = Player.of_parity(top)
        opponent = player.opponent
        highest = {v for v in nodes if game.priorities[v] == top}
        attracted, moves = attractor(game, highest, player, nodes)
        sub_regions, sub_strategies = _zielonka(game, nodes - attracted)

        if not sub_regions[opponent]:
            regions[player] |= nodes
            strategies[player].update(sub_strategies[player])
            strategies[player].update(moves)
            for v in highest:
                if game.owners[v] == player:
                    strategies[player][v] = _stay(game, v, nodes)
            return regions, strategies

        lost, opponent_moves = attractor(game, sub_regions[opponent], opponent, nodes)
        regions[opponent] |= lost
        strategies[opponent].update(sub_strategies[opponent])
        strategies[opponent].update(opponent_moves)
        nodes -= lost
    return regions, strategies


def _solution(game: ParityGame, regions: Regions, strategies: Strategies) -> Solution:
    owned = {
        player: {v: w for v, w in strategies[player].items() if v in regions[player] and game.owners[v] == player}
        for player in Player
    }
    return Solution(
        regions={player: frozenset(regions[player]) for player in Player},
        strategies=owned,
    )


def solve_parity(game: ParityGame) -> Solution:
    regions, strategies, rest = _dead_ends(game)
    sub_regions, sub_strategies = _zielonka(game, rest)
    for player in Player:
        regions[player] |= sub_regions[player]
        strategies[player].update(sub_strategies[player])
    solution = _solution(game, regions, strategies)
    logger.info(f"Solved parity game with {len(game)} nodes; diamond wins {len(solution.regions[Player.DIAMOND])}")
    return solution


def solve_buchi(game: ParityGame) -> Solution:
    """Repeatedly remove what box can attract to the nodes that cannot reach F again"""
    if not game.is_buchi:
        raise ConstructionError(f"Buchi solver got priorities {sorted(set(game.priorities))}")
    regions, strategies, nodes = _dead_ends(game)
    while True:
        accepting = {v for v in nodes if game.priorities[v] == 2}
        recurrent, moves = attractor(game, accepting, Player.DIAMOND, nodes)
        avoid = nodes - recurrent
        if not avoid:
            break
        lost, box_moves = attractor(game, avoid, Player.BOX, nodes)
        regions[Player.BOX] |= lost
        strategies[Player.BOX].update(box_moves)
        for v in avoid:
            if game.owners[v] == Player.BOX:
                strategies[Player.BOX][v] = _stay(game, v, avoid)
        nodes -= lost

    regions[Player.DIAMOND] |= nodes
    if nodes:
        strategies[Player.DIAMOND].update(moves)
        for v in accepting:
            if game.owners[v] == Player.DIAMOND:
                strategies[Player.DIAMOND][v] = _stay(game, v, nodes)
    solution = _solution(game, regions, strategies)
    logger.info(f"Solved Buchi game with {len(game)} nodes; diamond wins {len(solution.regions[Player.DIAMOND])}")
    return solution


def solve(game: ParityGame) -> Solution:
    """Buchi algorithm when the priorities allow it, Zielonka otherwise"""
    return solve_buchi(game) if game.is_buchi else solve_parity(game)
