# models/games.py
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, Hashable, Iterable, List, Optional, Tuple

from exceptions import ConstructionError
from models.automata import WordAutomaton


class Player(str, Enum):
    DIAMOND = "diamond"
    BOX = "box"

    @property
    def opponent(self) -> "Player":
        return Player.BOX if self == Player.DIAMOND else Player.DIAMOND

    @classmethod
    def of_parity(cls, priority: int) -> "Player":
        """The player favoured by a priority under the max-parity condition"""
        return cls.DIAMOND if priority % 2 == 0 else cls.BOX


@dataclass(frozen=True, eq=False)
class ParityGame:
    """Max-parity game on nodes 0 .. n-1; a node without successors loses for its owner"""
    owners: Tuple[Player, ...]
    successors: Tuple[Tuple[int, ...], ...]
    priorities: Tuple[int, ...]
    initial: int = 0
    labels: Tuple[Hashable, ...] = ()
    predecessors: Tuple[Tuple[int, ...], ...] = field(init=False, repr=False)

    def __post_init__(self):
        n = len(self.owners)
        if len(self.successors) != n or len(self.priorities) != n:
            raise ConstructionError("game component lengths disagree")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(range(n)))
        incoming: List[List[int]] = [[] for _ in range(n)]
        for v, targets in enumerate(self.successors):
            for w in targets:
                incoming[w].append(v)
        object.__setattr__(self, "predecessors", tuple(tuple(p) for p in incoming))

    def __len__(self) -> int:
        return len(self.owners)

    @property
    def nodes(self) -> range:
        return range(len(self.owners))

    @property
    def max_priority(self) -> int:
        return max(self.priorities, default=0)

    @property
    def is_buchi(self) -> bool:
        return set(self.priorities) <= {1, 2}

    def dead_ends(self) -> List[int]:
        return [v for v in self.nodes if not self.successors[v]]

    def node_count(self, owner: Player) -> int:
        return sum(1 for o in self.owners if o == owner)


@dataclass(frozen=True)
class Solution:
    """Winning regions and positional strategies of both players"""
    regions: Dict[Player, FrozenSet[int]]
    strategies: Dict[Player, Dict[int, int]]

    def winner(self, node: int) -> Player:
        return Player.DIAMOND if node in self.regions[Player.DIAMOND] else Player.BOX


@dataclass(frozen=True)
class ArenaNode:
    """A macro-state of APT states, optionally with the letter chosen for it"""
    states: FrozenSet[int]
    letter: Optional[int] = None
    losing: bool = False


LOSING = ArenaNode(frozenset(), None, losing=True)

# a modal move of player box when the node holds box states only
SERIAL = None


def letter_label(letter: int) -> tuple:
    return ("letter", letter)


def local_label(letter: int, choice: Iterable[Tuple[int, int]]) -> tuple:
    return ("local", letter, tuple(sorted(choice)))


def modal_label(letter: int, state: Optional[int]) -> tuple:
    return ("modal", letter, state)


@dataclass(frozen=True, eq=False)
class StrategyArena:
    """Reachable strategy arena; edges[v] lists (label, target) pairs"""
    nodes: Tuple[ArenaNode, ...]
    owners: Tuple[Player, ...]
    edges: Tuple[Tuple[Tuple[tuple, int], ...], ...]
    initial: int = 0
    sat_mode: bool = True

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def labels(self) -> FrozenSet[tuple]:
        return frozenset(label for out in self.edges for label, _ in out)

    @property
    def edge_count(self) -> int:
        return sum(len(out) for out in self.edges)


@dataclass(frozen=True, eq=False)
class ProductGame:
    """Product of an arena and a word automaton H over its labels.

    Main nodes are labelled ("main", arena node, H state), intermediate nodes
    ("label", arena label, arena node, H state) and the losing sink ("lose",).
    """
    game: ParityGame
    arena: StrategyArena
    tracking: WordAutomaton
    main_nodes: Dict[Tuple[int, Hashable], int]

    @property
    def initial(self) -> int:
        return self.game.initial
