# models/automata.py
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, FrozenSet, Hashable, Iterable, Mapping, Optional, Tuple

from exceptions import ConstructionError

State = Hashable
Letter = Hashable


class StateKind(str, Enum):
    OR = "or"            # local existential
    AND = "and"          # local universal
    DIAMOND = "diamond"  # modal existential
    BOX = "box"          # modal universal

    @property
    def is_local(self) -> bool:
        return self in (StateKind.OR, StateKind.AND)

    @property
    def is_existential(self) -> bool:
        return self in (StateKind.OR, StateKind.DIAMOND)


@dataclass(frozen=True, eq=False)
class APT:
    """Alternating parity tree automaton over the powerset of atoms.

    Letters are bitmasks over atoms. Transitions are letter-independent except
    at literal states, whose single successor is top or bottom depending on
    the letter. priorities may contain None before completion.
    """
    atoms: Tuple[str, ...]
    labels: Tuple[Hashable, ...]
    initial: int
    kinds: Tuple[StateKind, ...]
    successors: Tuple[Tuple[int, ...], ...]
    priorities: Tuple[Optional[int], ...]
    literals: Tuple[Optional[Tuple[int, bool]], ...] = ()
    top: Optional[int] = None
    bottom: Optional[int] = None

    def __post_init__(self):
        n = len(self.labels)
        if not self.literals:
            object.__setattr__(self, "literals", (None,) * n)
        if not (len(self.kinds) == len(self.successors) == len(self.priorities) == len(self.literals) == n):
            raise ConstructionError("APT component lengths disagree")
        for q in range(n):
            if not self.kinds[q].is_local and self.literals[q] is None and len(self.successors[q]) != 1:
                raise ConstructionError(f"modal state {self.labels[q]} must have exactly one successor")

    @property
    def states(self) -> range:
        return range(len(self.labels))

    @property
    def letters(self) -> range:
        return range(1 << len(self.atoms))

    @property
    def rank(self) -> int:
        return len({p for p in self.priorities if p is not None})

    def delta(self, q: int, letter: int) -> Tuple[int, ...]:
        literal = self.literals[q]
        if literal is None:
            return self.successors[q]
        atom, positive = literal
        holds = bool(letter >> atom & 1) == positive
        return (self.top,) if holds else (self.bottom,)

    def all_successors(self, q: int) -> Tuple[int, ...]:
        """Successors for some letter"""
        if self.literals[q] is None:
            return self.successors[q]
        return tuple(s for s in (self.top, self.bottom) if s is not None)

    def is_sink(self, q: int) -> bool:
        return q == self.top or q == self.bottom


class Acceptance(str, Enum):
    PARITY = "parity"
    BUCHI = "buchi"
    COBUCHI = "cobuchi"


@dataclass(frozen=True, eq=False)
class Resolver:
    """Finite-memory successor chooser of a history-deterministic automaton.

    choose(memory, state, letter) returns (successor, next memory), or
    (None, memory) when the state has no successor on the letter.
    """
    initial_memory: Hashable
    choose: Callable[[Hashable, State, Letter], Tuple[Optional[State], Hashable]]


@dataclass(frozen=True, eq=False)
class WordAutomaton:
    """Max-parity word automaton; Buchi and co-Buchi are restricted priority sets.

    The order of states and alphabet is canonical and used for tie-breaking.
    """
    alphabet: Tuple[Letter, ...]
    states: Tuple[State, ...]
    initial: State
    transitions: Mapping[Tuple[State, Letter], FrozenSet[State]]
    priorities: Mapping[State, int]
    acceptance: Acceptance = Acceptance.PARITY
    resolver: Optional[Resolver] = None
    _order: Dict[State, int] = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        object.__setattr__(self, "_order", {q: i for i, q in enumerate(self.states)})
        used = set(self.priorities.values())
        if self.acceptance == Acceptance.BUCHI and not used <= {1, 2}:
            raise ConstructionError(f"Buchi automaton uses priorities {sorted(used)}")
        if self.acceptance == Acceptance.COBUCHI and not used <= {0, 1}:
            raise ConstructionError(f"co-Buchi automaton uses priorities {sorted(used)}")

    def delta(self, q: State, a: Letter) -> FrozenSet[State]:
        return self.transitions.get((q, a), frozenset())

    def post(self, states: Iterable[State], a: Letter) -> FrozenSet[State]:
        result = set()
        for q in states:
            result |= self.delta(q, a)
        return frozenset(result)

    def priority(self, q: State) -> int:
        return self.priorities[q]

    def index(self, q: State) -> int:
        return self._order[q]

    def canonical(self, states: Iterable[State]) -> list:
        return sorted(states, key=self._order.__getitem__)

    @property
    def accepting(self) -> FrozenSet[State]:
        """F: priority 2 for Buchi, priority 0 for co-Buchi, even otherwise"""
        if self.acceptance == Acceptance.BUCHI:
            return frozenset(q for q in self.states if self.priorities[q] == 2)
        if self.acceptance == Acceptance.COBUCHI:
            return frozenset(q for q in self.states if self.priorities[q] == 0)
        return frozenset(q for q in self.states if self.priorities[q] % 2 == 0)

    @property
    def is_deterministic(self) -> bool:
        return all(len(targets) <= 1 for targets in self.transitions.values())

    @property
    def rank(self) -> int:
        return len(set(self.priorities.values()))

    @property
    def max_priority(self) -> int:
        return max(self.priorities.values(), default=0)

    def edges(self) -> Iterable[Tuple[State, Letter, State]]:
        for (q, a), targets in self.transitions.items():
            for r in targets:
                yield q, a, r

    @classmethod
    def from_edges(cls, edges: Iterable[Tuple[State, Letter, State]], initial: State, priorities: Mapping[State, int],
                   acceptance: Acceptance = Acceptance.PARITY, alphabet: Iterable[Letter] = (),
                   states: Iterable[State] = ()) -> "WordAutomaton":
        transitions: Dict[Tuple[State, Letter], set] = {}
        letters = list(alphabet)
        ordered = list(states) or [initial]
        for q, a, r in edges:
            transitions.setdefault((q, a), set()).add(r)
            for s in (q, r):
                if s not in ordered:
                    ordered.append(s)
            if a not in letters:
                letters.append(a)
        for q in priorities:
            if q not in ordered:
                ordered.append(q)
        return cls(
            alphabet=tuple(letters),
            states=tuple(ordered),
            initial=initial,
            transitions={key: frozenset(v) for key, v in transitions.items()},
            priorities={q: priorities[q] for q in ordered},
            acceptance=acceptance,
        )

    @classmethod
    def buchi(cls, edges, initial, accepting, **kwargs) -> "WordAutomaton":
        edges = list(edges)
        states = _mentioned(edges, initial, kwargs.get("states", ()))
        priorities = {q: 2 if q in accepting else 1 for q in states}
        return cls.from_edges(edges, initial, priorities, Acceptance.BUCHI, **kwargs)

    @classmethod
    def cobuchi(cls, edges, initial, accepting, **kwargs) -> "WordAutomaton":
        edges = list(edges)
        states = _mentioned(edges, initial, kwargs.get("states", ()))
        priorities = {q: 0 if q in accepting else 1 for q in states}
        return cls.from_edges(edges, initial, priorities, Acceptance.COBUCHI, **kwargs)


def _mentioned(edges, initial, states) -> list:
    ordered = list(states) or [initial]
    for q, _, r in edges:
        for s in (q, r):
            if s not in ordered:
                ordered.append(s)
    return ordered


@dataclass(frozen=True)
class FocusState:
    """Macro-state of the focus construction; focus is None when unfocused"""
    macro: FrozenSet[State]
    focus: Optional[State] = None


@dataclass(frozen=True)
class FreshInitial:
    """Nondeterministic copy of an initial state that is reachable from F"""
    state: State

    def __str__(self) -> str:
        return f"{self.state}'"


@dataclass(frozen=True)
class UPWord:
    """The ultimately periodic word prefix . period^omega"""
    prefix: Tuple[Letter, ...]
    period: Tuple[Letter, ...]

    def __post_init__(self):
        if not self.period:
            raise ValueError("the period of an ultimately periodic word must be nonempty")

    def __len__(self) -> int:
        return len(self.prefix) + len(self.period)

    def letter(self, position: int) -> Letter:
        if position < len(self.prefix):
            return self.prefix[position]
        return self.period[(position - len(self.prefix)) % len(self.period)]

    def next_position(self, position: int) -> int:
        """Successor in the lasso of positions 0 .. len-1"""
        return position + 1 if position + 1 < len(self) else len(self.prefix)
