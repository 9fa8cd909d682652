# services/word_automaton.py
import logging
import math
from collections import deque
from typing import Callable, Dict, FrozenSet, Hashable, Iterable, List, Optional, Sequence, Set, Tuple

import networkx as N

from exceptions import ConstructionError
from models.automata import Acceptance, FocusState, FreshInitial, Resolver, UPWord, WordAutomaton
from models.report import WordClass
from utils import check_bound

logger = logging.getLogger(__name__)


def automaton_graph(a: WordAutomaton, states: Optional[Iterable[Hashable]] = None) -> N.DiGraph:
    keep = set(a.states if states is None else states)
    graph = N.DiGraph()
    graph.add_nodes_from(q for q in a.states if q in keep)
    for q, _, r in a.edges():
        if q in keep and r in keep:
            graph.add_edge(q, r)
    return graph


def _cyclic(graph: N.DiGraph, component) -> bool:
    if len(component) > 1:
        return True
    (q,) = component
    return graph.has_edge(q, q)


def _even_cycle_states(graph: N.DiGraph, priority: Callable[[Hashable], int]) -> Set[Hashable]:
    """Nodes lying on some cycle whose maximal priority is even"""
    found = set()
    for p in sorted({priority(v) for v in graph if priority(v) % 2 == 0}):
        bounded = graph.subgraph([v for v in graph if priority(v) <= p])
        for component in N.strongly_connected_components(bounded):
            if _cyclic(bounded, component) and any(priority(v) == p for v in component):
                found |= component
    return found


def _reachable(a: WordAutomaton, start: Hashable) -> List[Hashable]:
    seen = {start: None}
    queue = deque([start])
    while queue:
        q = queue.popleft()
        for letter in a.alphabet:
            for r in a.canonical(a.delta(q, letter)):
                if r not in seen:
                    seen[r] = None
                    queue.append(r)
    return list(seen)


def restrict(a: WordAutomaton, keep: Iterable[Hashable]) -> WordAutomaton:
    """Sub-automaton on keep (the initial state always stays)"""
    keep = set(keep) | {a.initial}
    transitions = {}
    for (q, letter), targets in a.transitions.items():
        if q in keep:
            inside = frozenset(r for r in targets if r in keep)
            if inside:
                transitions[(q, letter)] = inside
    return WordAutomaton(
        alphabet=a.alphabet,
        states=tuple(q for q in a.states if q in keep),
        initial=a.initial,
        transitions=transitions,
        priorities={q: a.priorities[q] for q in a.states if q in keep},
        acceptance=a.acceptance,
    )


def trim(a: WordAutomaton) -> WordAutomaton:
    """Keep the states that are reachable and can still reach an accepting cycle"""
    reachable = _reachable(a, a.initial)
    graph = automaton_graph(a, reachable)
    seeds = _even_cycle_states(graph, a.priority)
    useful = set(seeds)
    for q in seeds:
        useful |= N.ancestors(graph, q)
    trimmed = restrict(a, useful)
    logger.debug(f"Trimmed automaton from {len(a.states)} to {len(trimmed.states)} states")
    return trimmed


def is_deterministic(a: WordAutomaton) -> bool:
    return a.is_deterministic


def _is_weak(a: WordAutomaton, graph: N.DiGraph) -> bool:
    for component in N.strongly_connected_components(graph):
        if _cyclic(graph, component) and len({a.priorities[q] for q in component}) > 1:
            return False
    return True


def weak_to_cobuchi(a: WordAutomaton) -> WordAutomaton:
    """View a weak automaton as co-Buchi: even-priority states become F"""
    if a.acceptance == Acceptance.COBUCHI:
        return a
    if not _is_weak(a, automaton_graph(a)):
        raise ConstructionError("automaton is not weak")
    return WordAutomaton(
        alphabet=a.alphabet,
        states=a.states,
        initial=a.initial,
        transitions=a.transitions,
        priorities={q: 0 if p % 2 == 0 else 1 for q, p in a.priorities.items()},
        acceptance=Acceptance.COBUCHI,
        resolver=a.resolver,
    )


def _is_limit_linear(a: WordAutomaton, synchronizing: bool) -> bool:
    if a.acceptance != Acceptance.COBUCHI:
        return False
    inside = automaton_graph(a, a.accepting)
    for component in N.strongly_connected_components(inside):
        if not _cyclic(inside, component):
            continue
        for q in component:
            targets = set(inside.successors(q)) & component
            if synchronizing and len(component) > 1:
                targets.discard(q)
            if len(targets) != 1:
                return False
            if synchronizing and any(len(a.delta(q, letter) & component) > 1 for letter in a.alphabet):
                return False
    return True


def _compartment(a: WordAutomaton, q: Hashable) -> Set[Hashable]:
    bound = a.priorities[q]
    seen = {q}
    stack = [q]
    while stack:
        r = stack.pop()
        for letter in a.alphabet:
            for s in a.delta(r, letter):
                if s not in seen and a.priorities[s] <= bound:
                    seen.add(s)
                    stack.append(s)
    return seen


def _is_limit_deterministic(a: WordAutomaton) -> bool:
    checked: Set[FrozenSet] = set()
    for q in a.states:
        if a.priorities[q] % 2:
            continue
        compartment = frozenset(_compartment(a, q))
        if compartment in checked:
            continue
        checked.add(compartment)
        for r in compartment:
            for letter in a.alphabet:
                if len(a.delta(r, letter) & compartment) > 1:
                    return False
    return True


def classify_word(a: WordAutomaton, synchronizing: bool = False) -> WordClass:
    """Weakness, limit-linearity (co-Buchi only) and limit-determinism flags.

    With synchronizing, self-loops inside an accepting cycle are stutter steps
    and do not count as a second looping path.
    """
    return WordClass(
        weak=_is_weak(a, automaton_graph(a)),
        limit_linear=_is_limit_linear(a, synchronizing),
        limit_deterministic=_is_limit_deterministic(a),
    )


def _explore(initial, alphabet: Sequence, successors: Callable[[Hashable, Hashable], Iterable[Hashable]],
             priority: Callable[[Hashable], int], acceptance: Acceptance, limit: float, what: str) -> WordAutomaton:
    """Build the part of a construction reachable from initial, breadth first"""
    order = {initial: None}
    transitions: Dict[Tuple[Hashable, Hashable], FrozenSet] = {}
    queue = deque([initial])
    while queue:
        state = queue.popleft()
        for letter in alphabet:
            targets = list(successors(state, letter))
            if not targets:
                continue
            transitions[(state, letter)] = frozenset(targets)
            for target in targets:
                if target not in order:
                    order[target] = None
                    queue.append(target)
                    check_bound(what, len(order), limit)
    states = tuple(order)
    result = WordAutomaton(
        alphabet=tuple(alphabet),
        states=states,
        initial=initial,
        transitions=transitions,
        priorities={q: priority(q) for q in states},
        acceptance=acceptance,
    )
    logger.info(f"{what} has {len(states)} states (bound {limit:.0f})")
    return result


def parity_to_buchi(a: WordAutomaton, confine: bool = False) -> WordAutomaton:
    """Guess a position and an even priority i; afterwards stay at priorities <= i
    and see i infinitely often.

    States are (q, None) before the guess and (q, i) after it. With confine,
    guessed runs must also stay inside one strongly connected component of
    the states with priority at most i, which keeps the language and the
    bound and removes branches that cannot come back.
    """
    evens = sorted({p for p in a.priorities.values() if p % 2 == 0})
    components: Dict[int, Dict[Hashable, int]] = {}
    if confine:
        graph = automaton_graph(a)
        for i in evens:
            bounded = graph.subgraph([q for q in a.states if a.priorities[q] <= i])
            members = {}
            for number, component in enumerate(N.strongly_connected_components(bounded)):
                if _cyclic(bounded, component):
                    for q in component:
                        members[q] = number
            components[i] = members

    def same_component(q, r, i) -> bool:
        if not confine:
            return True
        members = components[i]
        return q in members and members.get(r) == members[q]

    def successors(state, letter):
        q, i = state
        targets = a.canonical(a.delta(q, letter))
        if i is None:
            result = [(r, None) for r in targets]
            for r in targets:
                p = a.priorities[r]
                if p % 2 == 0 and (not confine or r in components[p]):
                    result.append((r, p))
            return result
        return [(r, i) for r in targets if a.priorities[r] <= i and same_component(q, r, i)]

    def priority(state):
        q, i = state
        return 2 if i is not None and a.priorities[q] == i else 1

    m = a.max_priority
    bound = (math.ceil((m + 1) / 2) + 1) * len(a.states)
    return _explore((a.initial, None), a.alphabet, successors, priority, Acceptance.BUCHI, bound, "parity-to-Buchi automaton")


def _require(a: WordAutomaton, acceptance: Acceptance, construction: str) -> None:
    if a.acceptance != acceptance:
        raise ConstructionError(f"{construction} expects a {acceptance.value} automaton, got {a.acceptance.value}")


def _accepting_cycles(a: WordAutomaton) -> List[List[Hashable]]:
    """Nontrivial SCCs inside F, each in canonical order, ordered by their first state"""
    inside = automaton_graph(a, a.accepting)
    cycles = [a.canonical(c) for c in N.strongly_connected_components(inside) if _cyclic(inside, c)]
    return sorted(cycles, key=lambda c: a.index(c[0]))


def circle_determinize(a: WordAutomaton) -> WordAutomaton:
    """Deterministic co-Buchi automaton for a limit-linear co-Buchi automaton.

    States are (U, token, counter): the subset of live states, the state a token
    follows around an accepting cycle and the number of misses left before the
    token moves on to the next cycle. Counter 0 is the only rejecting case.
    """
    _require(a, Acceptance.COBUCHI, "circle method")
    if not classify_word(a, synchronizing=True).limit_linear:
        raise ConstructionError("circle method needs a limit-linear automaton")
    accepting = a.accepting
    if accepting == frozenset(a.states) and a.is_deterministic:
        return a

    n, f = len(a.states), len(accepting)
    bound = n * n * 2 ** n if f < n else n * (f + 1) * 2 ** n
    sink = (frozenset(), None, 0)
    cycles = _accepting_cycles(a)
    if not cycles:
        logger.info("Circle method found no accepting cycle; the language is empty")
        return WordAutomaton(
            alphabet=a.alphabet,
            states=(sink,),
            initial=sink,
            transitions={(sink, letter): frozenset({sink}) for letter in a.alphabet},
            priorities={sink: 1},
            acceptance=Acceptance.COBUCHI,
        )

    cycle_of: Dict[Hashable, int] = {}
    for number, cycle in enumerate(cycles):
        for q in cycle:
            cycle_of[q] = number
    inside = automaton_graph(a, accepting)

    def step(q):
        cycle = set(cycles[cycle_of[q]])
        others = [r for r in a.canonical(set(inside.successors(q)) & cycle) if r != q]
        return others[0] if others else q

    def following(q):
        if q not in cycle_of:
            return cycles[0][0]
        return cycles[(cycle_of[q] + 1) % len(cycles)][0]

    def successors(state, letter):
        live, token, counter = state
        if not live:
            return [sink]
        after = a.post(live, letter)
        if not after:
            return [sink]
        moves = a.delta(token, letter) & frozenset(cycles[cycle_of[token]]) if token in cycle_of else frozenset()
        if counter != 0 and token in live and len(moves) == 1:
            return [(after, next(iter(moves)), counter)]
        if counter == 0:
            return [(after, following(token), f)]
        return [(after, step(step(token)), counter - 1)]

    def priority(state):
        return 0 if state[2] != 0 else 1

    initial = (frozenset({a.initial}), a.initial, 0)
    return _explore(initial, a.alphabet, successors, priority, Acceptance.COBUCHI, bound, "circle automaton")


def miyano_hayashi(a: WordAutomaton) -> WordAutomaton:
    """Breakpoint construction: (U, V) with V the runs that stayed in F since the last breakpoint"""
    _require(a, Acceptance.COBUCHI, "Miyano-Hayashi construction")
    accepting = a.accepting

    def successors(state, letter):
        live, tracked = state
        after = a.post(live, letter)
        if tracked:
            return [(after, a.post(tracked, letter) & accepting)]
        return [(after, after & accepting)]

    def priority(state):
        return 0 if state[1] else 1

    initial = (frozenset({a.initial}), frozenset())
    return _explore(initial, a.alphabet, successors, priority, Acceptance.COBUCHI, 3 ** len(a.states),
                    "Miyano-Hayashi automaton")


def _deterministic_part(a: WordAutomaton) -> List[Hashable]:
    accepting = a.accepting
    graph = automaton_graph(a)
    part = set(accepting)
    for q in accepting:
        part |= N.descendants(graph, q)
    return a.canonical(part)


def permutation_determinize(a: WordAutomaton) -> WordAutomaton:
    """Deterministic parity automaton for a limit-deterministic Buchi automaton.

    States are (U, order, p): the live nondeterministic states, the live
    deterministic states ordered by age and the priority of the step that led
    here. A position that dies or merges into an older one is ending; one that
    enters F is active. The leftmost such position decides the priority.
    """
    _require(a, Acceptance.BUCHI, "permutation method")
    accepting = a.accepting
    deterministic = _deterministic_part(a)
    determined = set(deterministic)
    for q in deterministic:
        for letter in a.alphabet:
            if len(a.delta(q, letter)) > 1:
                raise ConstructionError(f"permutation method needs a limit-deterministic automaton; {q} branches on {letter}")

    start = a.initial
    fresh = a.initial in determined
    if fresh:
        start = FreshInitial(a.initial)

    def post(q, letter):
        return a.delta(q.state if isinstance(q, FreshInitial) else q, letter)

    k = len(deterministic)

    def successors(state, letter):
        live, order, _ = state
        following: List[Hashable] = []
        decisive = None
        for i, q in enumerate(order, start=1):
            targets = a.delta(q, letter)
            if not targets or next(iter(targets)) in following:
                if decisive is None:
                    decisive = (i, True)
                continue
            (r,) = targets
            following.append(r)
            if decisive is None and r in accepting:
                decisive = (i, False)
        if decisive is None:
            p = 1
        else:
            i, ending = decisive
            p = 2 * (k - i) + (3 if ending else 2)

        reached = set()
        for q in live:
            reached |= post(q, letter)
        for r in a.canonical(reached & determined):
            if r not in following:
                following.append(r)
        return [(frozenset(r for r in reached if r not in determined), tuple(following), p)]

    def priority(state):
        return state[2]

    n = len(a.states) + (1 if fresh else 0)
    bound = math.e * math.factorial(n + 1)
    initial = (frozenset({start}), (), 1)
    result = _explore(initial, a.alphabet, successors, priority, Acceptance.PARITY, bound, "permutation automaton")
    check_bound("permutation automaton priorities", result.max_priority, 2 * k + 1)
    return result


def focus_history_determinize(a: WordAutomaton) -> WordAutomaton:
    """History-deterministic co-Buchi automaton for a limit-deterministic co-Buchi one.

    Focused states (U, q) follow a single F-run deterministically; unfocused
    states may refocus onto any F-state. The attached resolver refocuses on
    the state whose F-trace is oldest.
    """
    _require(a, Acceptance.COBUCHI, "focus method")
    if not classify_word(a).limit_deterministic:
        raise ConstructionError("focus method needs a limit-deterministic automaton")
    accepting = a.accepting

    def successors(state: FocusState, letter):
        after = a.post(state.macro, letter)
        if state.focus is None:
            return [FocusState(after)] + [FocusState(after, q) for q in a.canonical(after & accepting)]
        ahead = a.delta(state.focus, letter) & accepting
        if len(ahead) > 1:
            raise ConstructionError(f"accepting state {state.focus} has several accepting {letter}-successors")
        if ahead:
            return [FocusState(after, next(iter(ahead)))]
        return [FocusState(after)]

    def priority(state: FocusState):
        return 0 if state.focus is not None else 1

    bound = (len(accepting) + 1) * 2 ** len(a.states)
    built = _explore(FocusState(frozenset({a.initial})), a.alphabet, successors, priority, Acceptance.COBUCHI,
                     bound, "focus automaton")
    return WordAutomaton(
        alphabet=built.alphabet,
        states=built.states,
        initial=built.initial,
        transitions=built.transitions,
        priorities=built.priorities,
        acceptance=Acceptance.COBUCHI,
        resolver=age_resolver(a),
    )


def age_resolver(a: WordAutomaton) -> Resolver:
    """Refocus on the accepting state whose trace through F is oldest.

    Memory is the tuple of accepting states of the macro-state ordered by the
    age of their F-traces.
    """
    accepting = a.accepting

    def choose(memory, state: FocusState, letter):
        after = a.post(state.macro, letter)
        ages: List[Hashable] = []
        for q in memory:
            for r in a.canonical(a.delta(q, letter) & accepting):
                if r not in ages:
                    ages.append(r)
        for r in a.canonical(after & accepting):
            if r not in ages:
                ages.append(r)
        updated = tuple(ages)
        if state.focus is not None:
            ahead = a.delta(state.focus, letter) & accepting
            return (FocusState(after, next(iter(ahead))) if ahead else FocusState(after)), updated
        if updated:
            return FocusState(after, updated[0]), updated
        return FocusState(after), updated

    return Resolver(initial_memory=(), choose=choose)


def resolver_run(a: WordAutomaton, resolver: Resolver, word: Sequence[Hashable]) -> List[Hashable]:
    """States visited by the resolver on a finite word, starting with the initial state"""
    run = [a.initial]
    memory = resolver.initial_memory
    for letter in word:
        state, memory = resolver.choose(memory, run[-1], letter)
        if state is None:
            break
        if state not in a.delta(run[-1], letter):
            raise ConstructionError(f"resolver chose {state}, which is not a {letter}-successor of {run[-1]}")
        run.append(state)
    return run


def resolver_accepts(a: WordAutomaton, resolver: Resolver, w: UPWord) -> bool:
    """Whether the resolver-induced run on an ultimately periodic word is accepting"""
    position, state, memory = 0, a.initial, resolver.initial_memory
    seen: Dict[Tuple, int] = {}
    visited: List[Hashable] = []
    while (position, state, memory) not in seen:
        seen[(position, state, memory)] = len(visited)
        visited.append(state)
        letter = w.letter(position)
        target, memory = resolver.choose(memory, state, letter)
        if target is None or target not in a.delta(state, letter):
            return False
        state = target
        position = w.next_position(position)
    loop = visited[seen[(position, state, memory)]:]
    return max(a.priorities[q] for q in loop) % 2 == 0


def membership_upword(a: WordAutomaton, w: UPWord) -> bool:
    """Whether u.v^omega is accepted, by a lasso search in the product with the word"""
    start = (0, a.initial)
    graph = N.DiGraph()
    graph.add_node(start)
    queue = deque([start])
    while queue:
        position, q = queue.popleft()
        following = w.next_position(position)
        for r in a.delta(q, w.letter(position)):
            node = (following, r)
            if node not in graph:
                graph.add_node(node)
                queue.append(node)
            graph.add_edge((position, q), node)
    return bool(_even_cycle_states(graph, lambda node: a.priorities[node[1]]))
