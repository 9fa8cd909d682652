# services/tree_automaton.py
import logging
from typing import Dict, Hashable, List, Mapping, Optional

import networkx as N

import config
from exceptions import AlphabetCapError, PriorityCompletionError
from models.automata import APT, StateKind
from models.formula import BOT, FIXPOINTS, TOP, ClosureTable, Formula, Kind
from models.report import APTClass
from services.formula_service import unfold

logger = logging.getLogger(__name__)


def mentioned_atoms(t: ClosureTable) -> List[str]:
    return sorted({g.name for g in t.formulas if g.is_literal})


def formula_to_apt(f: Formula, t: ClosureTable) -> APT:
    """Formula automaton over FL(f) plus top and bottom, priorities completed"""
    atoms = mentioned_atoms(t)
    if len(atoms) > config.MAX_ATOMS:
        raise AlphabetCapError(f"{len(atoms)} atoms exceed the alphabet cap of {config.MAX_ATOMS}")
    atom_index = {name: i for i, name in enumerate(atoms)}

    labels: List[Formula] = list(t.formulas)
    for sink in (TOP, BOT):
        if sink not in labels:
            labels.append(sink)
    index = {g: i for i, g in enumerate(labels)}

    kinds, successors, priorities, literals = [], [], [], []
    for g in labels:
        literal = None
        priority: Optional[int] = None
        if g.kind == Kind.AND:
            kind, succ = StateKind.AND, (index[g.left], index[g.right])
        elif g.kind == Kind.OR:
            kind, succ = StateKind.OR, (index[g.left], index[g.right])
        elif g.kind in FIXPOINTS:
            kind, succ = StateKind.OR, (index[unfold(g)],)
            priority = t.level(g)
        elif g.kind == Kind.DIAMOND:
            kind, succ = StateKind.DIAMOND, (index[g.body],)
        elif g.kind == Kind.BOX:
            kind, succ = StateKind.BOX, (index[g.body],)
        elif g.is_literal:
            kind, succ = StateKind.AND, ()
            literal = (atom_index[g.name], g.kind == Kind.ATOM)
        elif g.kind == Kind.TOP:
            kind, succ, priority = StateKind.AND, (index[TOP],), 0
        elif g.kind == Kind.BOT:
            kind, succ, priority = StateKind.OR, (index[BOT],), 1
        else:
            raise PriorityCompletionError(f"closure member {g} is not a closed formula")
        kinds.append(kind)
        successors.append(succ)
        priorities.append(priority)
        literals.append(literal)

    partial = APT(
        atoms=tuple(atoms),
        labels=tuple(labels),
        initial=index[f],
        kinds=tuple(kinds),
        successors=tuple(successors),
        priorities=tuple(priorities),
        literals=tuple(literals),
        top=index[TOP],
        bottom=index[BOT],
    )
    apt = complete_priorities(partial)
    logger.info(f"Built APT with {len(apt.labels)} states, {len(atoms)} atoms and rank {apt.rank}")
    return apt


def apt_graph(a: APT, with_sinks: bool = False) -> N.DiGraph:
    """State graph of a, letters forgotten; top and bottom only on request"""
    graph = N.DiGraph()
    for q in a.states:
        if not with_sinks and a.is_sink(q):
            continue
        graph.add_node(q)
        for r in a.all_successors(q):
            if with_sinks or not a.is_sink(r):
                graph.add_edge(q, r)
    return graph


def _cyclic(graph: N.DiGraph, component) -> bool:
    if len(component) > 1:
        return True
    (q,) = component
    return graph.has_edge(q, q)


def complete_priority_map(graph: N.DiGraph, assigned: Mapping[Hashable, int]) -> Dict[Hashable, int]:
    """Extend assigned to every node of graph.

    A node on a cycle gets the least p such that some cycle through it only
    visits assigned priorities up to p; nodes on no cycle get 0.
    """
    free = [q for q in graph if q not in assigned]
    free_graph = graph.subgraph(free)
    for component in N.strongly_connected_components(free_graph):
        if _cyclic(free_graph, component):
            names = sorted(map(str, component))[:5]
            raise PriorityCompletionError(f"cycle through {names} carries no assigned priority")

    result = dict(assigned)
    pending = set(free)
    for p in sorted(set(assigned.values())):
        if not pending:
            break
        allowed = [q for q in graph if q not in assigned or assigned[q] <= p]
        bounded = graph.subgraph(allowed)
        for component in N.strongly_connected_components(bounded):
            if _cyclic(bounded, component):
                for q in component & pending:
                    result[q] = p
                pending -= component
    for q in pending:
        result[q] = 0
    return result


def complete_priorities(a: APT) -> APT:
    assigned = {q: p for q, p in enumerate(a.priorities) if p is not None}
    completed = complete_priority_map(apt_graph(a, with_sinks=True), assigned)
    return APT(
        atoms=a.atoms,
        labels=a.labels,
        initial=a.initial,
        kinds=a.kinds,
        successors=a.successors,
        priorities=tuple(completed[q] for q in a.states),
        literals=a.literals,
        top=a.top,
        bottom=a.bottom,
    )


def _is_weak(a: APT, graph: N.DiGraph, components: List[set]) -> bool:
    for component in components:
        used = {a.priorities[q] for q in component}
        if used != {0} and used != {1}:
            return False
    return True


def _is_limit_linear(a: APT, graph: N.DiGraph, components: List[set]) -> bool:
    for component in components:
        if not _cyclic(graph, component) or a.priorities[next(iter(component))] != 1:
            continue
        for q in component:
            if sum(1 for r in graph.successors(q) if r in component) != 1:
                return False
    return True


def _is_limit_deterministic(a: APT, graph: N.DiGraph) -> bool:
    """Inside every cycle of states with priority at most an odd p that passes a
    priority-p state, each conjunction keeps at most one successor on such a cycle"""
    for p in sorted({a.priorities[q] for q in graph if a.priorities[q] % 2 == 1}):
        bounded = graph.subgraph([q for q in graph if a.priorities[q] <= p])
        for component in N.strongly_connected_components(bounded):
            if not _cyclic(bounded, component):
                continue
            if not any(a.priorities[q] == p for q in component):
                continue
            for q in component:
                if a.kinds[q] != StateKind.AND:
                    continue
                if sum(1 for r in bounded.successors(q) if r in component) > 1:
                    return False
    return True


def classify_apt(a: APT) -> APTClass:
    graph = apt_graph(a)
    components = [set(c) for c in N.strongly_connected_components(graph)]
    weak = _is_weak(a, graph, components)
    limit_linear = weak and _is_limit_linear(a, graph, components)
    limit_deterministic = limit_linear or _is_limit_deterministic(a, graph)
    return APTClass(weak=weak, limit_linear=limit_linear, limit_deterministic=limit_deterministic)


def has_local_cycle(a: APT) -> bool:
    """True iff some cycle runs through local states only, top and bottom ignored"""
    graph = apt_graph(a)
    local = graph.subgraph([q for q in graph if a.kinds[q].is_local])
    return any(_cyclic(local, c) for c in N.strongly_connected_components(local))
