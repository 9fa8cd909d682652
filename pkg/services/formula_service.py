# services/formula_service.py
import logging
from collections import Counter
from typing import Dict, FrozenSet, List, Tuple

import networkx as N

from exceptions import UnboundVariableError, UnguardedFormulaError
from models.formula import FIXPOINTS, ClosureTable, Formula, Kind
from models.report import Fragment, FragmentReport
from utils import fresh_name

logger = logging.getLogger(__name__)

_BINARY = {Kind.AND: "&", Kind.OR: "|"}
_PREFIX = {Kind.DIAMOND: "<>", Kind.BOX: "[]"}


def pretty(f: Formula) -> str:
    """Render f in the concrete syntax accepted by services.parser.parse"""
    if f.kind == Kind.ATOM or f.kind == Kind.VAR:
        return f.name
    if f.kind == Kind.NEG_ATOM:
        return f"~{f.name}"
    if f.kind == Kind.TOP:
        return "true"
    if f.kind == Kind.BOT:
        return "false"
    if f.kind in _PREFIX:
        return f"{_PREFIX[f.kind]}{_operand(f.body)}"
    if f.kind in FIXPOINTS:
        return f"{f.kind.value} {f.name}. {pretty(f.body)}"
    return f"{_operand(f.left)} {_BINARY[f.kind]} {_operand(f.right)}"


def _operand(f: Formula) -> str:
    if f.kind in _BINARY or f.kind in FIXPOINTS:
        return f"({pretty(f)})"
    return pretty(f)


def size(f: Formula) -> int:
    """Number of nodes in the syntax tree"""
    return 1 + sum(size(c) for c in f.children)


def free_variables(f: Formula) -> FrozenSet[str]:
    if f.kind == Kind.VAR:
        return frozenset({f.name})
    if f.kind in FIXPOINTS:
        return free_variables(f.body) - {f.name}
    result = frozenset()
    for child in f.children:
        result |= free_variables(child)
    return result


def subformulas(f: Formula) -> List[Formula]:
    """All subformula occurrences in prefix order"""
    result = [f]
    for child in f.children:
        result.extend(subformulas(child))
    return result


def substitute(f: Formula, name: str, replacement: Formula) -> Formula:
    """Replace free occurrences of variable name in f.

    Capture cannot happen on clean formulas substituted with closed
    replacements, which is all the closure ever does.
    """
    if f.kind == Kind.VAR:
        return replacement if f.name == name else f
    if f.kind in FIXPOINTS and f.name == name:
        return f
    if not f.children:
        return f
    return Formula(f.kind, f.name, tuple(substitute(c, name, replacement) for c in f.children), f.span)


def unfold(f: Formula) -> Formula:
    """psi[X -> eta X. psi] for a fixpoint formula eta X. psi"""
    return substitute(f.body, f.name, f)


def _binder_names(f: Formula) -> List[str]:
    return [g.name for g in subformulas(f) if g.kind in FIXPOINTS]


def make_clean(f: Formula) -> Tuple[Formula, bool]:
    """Rename binders so that every variable is bound exactly once.

    Only names bound more than once are renamed; each of their binders gets
    its own indexed name. Returns the formula and whether anything changed.
    """
    counts = Counter(_binder_names(f))
    clashing = {name for name, n in counts.items() if n > 1}
    if not clashing:
        return f, False

    taken = set(counts) | free_variables(f)

    def rename(g: Formula, env: Dict[str, str]) -> Formula:
        if g.kind == Kind.VAR:
            return Formula(Kind.VAR, env.get(g.name, g.name), (), g.span)
        if g.kind in FIXPOINTS:
            name = g.name
            if name in clashing:
                name = fresh_name(g.name, taken)
                taken.add(name)
            return Formula(g.kind, name, (rename(g.body, {**env, g.name: name}),), g.span)
        if not g.children:
            return g
        return Formula(g.kind, g.name, tuple(rename(c, env) for c in g.children), g.span)

    cleaned = rename(f, {})
    logger.warning(f"Renamed repeated binders {sorted(clashing)}; the closure may grow")
    return cleaned, True


def check_guarded(f: Formula) -> bool:
    """True iff every bound variable occurrence sits below a modality under its binder"""

    def walk(g: Formula, guarded: Dict[str, bool]) -> bool:
        if g.kind == Kind.VAR:
            return guarded.get(g.name, True)
        if g.kind in FIXPOINTS:
            return walk(g.body, {**guarded, g.name: False})
        if g.kind in (Kind.DIAMOND, Kind.BOX):
            return walk(g.body, {name: True for name in guarded})
        return all(walk(c, guarded) for c in g.children)

    return walk(f, {})


def binders(f: Formula) -> Dict[str, Formula]:
    """Map each bound variable of a clean formula to its binding subformula"""
    return {g.name: g for g in subformulas(f) if g.kind in FIXPOINTS}


def closure(f: Formula) -> ClosureTable:
    """Fischer-Ladner closure by saturation, in discovery order"""
    seen = {f: None}
    queue = [f]
    while queue:
        g = queue.pop(0)
        if g.kind in FIXPOINTS:
            successors = (unfold(g),)
        else:
            successors = g.children
        for h in successors:
            if h not in seen:
                seen[h] = None
                queue.append(h)
    return ClosureTable(root=f, formulas=tuple(seen), theta=binders(f))


def dependency_graph(f: Formula) -> N.DiGraph:
    """Edges X -> Y where binder Y has a free occurrence of X, i.e. depends on X"""
    theta = binders(f)
    graph = N.DiGraph()
    graph.add_nodes_from(theta)
    for y, chi in theta.items():
        for x in free_variables(chi):
            if x in theta:
                graph.add_edge(x, y)
    return graph


def alternation(f: Formula, table: ClosureTable) -> ClosureTable:
    """Fill in alternation levels of every binder and the alternation depth.

    d(X) is the length of the longest chain of binders starting at X, each
    depending transitively on the previous one and of the opposite type.
    """
    theta = table.theta
    reach = N.transitive_closure_dag(dependency_graph(f))
    chain: Dict[str, int] = {}
    for x in reversed(list(N.topological_sort(reach))):
        chain[x] = 1 + max(
            (chain[y] for y in reach.successors(x) if theta[y].kind != theta[x].kind),
            default=0,
        )

    levels = {}
    for x, d in chain.items():
        if theta[x].kind == Kind.MU:
            levels[x] = 2 * ((d + 1) // 2) - 1
        else:
            levels[x] = 2 * (d // 2)
    depth = max(chain.values(), default=0)
    return ClosureTable(root=table.root, formulas=table.formulas, theta=theta, levels=levels, depth=depth)


def _occurrences(f: Formula, name: str) -> int:
    if f.kind == Kind.VAR:
        return int(f.name == name)
    return sum(_occurrences(c, name) for c in f.children)


def _under_fixpoint(f: Formula, name: str, below: bool = False) -> bool:
    if f.kind == Kind.VAR:
        return below and f.name == name
    inner = below or f.kind in FIXPOINTS
    return any(_under_fixpoint(c, name, inner) for c in f.children)


def carrying_variables(theta: Dict[str, Formula]) -> FrozenSet[str]:
    """Least fixpoint variables and the greatest fixpoint variables whose binder mentions one, transitively"""
    carrying = {x for x, g in theta.items() if g.kind == Kind.MU}
    changed = True
    while changed:
        changed = False
        for x, g in theta.items():
            if x not in carrying and free_variables(g) & carrying:
                carrying.add(x)
                changed = True
    return frozenset(carrying)


def classify_fragment(f: Formula, table: ClosureTable) -> FragmentReport:
    theta = table.theta
    mu_vars = {x for x, g in theta.items() if g.kind == Kind.MU}
    alternation_free = table.depth <= 1

    # a nu-variable that closes over a mu-variable re-enters the same odd cycle
    carrying = carrying_variables(theta)
    aconjunctive = all(
        not (free_variables(g.left) & carrying and free_variables(g.right) & carrying)
        for g in subformulas(f)
        if g.kind == Kind.AND
    )

    linear_binders = all(
        _occurrences(theta[x].body, x) == 1 and not _under_fixpoint(theta[x].body, x)
        for x in mu_vars
    )
    # the syntactic condition alone admits nu-binders around a linear mu; the
    # fragment is its intersection with the alternation-free aconjunctive one
    limit_linear = linear_binders and alternation_free and aconjunctive

    if limit_linear:
        best = Fragment.LIMIT_LINEAR
    elif alternation_free and aconjunctive:
        best = Fragment.AF_ACONJUNCTIVE
    elif alternation_free:
        best = Fragment.ALTERNATION_FREE
    elif aconjunctive:
        best = Fragment.ACONJUNCTIVE
    else:
        best = Fragment.UNRESTRICTED

    return FragmentReport(
        limit_linear=limit_linear,
        alternation_free=alternation_free,
        aconjunctive=aconjunctive,
        af_aconjunctive=alternation_free and aconjunctive,
        best_fragment=best,
        ad=table.depth,
    )


def analyze(f: Formula) -> Tuple[ClosureTable, FragmentReport]:
    table = alternation(f, closure(f))
    return table, classify_fragment(f, table)


def parse_clean(text: str) -> Formula:
    """Parse, rename binders apart and reject unguarded input"""
    from services.parser import parse

    return prepare(parse(text))


def prepare(f: Formula) -> Formula:
    free = free_variables(f)
    if free:
        raise UnboundVariableError(f"unbound variable(s): {', '.join(sorted(free))}")
    f, _ = make_clean(f)
    if not check_guarded(f):
        raise UnguardedFormulaError(f"formula {pretty(f)} is not guarded")
    return f
