# services/export.py
import json
import logging
import re
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from exceptions import MuSatError
from models.automata import APT, Acceptance, FocusState, FreshInitial, UPWord, WordAutomaton
from models.games import ParityGame, Player, StrategyArena

logger = logging.getLogger(__name__)

_OWNER_SHAPE = {Player.DIAMOND: "diamond", Player.BOX: "box"}


def describe(value: Any) -> str:
    """Readable, stable rendering of construction states and labels"""
    if isinstance(value, frozenset):
        return "{" + ",".join(sorted(describe(v) for v in value)) + "}"
    if isinstance(value, FocusState):
        focus = "" if value.focus is None else f"|{describe(value.focus)}"
        return f"{describe(value.macro)}{focus}"
    if isinstance(value, FreshInitial):
        return f"{describe(value.state)}'"
    if isinstance(value, tuple):
        return "(" + ",".join(describe(v) for v in value) + ")"
    if value is None:
        return "-"
    return str(value)


def _quote(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def _dot(name: str, nodes: Iterable[Tuple[int, str, str]], edges: Iterable[Tuple[int, int, str]]) -> str:
    out = [f"digraph {name} {{", '  node [fontsize="12"];']
    for node, label, shape in nodes:
        out.append(f'  n{node} [label="{_quote(label)}", shape="{shape}"];')
    for source, target, label in edges:
        attribute = f' [label="{_quote(label)}"]' if label else ""
        out.append(f"  n{source} -> n{target}{attribute};")
    out.append("}")
    return "\n".join(out) + "\n"


def letter_atoms(atoms: Sequence[str], letter: int) -> List[str]:
    return [name for i, name in enumerate(atoms) if letter >> i & 1]


def apt_to_json(a: APT) -> Dict[str, Any]:
    return {
        "atoms": list(a.atoms),
        "initial": a.initial,
        "states": [
            {
                "id": q,
                "formula": describe(a.labels[q]),
                "kind": a.kinds[q].value,
                "priority": a.priorities[q],
                "successors": list(a.all_successors(q)),
                "literal": list(a.literals[q]) if a.literals[q] is not None else None,
            }
            for q in a.states
        ],
        "top": a.top,
        "bottom": a.bottom,
    }


def apt_to_dot(a: APT) -> str:
    shapes = {"or": "ellipse", "and": "box", "diamond": "diamond", "box": "square"}
    nodes = [(q, f"{describe(a.labels[q])}\\n{a.kinds[q].value} / {a.priorities[q]}", shapes[a.kinds[q].value])
             for q in a.states]
    edges = []
    for q in a.states:
        literal = a.literals[q]
        if literal is None:
            edges.extend((q, r, "") for r in dict.fromkeys(a.successors[q]))
        else:
            atom, positive = literal
            holds = a.atoms[atom] if positive else f"~{a.atoms[atom]}"
            edges.append((q, a.top, holds))
            edges.append((q, a.bottom, f"not {holds}"))
    return _dot("apt", nodes, edges)


def word_automaton_to_json(a: WordAutomaton) -> Dict[str, Any]:
    names = {q: describe(q) for q in a.states}
    return {
        "acceptance": a.acceptance.value,
        "alphabet": [describe(letter) for letter in a.alphabet],
        "states": [names[q] for q in a.states],
        "initial": names[a.initial],
        "priorities": {names[q]: a.priorities[q] for q in a.states},
        "transitions": [[names[q], describe(letter), names[r]] for q, letter, r in a.edges()],
    }


def word_automaton_from_json(data: Dict[str, Any]) -> WordAutomaton:
    """Inverse of word_automaton_to_json on automata with plain string states and letters"""
    try:
        edges = [tuple(edge) for edge in data["transitions"]]
        return WordAutomaton.from_edges(
            edges,
            initial=data["initial"],
            priorities=data["priorities"],
            acceptance=Acceptance(data.get("acceptance", "parity")),
            alphabet=data.get("alphabet", ()),
            states=data.get("states", ()),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise MuSatError(f"malformed automaton JSON: {e}") from e


def word_automaton_to_dot(a: WordAutomaton) -> str:
    index = {q: i for i, q in enumerate(a.states)}
    accepting = a.accepting
    nodes = [(index[q], f"{describe(q)} / {a.priorities[q]}", "doublecircle" if q in accepting else "circle")
             for q in a.states]
    grouped: Dict[Tuple[int, int], List[str]] = {}
    for q, letter, r in a.edges():
        grouped.setdefault((index[q], index[r]), []).append(describe(letter))
    edges = [(source, target, ",".join(sorted(letters))) for (source, target), letters in grouped.items()]
    return _dot("automaton", nodes, edges)


def arena_to_json(arena: StrategyArena) -> Dict[str, Any]:
    return {
        "initial": arena.initial,
        "sat_mode": arena.sat_mode,
        "nodes": [
            {
                "id": v,
                "states": sorted(node.states),
                "letter": node.letter,
                "losing": node.losing,
                "owner": arena.owners[v].value,
                "edges": [{"label": describe(label), "target": target} for label, target in arena.edges[v]],
            }
            for v, node in enumerate(arena.nodes)
        ],
    }


def arena_to_dot(arena: StrategyArena) -> str:
    nodes = []
    for v, node in enumerate(arena.nodes):
        text = "lose" if node.losing else describe(node.states) + ("" if node.letter is None else f", {node.letter}")
        nodes.append((v, text, _OWNER_SHAPE[arena.owners[v]]))
    edges = [(v, target, describe(label)) for v, out in enumerate(arena.edges) for label, target in out]
    return _dot("arena", nodes, edges)


def game_to_json(game: ParityGame) -> Dict[str, Any]:
    return {
        "initial": game.initial,
        "nodes": [
            {
                "id": v,
                "owner": game.owners[v].value,
                "priority": game.priorities[v],
                "successors": list(game.successors[v]),
                "name": describe(game.labels[v]),
            }
            for v in game.nodes
        ],
    }


def game_to_dot(game: ParityGame) -> str:
    nodes = [(v, f"{describe(game.labels[v])} / {game.priorities[v]}", _OWNER_SHAPE[game.owners[v]])
             for v in game.nodes]
    edges = [(v, w, "") for v in game.nodes for w in game.successors[v]]
    return _dot("game", nodes, edges)


def write_pgsolver(game: ParityGame) -> str:
    """PGSolver text; owner 0 is diamond (even), 1 is box (odd)"""
    lines = [f"parity {max(len(game) - 1, 0)};", f"start {game.initial};"]
    for v in game.nodes:
        owner = 0 if game.owners[v] == Player.DIAMOND else 1
        successors = ",".join(str(w) for w in game.successors[v])
        name = _quote(describe(game.labels[v]))
        lines.append(f'{v} {game.priorities[v]} {owner} {successors} "{name}";')
    return "\n".join(lines) + "\n"


_PG_HEADER = re.compile(r"^\s*parity\s+(\d+)\s*;\s*$")
_PG_START = re.compile(r"^\s*start\s+(\d+)\s*;\s*$")
_PG_NODE = re.compile(r'^\s*(\d+)\s+(\d+)\s+([01])\s*([\d,\s]*?)\s*(?:"((?:[^"\\]|\\.)*)")?\s*;\s*$')


def read_pgsolver(text: str) -> ParityGame:
    """Parse PGSolver text; nodes may be numbered sparsely and are renumbered densely"""
    initial: Optional[int] = None
    rows: Dict[int, Tuple[int, Player, List[int], str]] = {}
    for number, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        if _PG_HEADER.match(line):
            continue
        start = _PG_START.match(line)
        if start:
            initial = int(start.group(1))
            continue
        node = _PG_NODE.match(line)
        if not node:
            raise MuSatError(f"line {number}: cannot parse {line.strip()!r}")
        ident, priority, owner, successors, name = node.groups()
        targets = [int(s) for s in re.split(r"[,\s]+", successors.strip()) if s]
        player = Player.DIAMOND if owner == "0" else Player.BOX
        rows[int(ident)] = (int(priority), player, targets, name if name is not None else ident)

    if not rows:
        raise MuSatError("game has no nodes")
    order = sorted(rows)
    position = {ident: i for i, ident in enumerate(order)}
    for ident in order:
        for target in rows[ident][2]:
            if target not in position:
                raise MuSatError(f"node {ident} has an edge to unknown node {target}")
    game = ParityGame(
        owners=tuple(rows[i][1] for i in order),
        successors=tuple(tuple(dict.fromkeys(position[t] for t in rows[i][2])) for i in order),
        priorities=tuple(rows[i][0] for i in order),
        initial=position[initial] if initial is not None and initial in position else 0,
        labels=tuple(rows[i][3] for i in order),
    )
    logger.debug(f"Read PGSolver game with {len(game)} nodes")
    return game


def upword_vectors_to_json(vectors: Iterable[Tuple[UPWord, bool]]) -> str:
    return json.dumps([[list(w.prefix), list(w.period), expected] for w, expected in vectors])


def upword_vectors_from_json(text: str) -> List[Tuple[UPWord, bool]]:
    try:
        return [(UPWord(tuple(u), tuple(v)), bool(expected)) for u, v, expected in json.loads(text)]
    except (TypeError, ValueError) as e:
        raise MuSatError(f"malformed word vectors: {e}") from e


def render(value: Any, fmt: str = "json") -> str:
    """Serialize an APT, word automaton, arena or game as json, dot or (games only) pgsolver"""
    if fmt == "pgsolver":
        if not isinstance(value, ParityGame):
            raise MuSatError("pgsolver output is only available for games")
        return write_pgsolver(value)
    writers = {
        APT: (apt_to_json, apt_to_dot),
        WordAutomaton: (word_automaton_to_json, word_automaton_to_dot),
        StrategyArena: (arena_to_json, arena_to_dot),
        ParityGame: (game_to_json, game_to_dot),
    }
    if type(value) not in writers:
        raise MuSatError(f"cannot render {type(value).__name__}")
    to_json, to_dot = writers[type(value)]
    if fmt == "dot":
        return to_dot(value)
    if fmt == "json":
        return json.dumps(to_json(value), indent=2)
    raise MuSatError(f"unknown format {fmt!r}")
