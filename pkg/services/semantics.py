# services/semantics.py
import itertools
import json
import logging
import random
from typing import Dict, FrozenSet, Iterable, Iterator, Mapping, Optional, Sequence

from pydantic import ValidationError

from exceptions import KripkeValidationError, UnboundVariableError
from models.formula import Formula, Kind
from models.kripke import KripkeIndex, KripkeStructure, World, index_structure

logger = logging.getLogger(__name__)


def _diamond(k: KripkeIndex, mask: int) -> int:
    return sum(1 << w for w in range(k.size) if k.successors[w] & mask)


def _box(k: KripkeIndex, mask: int) -> int:
    return sum(1 << w for w in range(k.size) if (k.successors[w] & ~mask) == 0)


def _atom(k: KripkeIndex, name: str) -> int:
    return sum(1 << w for w in range(k.size) if name in k.labels[w])


def evaluate(f: Formula, k: KripkeIndex, env: Mapping[str, int]) -> int:
    """Denotation of f as a bitmask of worlds; fixpoints by Knaster-Tarski iteration"""
    kind = f.kind
    if kind == Kind.ATOM:
        return _atom(k, f.name)
    if kind == Kind.NEG_ATOM:
        return k.everything & ~_atom(k, f.name)
    if kind == Kind.TOP:
        return k.everything
    if kind == Kind.BOT:
        return 0
    if kind == Kind.VAR:
        if f.name not in env:
            raise UnboundVariableError(f"variable {f.name} has no value")
        return env[f.name]
    if kind == Kind.AND:
        return evaluate(f.left, k, env) & evaluate(f.right, k, env)
    if kind == Kind.OR:
        return evaluate(f.left, k, env) | evaluate(f.right, k, env)
    if kind == Kind.DIAMOND:
        return _diamond(k, evaluate(f.body, k, env))
    if kind == Kind.BOX:
        return _box(k, evaluate(f.body, k, env))

    current = 0 if kind == Kind.MU else k.everything
    while True:
        following = evaluate(f.body, k, {**env, f.name: current})
        if following == current:
            return current
        current = following


def eval_semantics(f: Formula, k: KripkeStructure, valuation: Optional[Mapping[str, Iterable[str]]] = None) -> FrozenSet[str]:
    index = index_structure(k)
    position = {name: i for i, name in enumerate(index.ids)}
    env: Dict[str, int] = {}
    for name, worlds in (valuation or {}).items():
        env[name] = sum(1 << position[w] for w in worlds)
    mask = evaluate(f, index, env)
    return frozenset(index.ids[w] for w in index.members(mask))


def satisfies(f: Formula, k: KripkeStructure) -> bool:
    index = index_structure(k)
    return bool(evaluate(f, index, {}) >> index.initial & 1)


def _serial_relations(n: int) -> Iterator[tuple]:
    nonempty = range(1, 1 << n)
    return itertools.product(nonempty, repeat=n)


def satisfiable_small(f: Formula, atoms: Sequence[str], max_worlds: int = 3) -> Optional[KripkeStructure]:
    """Exhaustive search over serial structures with up to max_worlds worlds.

    Returns a model when one exists; None proves there is none of that size.
    """
    atoms = sorted(atoms)
    for n in range(1, max_worlds + 1):
        labelings = list(itertools.product(range(1 << len(atoms)), repeat=n))
        for successors in _serial_relations(n):
            for labeling in labelings:
                labels = tuple(frozenset(a for i, a in enumerate(atoms) if bits >> i & 1) for bits in labeling)
                index = KripkeIndex(
                    ids=tuple(f"w{i}" for i in range(n)),
                    initial=0,
                    successors=successors,
                    labels=labels,
                )
                mask = evaluate(f, index, {})
                if mask:
                    initial = (mask & -mask).bit_length() - 1
                    return _from_index(index, initial)
    return None


def _from_index(index: KripkeIndex, initial: int) -> KripkeStructure:
    return KripkeStructure(
        worlds=[World(id=index.ids[w], atoms=sorted(index.labels[w])) for w in range(index.size)],
        initial=index.ids[initial],
        edges=[(index.ids[w], index.ids[v]) for w in range(index.size) for v in index.successor_list(w)],
    )


def random_structure(rng: random.Random, worlds: int, atoms: Sequence[str], density: float = 0.4) -> KripkeStructure:
    index_successors = []
    for _ in range(worlds):
        mask = sum(1 << v for v in range(worlds) if rng.random() < density)
        if not mask:
            mask = 1 << rng.randrange(worlds)
        index_successors.append(mask)
    index = KripkeIndex(
        ids=tuple(f"w{i}" for i in range(worlds)),
        initial=0,
        successors=tuple(index_successors),
        labels=tuple(frozenset(a for a in atoms if rng.random() < 0.5) for _ in range(worlds)),
    )
    return _from_index(index, 0)


def load_kripke(text: str) -> KripkeStructure:
    """Read the JSON structure format, validating seriality and ids"""
    try:
        return KripkeStructure.model_validate(json.loads(text))
    except json.JSONDecodeError as e:
        raise KripkeValidationError(f"invalid JSON: {e}") from e
    except ValidationError as e:
        raise KripkeValidationError(str(e)) from e
