# models/kripke.py
from dataclasses import dataclass
from typing import Dict, List, Tuple

from pydantic import BaseModel, Field, model_validator

from exceptions import KripkeValidationError


class World(BaseModel):
    id: str
    atoms: List[str] = Field(default_factory=list)


class KripkeStructure(BaseModel):
    """Pointed Kripke structure, also the JSON witness format"""
    worlds: List[World]
    initial: str
    edges: List[Tuple[str, str]]

    @model_validator(mode="after")
    def check_structure(self):
        ids = [w.id for w in self.worlds]
        if not ids:
            raise KripkeValidationError("structure has no worlds")
        duplicates = sorted({i for i in ids if ids.count(i) > 1})
        if duplicates:
            raise KripkeValidationError(f"duplicate world ids: {duplicates}")
        known = set(ids)
        if self.initial not in known:
            raise KripkeValidationError(f"initial world {self.initial!r} is not a world")
        for source, target in self.edges:
            if source not in known or target not in known:
                raise KripkeValidationError(f"edge ({source}, {target}) mentions an unknown world")
        sources = {source for source, _ in self.edges}
        dead = [i for i in ids if i not in sources]
        if dead:
            raise KripkeValidationError(f"structure is not serial; worlds without successors: {dead}")
        return self


@dataclass(frozen=True)
class KripkeIndex:
    """Integer view of a structure: world sets are bitmasks"""
    ids: Tuple[str, ...]
    initial: int
    successors: Tuple[int, ...]
    labels: Tuple[frozenset, ...]

    @property
    def size(self) -> int:
        return len(self.ids)

    @property
    def everything(self) -> int:
        return (1 << len(self.ids)) - 1

    def members(self, mask: int) -> List[int]:
        return [w for w in range(len(self.ids)) if mask >> w & 1]

    def successor_list(self, w: int) -> List[int]:
        return self.members(self.successors[w])


def index_structure(k: KripkeStructure) -> KripkeIndex:
    position: Dict[str, int] = {w.id: i for i, w in enumerate(k.worlds)}
    successors = [0] * len(k.worlds)
    for source, target in k.edges:
        successors[position[source]] |= 1 << position[target]
    return KripkeIndex(
        ids=tuple(w.id for w in k.worlds),
        initial=position[k.initial],
        successors=tuple(successors),
        labels=tuple(frozenset(w.atoms) for w in k.worlds),
    )
