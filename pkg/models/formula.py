# models/formula.py
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Tuple


class Kind(str, Enum):
    ATOM = "atom"
    NEG_ATOM = "neg_atom"
    AND = "and"
    OR = "or"
    DIAMOND = "diamond"
    BOX = "box"
    VAR = "var"
    MU = "mu"
    NU = "nu"
    TOP = "top"
    BOT = "bot"


FIXPOINTS = (Kind.MU, Kind.NU)
MODALITIES = (Kind.DIAMOND, Kind.BOX)
LITERALS = (Kind.ATOM, Kind.NEG_ATOM)


@dataclass(frozen=True)
class Formula:
    """Node of a mu-calculus syntax tree.

    Equality and hashing are structural, so two unfoldings of the same
    fixpoint are the same closure member. The source span is ignored by both.
    """
    kind: Kind
    name: Optional[str] = None
    children: Tuple["Formula", ...] = ()
    span: Optional[Tuple[int, int]] = field(default=None, compare=False, repr=False)
    _hash: int = field(init=False, compare=False, repr=False, default=0)

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash((self.kind, self.name, self.children)))

    def __hash__(self):
        return self._hash

    @property
    def is_fixpoint(self) -> bool:
        return self.kind in FIXPOINTS

    @property
    def is_literal(self) -> bool:
        return self.kind in LITERALS

    @property
    def body(self) -> "Formula":
        return self.children[0]

    @property
    def left(self) -> "Formula":
        return self.children[0]

    @property
    def right(self) -> "Formula":
        return self.children[1]

    def __str__(self) -> str:
        from services.formula_service import pretty
        return pretty(self)


TOP = Formula(Kind.TOP)
BOT = Formula(Kind.BOT)


def atom(name: str) -> Formula:
    return Formula(Kind.ATOM, name)


def neg(name: str) -> Formula:
    return Formula(Kind.NEG_ATOM, name)


def var(name: str) -> Formula:
    return Formula(Kind.VAR, name)


def conj(left: Formula, right: Formula) -> Formula:
    return Formula(Kind.AND, None, (left, right))


def disj(left: Formula, right: Formula) -> Formula:
    return Formula(Kind.OR, None, (left, right))


def diamond(body: Formula) -> Formula:
    return Formula(Kind.DIAMOND, None, (body,))


def box(body: Formula) -> Formula:
    return Formula(Kind.BOX, None, (body,))


def mu(name: str, body: Formula) -> Formula:
    return Formula(Kind.MU, name, (body,))


def nu(name: str, body: Formula) -> Formula:
    return Formula(Kind.NU, name, (body,))


@dataclass(frozen=True, eq=False)
class ClosureTable:
    """Fischer-Ladner closure of a clean closed formula.

    theta maps each bound variable to its binding fixpoint subformula of the
    root; levels maps each bound variable to the alternation level of that
    binder and is filled by services.formula_service.alternation.
    """
    root: Formula
    formulas: Tuple[Formula, ...]
    theta: Dict[str, Formula]
    levels: Dict[str, int] = field(default_factory=dict)
    depth: int = 0

    def __contains__(self, f: Formula) -> bool:
        return f in self.formulas

    def __len__(self) -> int:
        return len(self.formulas)

    def level(self, f: Formula) -> int:
        """Alternation level of a fixpoint closure member, looked up via its variable"""
        return self.levels[f.name]
