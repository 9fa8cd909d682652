# services/parser.py
import logging

import lark as L
from lark import v_args

from exceptions import FormulaSyntaxError, NegationError, UnboundVariableError
from models.formula import BOT, TOP, Formula, Kind

logger = logging.getLogger(__name__)

# Binders sit at the unary level and take a whole formula as body; the LALR
# table resolves the resulting shift/reduce conflicts as shifts, which is
# exactly "binder scope extends maximally to the right".
GRAMMAR = r"""
    ?start: formula

    ?formula: conj
            | conj "|" formula        -> or_

    ?conj: unary
         | unary "&" conj             -> and_

    ?unary: "~" unary                 -> neg
          | "<>" unary                -> diamond
          | "[]" unary                -> box
          | "mu" VAR "." formula      -> mu
          | "nu" VAR "." formula      -> nu
          | primary

    ?primary: "true"                  -> top
            | "false"                 -> bot
            | ATOM                    -> atom
            | VAR                     -> var
            | "(" formula ")"

    ATOM: /[a-z][a-zA-Z0-9_]*/
    VAR: /[A-Z][a-zA-Z0-9_]*/

    COMMENT: /#[^\n]*/
    %import common.WS
    %ignore WS
    %ignore COMMENT
"""

_parser = L.Lark(GRAMMAR, parser="lalr", propagate_positions=True, maybe_placeholders=False)


def _span(meta):
    if getattr(meta, "empty", True):
        return None
    return (meta.line, meta.column)


@v_args(meta=True)
class _ToFormula(L.Transformer):
    def or_(self, meta, children):
        return Formula(Kind.OR, None, (children[0], children[1]), _span(meta))

    def and_(self, meta, children):
        return Formula(Kind.AND, None, (children[0], children[1]), _span(meta))

    def neg(self, meta, children):
        child = children[0]
        if child.kind != Kind.ATOM:
            line, column = _span(meta) or (None, None)
            raise NegationError(f"negation applied to non-atom at line {line}, column {column}")
        return Formula(Kind.NEG_ATOM, child.name, (), _span(meta))

    def diamond(self, meta, children):
        return Formula(Kind.DIAMOND, None, (children[0],), _span(meta))

    def box(self, meta, children):
        return Formula(Kind.BOX, None, (children[0],), _span(meta))

    def mu(self, meta, children):
        return Formula(Kind.MU, str(children[0]), (children[1],), _span(meta))

    def nu(self, meta, children):
        return Formula(Kind.NU, str(children[0]), (children[1],), _span(meta))

    def top(self, meta, children):
        return TOP

    def bot(self, meta, children):
        return BOT

    def atom(self, meta, children):
        return Formula(Kind.ATOM, str(children[0]), (), _span(meta))

    def var(self, meta, children):
        return Formula(Kind.VAR, str(children[0]), (), _span(meta))


def parse(text: str) -> Formula:
    """Parse concrete syntax into a closed formula"""
    from services.formula_service import free_variables

    try:
        tree = _parser.parse(text)
    except L.exceptions.UnexpectedInput as e:
        raise FormulaSyntaxError("syntax error", getattr(e, "line", None), getattr(e, "column", None)) from e
    try:
        formula = _ToFormula().transform(tree)
    except L.exceptions.VisitError as e:
        raise e.orig_exc from None

    free = free_variables(formula)
    if free:
        raise UnboundVariableError(f"unbound variable(s): {', '.join(sorted(free))}")
    logger.debug(f"Parsed formula {formula}")
    return formula
