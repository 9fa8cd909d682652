# models/requests.py
from typing import Literal, Optional

from pydantic import BaseModel, Field

from models.kripke import KripkeStructure
from models.report import Construction


class FormulaRequest(BaseModel):
    formula: str = Field(min_length=1)


class SatRequest(FormulaRequest):
    construction: Optional[Construction] = None  # None dispatches on the fragment
    sat_mode: Optional[bool] = None
    verify: Optional[bool] = None
    witness: bool = True


class CheckRequest(FormulaRequest):
    kripke: KripkeStructure


class DumpRequest(FormulaRequest):
    construction: Optional[Construction] = None
    sat_mode: Optional[bool] = None
    format: Literal["json", "dot", "pgsolver"] = "json"


class ParseResponse(BaseModel):
    formula: str
    size: int
    guarded: bool
    clean: bool


class CheckResponse(BaseModel):
    holds: bool
    game_nodes: int
