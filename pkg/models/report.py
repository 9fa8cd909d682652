# models/report.py
import math
from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, Field, field_serializer, model_validator

from models.kripke import KripkeStructure


class Fragment(str, Enum):
    LIMIT_LINEAR = "limit-linear"
    AF_ACONJUNCTIVE = "alternation-free aconjunctive"
    ALTERNATION_FREE = "alternation-free"
    ACONJUNCTIVE = "aconjunctive"
    UNRESTRICTED = "unrestricted"


class Construction(str, Enum):
    CIRCLE = "circle"
    MIYANO_HAYASHI = "mh"
    FOCUS = "focus"
    PERMUTATION = "perm"
    UNSUPPORTED = "unsupported"


class Verdict(str, Enum):
    SAT = "sat"
    UNSAT = "unsat"


class FragmentReport(BaseModel):
    limit_linear: bool
    alternation_free: bool
    aconjunctive: bool
    af_aconjunctive: bool
    best_fragment: Fragment
    ad: int = Field(ge=0)

    @model_validator(mode="after")
    def check_implications(self):
        if self.limit_linear and not (self.alternation_free and self.aconjunctive):
            raise ValueError("limit-linear formulas are alternation-free and aconjunctive")
        if self.af_aconjunctive != (self.alternation_free and self.aconjunctive):
            raise ValueError("af_aconjunctive must equal alternation_free and aconjunctive")
        return self


class APTClass(BaseModel):
    weak: bool
    limit_linear: bool
    limit_deterministic: bool


class WordClass(BaseModel):
    weak: bool
    limit_linear: bool
    limit_deterministic: bool


class PipelineReport(BaseModel):
    formula: str
    fragment: FragmentReport
    construction: Construction
    verdict: Verdict
    sizes: Dict[str, int] = Field(default_factory=dict)
    bounds: Dict[str, float] = Field(default_factory=dict)
    timings: Dict[str, float] = Field(default_factory=dict)
    fallbacks: List[str] = Field(default_factory=list)
    witness: Optional[KripkeStructure] = None
    witness_verified: Optional[bool] = None

    @field_serializer("bounds")
    def finite_bounds(self, bounds: Dict[str, float]) -> Dict[str, Optional[float]]:
        # unbounded estimates become null
        return {key: value if math.isfinite(value) else None for key, value in bounds.items()}
