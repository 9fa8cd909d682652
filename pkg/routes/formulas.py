# routes/formulas.py
import logging

from fastapi import APIRouter
from fastapi.concurrency import run_in_threadpool

from exceptions import MuSatError
from models.report import FragmentReport, PipelineReport
from models.requests import FormulaRequest, ParseResponse, SatRequest
from services.formula_service import analyze, check_guarded, make_clean, parse_clean, pretty, size
from services.parser import parse
from services.pipeline import decide_sat
from utils import http_error

logger = logging.getLogger(__name__)

router = APIRouter()


@router.post("/parse", response_model=ParseResponse)
async def parse_formula(request: FormulaRequest):
    try:
        f = parse(request.formula)
        cleaned, renamed = make_clean(f)
    except MuSatError as e:
        raise http_error(e)
    return ParseResponse(formula=pretty(cleaned), size=size(cleaned), guarded=check_guarded(cleaned), clean=not renamed)


@router.post("/classify", response_model=FragmentReport)
async def classify_formula(request: FormulaRequest):
    try:
        _, fragment = analyze(parse_clean(request.formula))
    except MuSatError as e:
        raise http_error(e)
    logger.info(f"Classified formula as {fragment.best_fragment.value}")
    return fragment


@router.post("/sat", response_model=PipelineReport)
async def decide(request: SatRequest):
    try:
        return await run_in_threadpool(
            decide_sat,
            request.formula,
            construction=request.construction,
            sat_mode=request.sat_mode,
            verify=request.verify,
            witness=request.witness,
        )
    except MuSatError as e:
        raise http_error(e)
