# routes/kripke.py
from fastapi import APIRouter
from fastapi.concurrency import run_in_threadpool

from exceptions import MuSatError
from models.requests import CheckRequest, CheckResponse
from services.formula_service import parse_clean
from services.pipeline import model_check_game
from services.semantics import eval_semantics
from utils import http_error

router = APIRouter()


@router.post("/check", response_model=CheckResponse)
async def check_model(request: CheckRequest):
    try:
        holds, game = await run_in_threadpool(model_check_game, request.formula, request.kripke)
    except MuSatError as e:
        raise http_error(e)
    return CheckResponse(holds=holds, game_nodes=len(game))


@router.post("/eval")
async def evaluate_formula(request: CheckRequest):
    """Worlds of the structure satisfying the formula, by fixpoint iteration"""
    try:
        worlds = eval_semantics(parse_clean(request.formula), request.kripke)
    except MuSatError as e:
        raise http_error(e)
    return {"worlds": sorted(worlds)}
