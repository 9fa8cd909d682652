# routes/automata.py
import json

from fastapi import APIRouter, HTTPException
from fastapi.concurrency import run_in_threadpool
from fastapi.responses import PlainTextResponse

from exceptions import MuSatError
from models.requests import DumpRequest
from services.export import render
from services.pipeline import build_stage
from utils import http_error

router = APIRouter()


async def _dump(request: DumpRequest, stage: str):
    if request.format == "pgsolver" and stage != "game":
        raise HTTPException(status_code=400, detail="pgsolver output is only available for games")
    try:
        value = await run_in_threadpool(build_stage, request.formula, stage, request.construction, request.sat_mode)
        text = render(value, request.format)
    except MuSatError as e:
        raise http_error(e)
    if request.format == "json":
        return json.loads(text)
    return PlainTextResponse(text)


@router.post("/apt")
async def dump_apt(request: DumpRequest):
    return await _dump(request, "apt")


@router.post("/tracking")
async def dump_tracking(request: DumpRequest):
    return await _dump(request, "tracking")


@router.post("/arena")
async def dump_arena(request: DumpRequest):
    return await _dump(request, "arena")


@router.post("/game")
async def dump_game(request: DumpRequest):
    return await _dump(request, "game")
