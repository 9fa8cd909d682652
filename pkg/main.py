# main.py
import logging
import time
from contextlib import asynccontextmanager
from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware

import config
from routes.automata import router as automata_router
from routes.formulas import router as formulas_router
from routes.kripke import router as kripke_router
from utils import configure_logging

configure_logging()
logger = logging.getLogger(__name__)


@asynccontextmanager
async def lifespan(app: FastAPI):
    logger.info(f"mu-sat started (sat mode {config.SAT_MODE}, at most {config.MAX_ATOMS} atoms)")
    yield
    logger.info("Shutting down application...")


app = FastAPI(title="mu-sat", version="1.0", lifespan=lifespan)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["http://localhost:3000"],
    allow_methods=["*"],
    allow_headers=["*"],
)

app.include_router(formulas_router, prefix="/formulas", tags=["Formulas"])
app.include_router(kripke_router, prefix="/models", tags=["Kripke structures"])
app.include_router(automata_router, prefix="/automata", tags=["Automata"])


@app.get("/")
async def health_check():
    return {"status": "running"}


@app.middleware("http")
async def log_requests(request: Request, call_next):
    start = time.perf_counter()
    try:
        response = await call_next(request)
    except Exception as e:
        logger.error(f"{request.method} {request.url.path} failed: {e}", exc_info=True)
        raise
    logger.info(f"{request.method} {request.url.path} -> {response.status_code} "
                f"in {time.perf_counter() - start:.3f}s")
    return response
