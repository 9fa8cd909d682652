# utils.py
import logging
import time
from contextlib import contextmanager
from typing import Dict, Iterable

from fastapi import HTTPException

import config
from exceptions import BoundViolationError

logger = logging.getLogger(__name__)


def fresh_name(base: str, taken: Iterable[str]) -> str:
    """Return base followed by the smallest index that is not taken"""
    taken = set(taken)
    index = 0
    while f"{base}{index}" in taken:
        index += 1
    return f"{base}{index}"


@contextmanager
def stage_timer(timings: Dict[str, float], stage: str):
    """Record the wall-clock duration of a pipeline stage in seconds"""
    start = time.perf_counter()
    try:
        yield
    finally:
        timings[stage] = time.perf_counter() - start
        logger.info(f"Stage {stage} finished in {timings[stage]:.4f}s")


def check_bound(what: str, size: int, bound: float) -> None:
    if config.ASSERT_BOUNDS and size > bound:
        raise BoundViolationError(f"{what} has {size} elements, exceeding its bound {bound:.0f}")


def configure_logging() -> None:
    logging.basicConfig(level=getattr(logging, config.LOG_LEVEL, logging.INFO), format=config.LOG_FORMAT)


_HTTP_STATUS = {
    "FormulaSyntaxError": 422,
    "UnboundVariableError": 422,
    "NegationError": 422,
    "UnguardedFormulaError": 422,
    "KripkeValidationError": 422,
    "AlphabetCapError": 413,
    "BoundViolationError": 413,
    "UnsupportedFragmentError": 400,
}


def http_error(e: Exception) -> HTTPException:
    status = _HTTP_STATUS.get(type(e).__name__, 500)
    if status == 500:
        logger.error(f"Request failed: {e}", exc_info=True)
    return HTTPException(status_code=status, detail=str(e))
