# config.py
import os
from dotenv import load_dotenv

load_dotenv()


def _flag(name: str, default: str) -> bool:
    return os.getenv(name, default).strip().lower() in ("1", "true", "yes", "on")


MAX_ATOMS = int(os.getenv("MU_SAT_MAX_ATOMS", "16"))
LOG_LEVEL = os.getenv("MU_SAT_LOG_LEVEL", "INFO").upper()
SAT_MODE = _flag("MU_SAT_SAT_MODE", "true")
VERIFY_WITNESS = _flag("MU_SAT_VERIFY_WITNESS", "true")
MAX_GAME_NODES = int(os.getenv("MU_SAT_MAX_GAME_NODES", "2000000"))
ASSERT_BOUNDS = _flag("MU_SAT_ASSERT_BOUNDS", "true")

LOG_FORMAT = "%(asctime)s - %(levelname)s - %(message)s"
