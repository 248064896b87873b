# coalmu/core/config.py
from pydantic import BaseModel
from functools import lru_cache
import os


class Settings(BaseModel):

    # Project Settings
    PROJECT_NAME: str = "coalmu"
    VERSION: str = "1.0.0"
    LOG_LEVEL: str = os.getenv("COALMU_LOG_LEVEL", "WARNING")

    # Search Ceilings
    MAX_POSITIONS: int = int(os.getenv("COALMU_MAX_POSITIONS", "2000000"))
    AUTOMATON_STATE_CEILING: int = int(os.getenv("COALMU_AUTOMATON_STATE_CEILING", "200000"))
    SIGMA_STEP_GUARD: int = int(os.getenv("COALMU_SIGMA_STEP_GUARD", "100000"))

    # Model Checking Settings
    MAX_MODEL_STATES: int = int(os.getenv("COALMU_MAX_MODEL_STATES", "5"))

    # One-step Oracle Settings
    ONESTEP_STATE_CAP: int = int(os.getenv("COALMU_ONESTEP_STATE_CAP", "4"))
    ONESTEP_STRATEGY_CAP: int = int(os.getenv("COALMU_ONESTEP_STRATEGY_CAP", "2"))
    DEFAULT_SAMPLES: int = int(os.getenv("COALMU_DEFAULT_SAMPLES", "200"))
    RANDOM_SEED: int = int(os.getenv("COALMU_RANDOM_SEED", "0"))


@lru_cache()
def get_settings() -> Settings:
    return Settings()
