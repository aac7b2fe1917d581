#Settings for the planeform toolkit.
#Values come from the environment (and an optional .env file).

import os
from functools import lru_cache

from dotenv import load_dotenv
from pydantic import BaseModel, Field

# Load environment variables
load_dotenv()


class Settings(BaseModel):
    float_tol: float = Field(1e-12, gt=0, description="Absolute entrywise tolerance for float comparisons")
    match_tol: float = Field(1e-9, gt=0, description="Tolerance for matching float group elements and vectors")
    closure_limit: int = Field(4096, ge=1, description="Default cap on enumerated group members")
    patch_trials: int = Field(64, ge=1, description="Random pairs checked by patch_form")
    default_tol: float = Field(1e-10, ge=0, description="Default convergence / residual tolerance")
    max_iter: int = Field(500, ge=1, description="Iteration cap for synth_contraction")
    log_level: str = Field("WARNING", description="Root log level for the CLI")


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    env = {
        "float_tol": os.getenv("PLANEFORM_FLOAT_TOL"),
        "match_tol": os.getenv("PLANEFORM_MATCH_TOL"),
        "closure_limit": os.getenv("PLANEFORM_CLOSURE_LIMIT"),
        "patch_trials": os.getenv("PLANEFORM_PATCH_TRIALS"),
        "default_tol": os.getenv("PLANEFORM_TOL"),
        "max_iter": os.getenv("PLANEFORM_MAX_ITER"),
        "log_level": os.getenv("PLANEFORM_LOG_LEVEL"),
    }
    return Settings(**{key: value for key, value in env.items() if value is not None})
