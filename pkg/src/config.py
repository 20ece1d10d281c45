"""
Runtime configuration.

Values come from environment variables (optionally through a ``.env`` file in
the working directory) and can be overridden by command-line flags:

    NOVIKOV_AINF_ENERGY_CUTOFF=3
    NOVIKOV_AINF_LENGTH_CUTOFF=4
    NOVIKOV_AINF_THREADS=1
    NOVIKOV_AINF_SEED=0
    NOVIKOV_AINF_LOG_LEVEL=INFO
"""

from functools import lru_cache

from dotenv import load_dotenv
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

# Load environment variables from .env file
load_dotenv()


class Settings(BaseSettings):
    """Truncation defaults, worker count and the property-test seed."""

    model_config = SettingsConfigDict(env_prefix="NOVIKOV_AINF_", extra="ignore")

    energy_cutoff: str = Field(default="3", description="E_max as a p/q string")
    length_cutoff: int = Field(default=4, ge=1)
    threads: int = Field(default=1, ge=1)
    seed: int = 0
    log_level: str = "INFO"
    data_dir: str = "data"


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return Settings()
