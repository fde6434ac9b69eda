import enum
from functools import lru_cache
from pathlib import Path

from pydantic import BaseSettings, Field

__all__ = ("Settings", "TestingSettings", "get_settings")


class Settings(BaseSettings):
    class LogLevel(str, enum.Enum):
        DEBUG = "debug"
        INFO = "info"
        WARNING = "warning"
        ERROR = "error"

    # execution
    threads: int = Field(default=1, ge=1, le=256)
    log_level: LogLevel = LogLevel.INFO

    # output
    output_dir: Path = Path("out")

    # numerics
    mc_chunk_size: int = Field(default=2**16, ge=2**10)
    lambda_cap: float = Field(default=64.0, gt=0)
    max_half_width: float = Field(default=2000.0, gt=0)

    class Config:
        env_prefix = "coxperc_"
        env_file = ".env"


class TestingSettings(Settings):
    threads: int = Field(default=1, ge=1, le=256)
    log_level: Settings.LogLevel = Settings.LogLevel.DEBUG
    mc_chunk_size: int = Field(default=2**12, ge=2**10)


@lru_cache()
def get_settings() -> Settings:
    return Settings()
