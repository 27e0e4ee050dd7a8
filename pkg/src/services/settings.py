"""Centralized runtime settings.

Everything tunable at deployment time lives here and is read from the
environment (prefix ``FOURIERVOL_``) or a ``.env`` file. This is the single
place that decides thread caps, default grids and numerical tolerances.
"""

import os
from functools import lru_cache
from typing import Literal, Optional

from pydantic_settings import BaseSettings, SettingsConfigDict

from .errors import ConfigError


class FourierVolSettings(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="FOURIERVOL_", env_file=".env", env_file_encoding="utf-8", extra="ignore"
    )

    threads: Optional[int] = None              # FOURIERVOL_THREADS caps study parallelism
    spot_grid_size: int = 256
    fejer_prefactor: Literal["printed", "dirichlet"] = "printed"
    identity_rtol: float = 1e-10
    imag_tol: float = 1e-9
    positivity_tol: float = 1e-10
    log_level: str = "INFO"


@lru_cache
def get_settings() -> FourierVolSettings:
    return FourierVolSettings()


def resolve_threads(threads: Optional[int] = None, settings: Optional[FourierVolSettings] = None) -> int:
    """Resolve how many workers a study may use.

    Precedence: an explicit argument wins, then ``FOURIERVOL_THREADS``, then
    ``min(4, cpu_count)``.
    """
    if threads is None:
        threads = (settings or get_settings()).threads
    if threads is None:
        return max(1, min(4, os.cpu_count() or 1))
    if threads < 1:
        raise ConfigError(f"thread cap must be >= 1, got {threads}")
    return int(threads)
