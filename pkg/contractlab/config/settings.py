import os
from pydantic import BaseModel, Field


def _env_int(name: str, default: int) -> int:
    value = os.getenv(name)
    return int(value) if value not in (None, "") else default


def _env_float(name: str, default: float) -> float:
    value = os.getenv(name)
    return float(value) if value not in (None, "") else default


class Settings(BaseModel):
    """
    Toolkit settings loaded from environment variables.
    Environment variables take precedence over defaults.
    """

    # Application
    app_name: str = Field(default_factory=lambda: os.getenv("CONTRACTLAB_APP_NAME", "contractlab"))
    app_version: str = Field(default_factory=lambda: os.getenv("CONTRACTLAB_VERSION", "1.0.0"))

    # Exhaustive-work caps
    enumeration_cap_n: int = Field(
        default_factory=lambda: _env_int("CONTRACTLAB_ENUMERATION_CAP_N", 24),
        description="Largest ground set enumerated exhaustively (2^n subsets)",
    )
    class_check_cap_n: int = Field(
        default_factory=lambda: _env_int("CONTRACTLAB_CLASS_CHECK_CAP_N", 16),
        description="Largest ground set for monotonicity/submodularity checks",
    )
    breakpoint_cap_n: int = Field(
        default_factory=lambda: _env_int("CONTRACTLAB_BREAKPOINT_CAP_N", 12),
        description="Pairwise breakpoints are enumerated over at most 2^cap distinct lines",
    )
    kprover_universe_cap: int = Field(
        default_factory=lambda: _env_int("CONTRACTLAB_KPROVER_UNIVERSE_CAP", 10_000_000)
    )

    # Numerics
    tolerance: float = Field(default_factory=lambda: _env_float("CONTRACTLAB_TOLERANCE", 1e-9))

    # Parallelism
    threads: int = Field(
        default_factory=lambda: max(1, _env_int("CONTRACTLAB_THREADS", os.cpu_count() or 1)),
        description="Upper bound on worker threads for exhaustive scans",
    )
    parallel_min_chunk: int = Field(
        default_factory=lambda: _env_int("CONTRACTLAB_PARALLEL_MIN_CHUNK", 1 << 14),
        description="Scans shorter than this run inline",
    )

    # Reproducibility
    default_seed: int = Field(default_factory=lambda: _env_int("CONTRACTLAB_SEED", 0))

    # Logging Settings
    log_level: str = Field(default_factory=lambda: os.getenv("LOG_LEVEL", "INFO"))
    log_format: str = Field(
        default_factory=lambda: os.getenv(
            "LOG_FORMAT", "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
        )
    )


# Global settings instance - reads environment variables at import time
settings = Settings()
