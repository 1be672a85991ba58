"""
Settings for the engine, read once from the environment (and .env).
"""

import os
from dataclasses import dataclass, replace
from dotenv import load_dotenv
from services.errors import ConfigurationError

load_dotenv()

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off", ""}


def _int_env(name: str, default: int, minimum: int = 1) -> int:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ConfigurationError(f"{name} must be an integer, got {raw!r}")
    if value < minimum:
        raise ConfigurationError(f"{name} must be >= {minimum}, got {value}")
    return value


def _bool_env(name: str, default: bool) -> bool:
    raw = os.getenv(name)
    if raw is None:
        return default
    lowered = raw.strip().lower()
    if lowered in _TRUE:
        return True
    if lowered in _FALSE:
        return False
    raise ConfigurationError(f"{name} must be a boolean, got {raw!r}")


@dataclass(frozen=True)
class Settings:
    """Engine defaults; CLI flags override them per run"""

    threads: int = 1
    partitions: int = 8
    digits: int = 4
    window_seconds: int = 600
    top_routes: int = 300
    chunk_rows: int = 100_000
    log_level: str = "INFO"
    compress: bool = False

    @classmethod
    def from_env(cls) -> "Settings":
        digits = _int_env("TGA_DIGITS", cls.digits, minimum=2)
        if digits not in (2, 3, 4):
            raise ConfigurationError(f"TGA_DIGITS must be one of 4, 3, 2, got {digits}")
        return cls(
            threads=_int_env("TGA_THREADS", cls.threads),
            partitions=_int_env("TGA_PARTITIONS", cls.partitions),
            digits=digits,
            window_seconds=_int_env("TGA_WINDOW_SECONDS", cls.window_seconds),
            top_routes=_int_env("TGA_TOP_ROUTES", cls.top_routes, minimum=0),
            chunk_rows=_int_env("TGA_CHUNK_ROWS", cls.chunk_rows),
            log_level=os.getenv("TGA_LOG_LEVEL", cls.log_level).upper(),
            compress=_bool_env("TGA_COMPRESS", cls.compress),
        )

    def override(self, **kwargs) -> "Settings":
        """Return a copy with every non-None keyword applied"""
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})


# Global settings instance
settings = Settings.from_env()
