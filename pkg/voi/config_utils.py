"""
Configuration utilities for the VoI toolkit
Loads environment settings and configures logging
"""

import logging
import os
import sys
from typing import Optional, Tuple

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict

# Load environment variables
load_dotenv()

LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"


class VoiSettings(BaseModel):
    """Runtime settings read from the environment (or a .env file)."""

    model_config = ConfigDict(frozen=True)

    log_level: str = "WARNING"
    max_workers: int = 1
    default_deltas: Tuple[float, ...] = (0.0,)
    table_decimals: int = 4


def parse_deltas(raw: str, source: str = "--deltas") -> Tuple[float, ...]:
    """
    Parse a comma-separated list of δ thresholds.

    Raises:
        ValueError: If an entry is not a number or is negative
    """
    deltas = []
    for part in raw.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            delta = float(part)
        except ValueError:
            raise ValueError(f"{source}: '{part}' is not a number")
        if not delta >= 0:
            raise ValueError(f"{source}: thresholds must be >= 0, got {part}")
        deltas.append(delta)

    if not deltas:
        raise ValueError(f"{source}: at least one threshold is required")

    return tuple(deltas)


def load_settings(environ: Optional[dict] = None) -> VoiSettings:
    """
    Build settings from environment variables.

    Args:
        environ: Mapping to read from, defaults to os.environ

    Raises:
        ValueError: If a variable is set to a malformed value
    """
    env = os.environ if environ is None else environ

    log_level = env.get("VOI_LOG_LEVEL", "WARNING").upper()
    if not isinstance(logging.getLevelName(log_level), int):
        raise ValueError(f"VOI_LOG_LEVEL must be a logging level name, got {log_level!r}")

    try:
        max_workers = int(env.get("VOI_MAX_WORKERS", "1"))
        table_decimals = int(env.get("VOI_TABLE_DECIMALS", "4"))
    except ValueError as e:
        raise ValueError(f"VOI_MAX_WORKERS and VOI_TABLE_DECIMALS must be integers: {e}")

    if max_workers < 1:
        raise ValueError("VOI_MAX_WORKERS must be at least 1")
    if table_decimals < 0:
        raise ValueError("VOI_TABLE_DECIMALS must be non-negative")

    default_deltas = parse_deltas(env.get("VOI_DEFAULT_DELTAS", "0"), source="VOI_DEFAULT_DELTAS")

    return VoiSettings(
        log_level=log_level,
        max_workers=max_workers,
        default_deltas=default_deltas,
        table_decimals=table_decimals,
    )


def configure_logging(level: str) -> None:
    """Send log records to stderr so stdout carries only reports."""
    logging.basicConfig(stream=sys.stderr, level=level, format=LOG_FORMAT, force=True)


# Singleton instance; a malformed variable leaves defaults here and main() reports it
try:
    settings = load_settings()
    settings_error: Optional[str] = None
except ValueError as e:
    settings = VoiSettings()
    settings_error = str(e)
