"""
Settings resolution for the command line front end.

Values are taken in priority order:
1. Explicit command line arguments
2. Environment variables (MODUNITS_PREC, MODUNITS_FORMAT, MODUNITS_JOBS, MODUNITS_LOG_LEVEL)
3. Default values
"""

import logging
import os
from typing import Literal, Optional

from pydantic import BaseModel, Field, field_validator
from rich.console import Console
from rich.logging import RichHandler

DEFAULT_PRECISION = 60

ENV_PREFIX = "MODUNITS_"


class ToolkitSettings(BaseModel):
    """Resolved run configuration."""

    precision: int = Field(default=DEFAULT_PRECISION, ge=1)
    output_format: Literal["text", "json"] = "text"
    jobs: int = Field(default=1, ge=1)
    log_level: str = "WARNING"
    log_file: Optional[str] = None

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, value: str) -> str:
        value = value.upper()
        if not isinstance(logging.getLevelName(value), int):
            raise ValueError(f"unknown log level {value!r}")
        return value


def _from_environment(name: str) -> Optional[str]:
    value = os.environ.get(ENV_PREFIX + name)
    if value is not None and value.strip():
        return value.strip()
    return None


def resolve_settings(precision: Optional[int] = None,
                     output_format: Optional[str] = None,
                     jobs: Optional[int] = None,
                     log_level: Optional[str] = None,
                     log_file: Optional[str] = None) -> ToolkitSettings:
    """
    Build the run settings from command line values, environment and defaults.

    Args:
        precision: --prec value, if given
        output_format: --format value, if given
        jobs: --jobs value, if given
        log_level: --log-level value, if given
        log_file: --log-file value, if given

    Returns:
        Validated ToolkitSettings
    """
    values = {}
    explicit = {
        "precision": precision,
        "output_format": output_format,
        "jobs": jobs,
        "log_level": log_level,
        "log_file": log_file,
    }
    environment_names = {
        "precision": "PREC",
        "output_format": "FORMAT",
        "jobs": "JOBS",
        "log_level": "LOG_LEVEL",
        "log_file": "LOG_FILE",
    }
    for field, value in explicit.items():
        if value is not None:
            values[field] = value
            continue
        from_env = _from_environment(environment_names[field])
        if from_env is not None:
            values[field] = from_env
    return ToolkitSettings(**values)


def configure_logging(settings: ToolkitSettings) -> None:
    """Attach a rich stderr handler (and an optional file handler) to the root logger."""
    handlers = [RichHandler(console=Console(stderr=True), show_path=False)]
    if settings.log_file:
        file_handler = logging.FileHandler(settings.log_file, mode="w")
        file_handler.setFormatter(logging.Formatter("%(levelname)s: %(name)s: %(message)s"))
        handlers.append(file_handler)
    logging.basicConfig(level=settings.log_level, format="%(message)s",
                        handlers=handlers, force=True)
