"""Configuration management for the Bass-Serre toolkit."""

import logging
import sys
from typing import Any

import structlog
from pydantic import Field, ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict

from .types import LogLevel

logger = structlog.get_logger(__name__)

DEFAULT_CONJUGACY_DEPTH = 6
DEFAULT_TRAJET_MAX_STATES = 10_000
DEFAULT_OUTER_ORDER_LIMIT = 64
DEFAULT_ROOT_K_MAX = 6
DEFAULT_BALL_RADIUS = 3


class Settings(BaseSettings):
    """Application settings."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore"
    )

    # Search bounds
    conjugacy_depth: int = Field(
        DEFAULT_CONJUGACY_DEPTH, ge=0, description="Ball radius for edge-group conjugator searches"
    )
    trajet_max_states: int = Field(
        DEFAULT_TRAJET_MAX_STATES, ge=1, description="State budget of trajet and circuit searches"
    )
    outer_order_limit: int = Field(
        DEFAULT_OUTER_ORDER_LIMIT, ge=1, description="Largest power tried by outer-order searches"
    )
    root_k_max: int = Field(DEFAULT_ROOT_K_MAX, ge=2, description="Largest exponent in root reports")
    ball_radius: int = Field(
        DEFAULT_BALL_RADIUS, ge=0, description="Word-length radius of bounded enumerations"
    )

    # MCP Server Configuration
    mcp_server_name: str = Field("bass-serre-toolkit", description="MCP server name")
    mcp_server_version: str = Field("0.3.0", description="MCP server version")

    # Logging Configuration
    log_level: LogLevel = Field(LogLevel.INFO, description="Logging level")
    log_format: str = Field("text", description="Log format (json or text)")


def load_settings() -> Settings:
    """Load application settings with validation."""
    try:
        settings = Settings()
        logger.info(
            "Configuration loaded successfully",
            log_level=settings.log_level.value,
            conjugacy_depth=settings.conjugacy_depth,
            trajet_max_states=settings.trajet_max_states,
        )
        return settings
    except ValidationError as e:
        logger.error("Configuration validation failed", errors=e.errors())
        raise


class StderrLoggerFactory:
    """Logger factory that writes to stderr; stdout carries reports and the MCP stream."""

    def __call__(self, *args: Any) -> structlog.PrintLogger:
        return structlog.PrintLogger(file=sys.stderr)


def setup_logging(settings: Settings) -> None:
    """Setup structured logging."""
    log_level_constant = getattr(logging, settings.log_level.value.upper(), logging.INFO)

    logging.basicConfig(
        level=log_level_constant,
        stream=sys.stderr,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )

    renderer: Any
    if settings.log_format == "json":
        renderer = structlog.processors.JSONRenderer()
    else:
        renderer = structlog.dev.ConsoleRenderer()

    structlog.configure(
        processors=[
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.add_log_level,
            structlog.processors.StackInfoRenderer(),
            structlog.dev.set_exc_info,
            renderer,
        ],
        wrapper_class=structlog.make_filtering_bound_logger(log_level_constant),
        logger_factory=StderrLoggerFactory(),
        cache_logger_on_first_use=True,
    )
