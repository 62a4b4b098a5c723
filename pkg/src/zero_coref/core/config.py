"""Toolkit configuration."""

from typing import Annotated

from pydantic import field_validator
from pydantic_settings import BaseSettings, NoDecode, SettingsConfigDict


def parse_buckets(value: str | list[int] | tuple[int, ...]) -> tuple[int, ...]:
    """Parse distance bucket thresholds.

    Args:
        value: Comma-separated string (``"0,1,2,4,8"``) or a sequence of integers

    Returns:
        Thresholds as a tuple

    Raises:
        ValueError: If thresholds are empty, do not start at 0 or are not increasing
    """
    if isinstance(value, str):
        try:
            thresholds = tuple(int(part) for part in value.split(",") if part.strip())
        except ValueError as e:
            raise ValueError(f"Invalid bucket thresholds: {value!r}") from e
    else:
        thresholds = tuple(int(part) for part in value)

    if not thresholds:
        raise ValueError("Bucket thresholds must not be empty")
    if thresholds[0] != 0:
        raise ValueError("Bucket thresholds must start at 0")
    if any(b <= a for a, b in zip(thresholds, thresholds[1:], strict=False)):
        raise ValueError("Bucket thresholds must be strictly increasing")
    return thresholds


class Settings(BaseSettings):
    """Toolkit settings."""

    # Application
    app_name: str = "zero-coref"
    app_version: str = "0.1.0"
    debug: bool = False

    # Logging
    log_level: str = "INFO"
    log_file: str | None = None
    log_json: bool = False

    # Extended dataset conventions
    pro_marker: str = "*pro*"
    pro_pos: str = "PRON"
    pro_fill: str = "-"
    onf_azp_markers: list[str] = ["*", "*pro*"]

    # CoNLL serialization
    column_layout: str = "canonical"  # canonical | fixed
    fixed_width_gap: int = 3
    validate_parse_bits: bool = True

    # Features and resolution
    distance_buckets: Annotated[tuple[int, ...], NoDecode] = (0, 1, 2, 4, 8)
    cluster_representation: str = "last"  # first | last
    verb_pos_prefixes: list[str] = ["VB", "IV", "PV", "V"]
    embedding_dim: int = 8
    seed: int = 0
    jobs: int = 1

    # Scoring
    azp_hit_mode: str = "entity"  # position | entity
    include_pro_in_coref: bool = True
    report_decimals: int = 4

    # Losses
    loss_epsilon: float = 1e-7
    normalization_tolerance: float = 1e-6

    # External resolver processes
    plugin_timeout: float = 120.0
    plugin_protocol_version: int = 1

    model_config = SettingsConfigDict(
        env_file=".env", env_prefix="ZERO_COREF_", case_sensitive=False, extra="ignore"
    )

    @field_validator("distance_buckets", mode="before")
    @classmethod
    def validate_buckets(cls, v: str | list[int] | tuple[int, ...]) -> tuple[int, ...]:
        """Accept comma-separated thresholds from the environment."""
        return parse_buckets(v)

    @field_validator("column_layout")
    @classmethod
    def validate_layout(cls, v: str) -> str:
        """Restrict the column layout to the supported modes."""
        if v not in ("canonical", "fixed"):
            raise ValueError("column_layout must be 'canonical' or 'fixed'")
        return v

    @field_validator("cluster_representation")
    @classmethod
    def validate_representation(cls, v: str) -> str:
        """Restrict the cluster representation strategy."""
        if v not in ("first", "last"):
            raise ValueError("cluster_representation must be 'first' or 'last'")
        return v

    @field_validator("azp_hit_mode")
    @classmethod
    def validate_hit_mode(cls, v: str) -> str:
        """Restrict the AZP hit counting mode."""
        if v not in ("position", "entity"):
            raise ValueError("azp_hit_mode must be 'position' or 'entity'")
        return v


# Global settings instance
settings = Settings()
