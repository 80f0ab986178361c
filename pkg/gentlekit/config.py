"""
Configuration management for the toolkit.
Centralizes environment variables and computation defaults.
"""
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

load_dotenv()


class Settings(BaseSettings):
    """Toolkit settings loaded from environment variables (prefix GENTLEKIT_)."""

    model_config = SettingsConfigDict(
        env_prefix="GENTLEKIT_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )

    # Application
    app_name: str = Field(default="gentlekit", description="Name printed in reports")
    app_version: str = Field(default="0.1.0", description="Version printed in reports")

    # Exact arithmetic
    field_char: int = Field(default=10007, description="Field characteristic; 0 selects the rationals")
    trials: int = Field(default=8, ge=1, description="Random combinations tried by the iso test")
    seed: int = Field(default=0, description="Default seed for randomized verdicts")

    # Search bounds
    cutoff: Optional[int] = Field(default=None, ge=1, description="Syzygy cutoff; unset means 2*dim")
    max_letters: int = Field(default=6, ge=0, description="Letter bound for string enumeration")

    # Property suites
    fixtures_dir: Path = Field(default=Path(__file__).resolve().parent.parent / "fixtures",
                               description="Bound quivers the parity suite checks first")
    suite_count: int = Field(default=200, ge=0, description="Instances per property suite")
    annulus_retries: int = Field(default=200, ge=1, description="Retry budget for annulus sampling")
    winding_bound: int = Field(default=2, ge=0, description="Winding bound for annulus sampling")

    # Logging
    log_level: str = Field(default="WARNING", description="Root log level")


# Global settings instance
settings = Settings()


def get_settings() -> Settings:
    """Get the toolkit settings."""
    return settings
