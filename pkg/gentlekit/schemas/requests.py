from enum import Enum
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, Field, field_validator, model_validator
from sympy import isprime

from gentlekit.config import get_settings


class Command(str, Enum):
    ANALYZE = "analyze"
    CM = "cm"
    BLOCKS = "blocks"
    JACOBIAN = "jacobian"
    FROM_ANGULATION = "from-angulation"
    SUITE = "suite"


class SuiteName(str, Enum):
    BLOCKS = "blocks"
    SATURATED = "saturated"
    DISK = "disk"
    ANNULUS = "annulus"
    PARITY = "parity"


def _settings_default(name: str):
    return lambda: getattr(get_settings(), name)


class AnalysisRequest(BaseModel):
    """One CLI invocation: a subcommand, its input and the computation options"""
    command: Command
    input_path: Optional[Path] = None
    m: int = Field(default=1, ge=1, description="Angulation parameter")
    characteristic: int = Field(default_factory=_settings_default("field_char"), ge=0)
    cutoff: Optional[int] = Field(default_factory=_settings_default("cutoff"), ge=1)
    max_letters: int = Field(default_factory=_settings_default("max_letters"), ge=0)
    seed: int = Field(default_factory=_settings_default("seed"))
    trials: int = Field(default_factory=_settings_default("trials"), ge=1)
    json_output: bool = False
    emit_bq: Optional[Path] = None

    # blocks / jacobian
    potential: bool = False
    potential_file: Optional[Path] = None

    # suite
    suite: Optional[SuiteName] = None
    count: Optional[int] = Field(default=None, ge=0)
    n: int = Field(default=4, ge=2)

    @field_validator("characteristic")
    @classmethod
    def characteristic_is_zero_or_prime(cls, value: int) -> int:
        if value != 0 and not isprime(value):
            raise ValueError(f"characteristic must be 0 or a prime, got {value}")
        return value

    @model_validator(mode="after")
    def command_has_its_inputs(self) -> 'AnalysisRequest':
        if self.command == Command.SUITE:
            if self.suite is None:
                raise ValueError("the suite command needs --suite")
        elif self.input_path is None:
            raise ValueError(f"the {self.command.value} command needs an input file")
        if self.command == Command.FROM_ANGULATION and self.input_path.suffix != ".ang":
            raise ValueError("from-angulation reads a .ang file")
        return self
