"""
Pydantic schemas for command configuration, output metadata and errors
"""

from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, Field

from replirate.core.exceptions import ReplirateError

# ============== Run Schemas ==============
class RunConfig(BaseModel):
    """Options shared by every command that writes a table."""

    command: str = Field(..., description="Command name")
    command_line: str = Field(..., description="Normalised command line, recorded in the output header")
    out: Path | None = Field(default=None, description="Output path; stdout when absent")
    format: Literal["csv", "json"] = Field(default="csv", description="Output format")
    seed: int | None = Field(default=None, description="Base seed of any Monte Carlo stream")
    level: float = Field(default=0.95, gt=0.0, lt=1.0, description="HDI probability level")
    float_digits: int = Field(default=17, ge=1, le=17, description="Significant digits in CSV output")


class OutputMetadata(BaseModel):
    """Header written ahead of every table."""

    tool: str = Field(..., description="Tool name")
    version: str = Field(..., description="Tool version")
    command_line: str = Field(..., description="Command that produced the file")
    seed: int | None = Field(default=None, description="Base seed, if any")
    level: float = Field(..., description="HDI probability level")
    decisions: dict[str, Any] = Field(default_factory=dict, description="Numerical choices behind the numbers")


# ============== Error Schemas ==============
class ErrorResponse(BaseModel):
    """Single-line error report written to stderr."""

    code: str = Field(..., description="Machine-readable error code")
    exit_code: int = Field(..., description="Process exit status")
    message: str = Field(..., description="Human-readable message")

    @classmethod
    def from_error(cls, error: ReplirateError) -> "ErrorResponse":
        return cls(code=error.code, exit_code=error.exit_code, message=error.message)

    def line(self) -> str:
        message = " ".join(self.message.split()).replace('"', "'")
        return f'error code={self.code} exit={self.exit_code} message="{message}"'
