from abc import ABC, abstractmethod
from typing import Any, Dict, Optional

from pydantic import BaseModel, Field


class BaseCommand(ABC, BaseModel):
    name: str
    description: str

    class Config:
        arbitrary_types_allowed = True

    def __call__(self, **kwargs) -> "CommandResult":
        """Execute the command with given parameters."""
        return self.execute(**kwargs)

    @abstractmethod
    def execute(self, **kwargs) -> "CommandResult":
        """Execute the command with given parameters."""


class CommandResult(BaseModel):
    """Represents the result of a command execution."""

    content: str = Field(default="", description="Text printed to stdout")
    args: Dict[str, Any] = Field(default_factory=dict, description="Structured results (paths, verdicts)")
    error: Optional[str] = Field(default=None, description="Error message if execution failed")
    exit_code: int = Field(default=0, description="Process exit status")

    class Config:
        arbitrary_types_allowed = True

    def __bool__(self):
        return self.exit_code == 0 and not self.error

    def __str__(self):
        if self.error:
            return f"Error: {self.error}"
        return self.content or ""


class CommandFailure(CommandResult):
    """A CommandResult that represents a failure."""

    exit_code: int = 2
