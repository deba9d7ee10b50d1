"""Collection class for dispatching commands by name."""
from typing import Any, Dict

from app.command.base import BaseCommand, CommandFailure, CommandResult
from app.exceptions import ConfigError, FracCauchyError, RunError
from app.logger import logger


class CommandCollection:
    """A collection of defined commands."""

    def __init__(self, *commands: BaseCommand):
        self.commands = commands
        self.command_map = {str(command.name): command for command in commands}

    def __iter__(self):
        return iter(self.commands)

    def execute(self, *, name: str, command_input: Dict[str, Any] = None) -> CommandResult:
        command = self.command_map.get(str(name))
        if not command:
            return CommandFailure(error=f"Command {name} is invalid")
        try:
            return command(**(command_input or {}))
        except ConfigError as e:
            return CommandFailure(error=e.message, args={"diagnostics": [str(d) for d in e.diagnostics]})
        except RunError as e:
            logger.error(f"{name} failed in method {e.method} at {e.point}: {e.message}")
            return CommandFailure(error=e.message, args={"method": e.method, "point": e.point})
        except FracCauchyError as e:
            return CommandFailure(error=e.message)

    def get_command(self, name: str) -> BaseCommand:
        return self.command_map.get(str(name))

    def add_command(self, command: BaseCommand):
        self.commands += (command,)
        self.command_map[str(command.name)] = command
        return self
