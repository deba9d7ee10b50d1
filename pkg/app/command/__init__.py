from app.command.base import BaseCommand, CommandFailure, CommandResult
from app.command.collection import CommandCollection
from app.command.dist_test import DistTestCommand
from app.command.eigen import EigenCommand
from app.command.solve import SolveCommand
from app.command.verify import VerifyCommand


def default_commands() -> CommandCollection:
    return CommandCollection(SolveCommand(), VerifyCommand(), DistTestCommand(), EigenCommand())


__all__ = [
    "BaseCommand",
    "CommandResult",
    "CommandFailure",
    "CommandCollection",
    "SolveCommand",
    "VerifyCommand",
    "DistTestCommand",
    "EigenCommand",
    "default_commands",
]
