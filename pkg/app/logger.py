import sys
from datetime import datetime

from loguru import logger as _logger

from app.config import PROJECT_ROOT, config


CONSOLE_FORMAT = (
    "<green>{time:HH:mm:ss.SSS}</green> | <level>{level: <7}</level> | "
    "<cyan>{extra[run]}</cyan> | {message}"
)


def define_log_level(
    print_level="INFO",
    logfile_level="DEBUG",
    name: str = None,
    enable_console: bool = True,
    enable_file: bool = True,
):
    """Reset sinks: console on stderr, optionally a file under logs/

    Every record carries `extra["run"]`, "-" outside a run; see `run_logger`.
    stdout is left to command output.
    """
    formatted_date = datetime.now().strftime("%Y%m%d%H%M%S")
    log_name = f"{name}_{formatted_date}" if name else formatted_date

    _logger.remove()
    _logger.configure(extra={"run": "-"})

    if enable_console:
        _logger.add(sys.stderr, level=print_level, format=CONSOLE_FORMAT)

    if enable_file:
        _logger.add(PROJECT_ROOT / f"logs/{log_name}.log", level=logfile_level)

    return _logger


def run_logger(prefix: str):
    """Logger whose records are tagged with a run's output prefix."""
    return _logger.bind(run=prefix)


logger = define_log_level(
    print_level=config.logging.print_level,
    logfile_level=config.logging.logfile_level,
    name="fraccauchy",
    enable_console=True,
    enable_file=config.logging.enable_file,
)
