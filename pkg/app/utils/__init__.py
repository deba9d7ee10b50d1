"""Utility functions shared by the solvers"""
import functools
import time
from typing import Callable, Optional


def log_execution_time(
    log_level: str = "DEBUG",
    stage: Optional[str] = None,
    min_seconds: float = 0.0,
):
    """
    Decorator to log how long a solver stage took.

    Args:
        log_level: Log level for the timing line ('DEBUG', 'INFO', ...)
        stage: Name shown in the log; defaults to the qualified function name
        min_seconds: Calls faster than this are not logged

    Library errors (FracCauchyError) are logged at WARNING since callers report
    them to the user; anything else is logged at ERROR.

    Examples:
        >>> @log_execution_time(stage="spectral")
        ... def solve(grid):
        ...     ...
        # Logs: "spectral finished in 0.0120s"
    """
    def decorator(func: Callable) -> Callable:
        # Import here to avoid circular import
        from app.exceptions import FracCauchyError
        from app.logger import logger

        label = stage or f"{func.__module__}.{func.__qualname__}"

        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            start_time = time.perf_counter()
            try:
                result = func(*args, **kwargs)
            except FracCauchyError as e:
                logger.warning(f"{label} stopped after {time.perf_counter() - start_time:.4f}s: {e.message}")
                raise
            except Exception as e:
                logger.error(f"{label} failed after {time.perf_counter() - start_time:.4f}s: {e}")
                raise
            elapsed = time.perf_counter() - start_time
            if elapsed >= min_seconds:
                getattr(logger, log_level.lower())(f"{label} finished in {elapsed:.4f}s")
            return result

        return wrapper

    return decorator


__all__ = [
    "log_execution_time",
]
