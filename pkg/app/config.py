"""
Solver configuration loaded from TOML.

Sections map one-to-one onto settings models:
    [solver]        # spectral and quadrature defaults
    initial_modes = 16
    max_modes = 4096

    [montecarlo]    # path simulation defaults
    step = 1e-3
    ...
"""
import os
import threading
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, Field, ValidationError


THREADS_ENV_VAR = "FRACCAUCHY_THREADS"


def get_project_root() -> Path:
    """Get the project root directory."""
    return Path(__file__).resolve().parent.parent


PROJECT_ROOT = get_project_root()


class SolverSettings(BaseModel):
    """Spectral and subordination solver settings."""

    initial_modes: int = Field(16, ge=1, description="First truncation tried by mode doubling")
    max_modes: int = Field(4096, ge=1, description="Capacity of coefficient caches")
    spectral_tol: float = Field(1e-12, gt=0, description="Pointwise Cauchy criterion for mode doubling")
    coefficient_tol: float = Field(1e-10, gt=0, description="Coefficient quadrature tolerance on intervals")
    box_coefficient_tol: float = Field(1e-8, gt=0, description="Coefficient quadrature tolerance on boxes")
    quadrature_tol: float = Field(1e-8, gt=0, description="Absolute tolerance of subordination integrals")
    quadrature_limit: int = Field(200, ge=10, description="Initial subdivision limit for adaptive quadrature")
    quadrature_retries: int = Field(3, ge=1, description="Attempts before quadrature gives up")


class MonteCarloSettings(BaseModel):
    """Monte Carlo settings."""

    replicates: int = Field(20000, ge=100, description="Default replicate count")
    step: float = Field(1e-3, gt=0, description="Path step, scaled by the squared domain scale")
    block_size: int = Field(4096, ge=2, description="Replicates drawn from one random stream")
    max_rejection_rate: float = Field(1e-3, ge=0, description="Rejected clock draws tolerated per run")
    threads: int = Field(4, ge=1, description="Worker threads for replicate blocks")
    seed: int = Field(20240611, ge=0, description="Seed used when a run names none")


class VerificationSettings(BaseModel):
    """Residual and distribution test settings."""

    caputo_step: float = Field(1e-4, gt=0, description="Uniform step of the L1 Caputo grid")
    residual_tol: float = Field(2e-3, gt=0, description="Residual tolerance for fractional PDE checks")
    ks_level: float = Field(0.01, gt=0, lt=1, description="Significance level of KS tests")
    reference_cells: int = Field(512, ge=16, description="Cells used to tabulate reference CDFs")
    fd_step: float = Field(1e-3, gt=0, description="Finite-difference step for time derivatives")


class LogSettings(BaseModel):
    """Logging settings."""

    print_level: str = Field("INFO", description="Console log level")
    logfile_level: str = Field("DEBUG", description="File log level")
    enable_file: bool = Field(False, description="Write logs under logs/")


class OutputSettings(BaseModel):
    """Output settings."""

    directory: str = Field("results", description="Directory for CSV and JSON outputs")
    prefix: str = Field("run", description="File name prefix")


class AppConfig(BaseModel):
    """Application configuration."""

    solver: SolverSettings = Field(default_factory=SolverSettings)
    montecarlo: MonteCarloSettings = Field(default_factory=MonteCarloSettings)
    verification: VerificationSettings = Field(default_factory=VerificationSettings)
    logging: LogSettings = Field(default_factory=LogSettings)
    output: OutputSettings = Field(default_factory=OutputSettings)


class Config:
    """
    Configuration manager with singleton pattern.

    Usage:
        from app.config import config
        tol = config.solver.spectral_tol
    """

    _instance = None
    _lock = threading.Lock()

    def __new__(cls):
        """Singleton pattern implementation."""
        if cls._instance is None:
            with cls._lock:
                if cls._instance is None:
                    cls._instance = super().__new__(cls)
                    cls._instance._initialized = False
        return cls._instance

    def __init__(self):
        """Initialize configuration (only once)."""
        if not self._initialized:
            with self._lock:
                if not self._initialized:
                    self._load_config()
                    self._initialized = True

    @staticmethod
    def _get_config_path() -> Optional[Path]:
        """
        Get configuration file path.

        Returns:
            Path to config.toml or config.example.toml, None when neither exists
            (built-in defaults are used then)
        """
        root = PROJECT_ROOT
        config_path = root / "config" / "config.toml"
        if config_path.exists():
            return config_path

        example_path = root / "config" / "config.example.toml"
        if example_path.exists():
            return example_path

        return None

    def _load_config_file(self) -> dict:
        """Load and parse TOML configuration file."""
        config_path = self._get_config_path()
        if config_path is None:
            return {}
        try:
            with config_path.open("rb") as f:
                return tomllib.load(f)
        except tomllib.TOMLDecodeError as e:
            raise ValueError(f"Invalid TOML format in {config_path}: {e}") from e
        except Exception as e:
            raise RuntimeError(f"Failed to load config from {config_path}: {e}") from e

    def _load_config(self):
        """Load and validate configuration."""
        try:
            raw_config = self._load_config_file()
            self._config = AppConfig(**raw_config)
        except (ValueError, ValidationError) as e:
            raise ValueError(f"Configuration validation failed: {e}") from e
        except Exception as e:
            raise RuntimeError(f"Failed to initialize configuration: {e}") from e

    @property
    def solver(self) -> SolverSettings:
        return self._config.solver

    @property
    def montecarlo(self) -> MonteCarloSettings:
        return self._config.montecarlo

    @property
    def verification(self) -> VerificationSettings:
        return self._config.verification

    @property
    def logging(self) -> LogSettings:
        return self._config.logging

    @property
    def output(self) -> OutputSettings:
        return self._config.output

    @property
    def thread_count(self) -> int:
        """
        Worker thread count.

        FRACCAUCHY_THREADS overrides the [montecarlo] threads setting when it
        holds a positive integer.
        """
        raw = os.environ.get(THREADS_ENV_VAR)
        if raw:
            try:
                value = int(raw)
            except ValueError:
                value = 0
            if value > 0:
                return value
        return self._config.montecarlo.threads

    def reload(self):
        """Reload configuration from file (useful for testing)."""
        with self._lock:
            self._initialized = False
            self._load_config()
            self._initialized = True


# Global singleton instance
config = Config()
