"""
Settings and run configuration loading
"""

import json
import os
from typing import Dict, List, Literal, Optional, Tuple

import numpy as np
from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from models.exceptions import InvalidInput
from models.network import SPEC_TYPES, ASSUMPTIONS, NetworkSpec

SETTINGS_PATH = 'config/settings.json'

DEFAULT_SETTINGS = {
    "log_level": "INFO",
    "db_path": "data/hetnet.db",
    "out_dir": "reports",
    "samples": 100000,
    "eps_grid": [1e-2, 3e-3, 1e-3, 3e-4, 1e-4],
    "seed": 2024,
    "n_cap": 10000,
    "domain_margin": 0.95,
    "max_steps": 200,
    "attraction_floor": 1e-300,
    "tolerance": 0.15,
    "chunk_size": 20000,
    "show_progress": True,
}


class Settings(BaseModel):
    """Application defaults from config/settings.json"""
    model_config = ConfigDict(frozen=True, extra="forbid")

    log_level: str = "INFO"
    db_path: str = "data/hetnet.db"
    out_dir: str = "reports"
    samples: int = Field(default=100000, gt=0)
    eps_grid: List[float] = Field(default_factory=lambda: list(DEFAULT_SETTINGS["eps_grid"]))
    seed: int = 2024
    n_cap: int = 10000
    domain_margin: float = 0.95
    max_steps: int = 200
    attraction_floor: float = 1e-300
    tolerance: float = 0.15
    chunk_size: int = 20000
    show_progress: bool = True

    @field_validator("domain_margin")
    @classmethod
    def _margin_in_unit_interval(cls, value: float) -> float:
        if not 0.0 < value < 1.0:
            raise ValueError("domain_margin must lie in (0, 1)")
        return value


def load_settings(path: str = SETTINGS_PATH, logger=None) -> Settings:
    """Load settings, falling back to defaults when the file is missing"""
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
        return Settings.model_validate(data)
    except FileNotFoundError:
        if logger:
            logger.warning("⚠️ settings.json not found, using defaults")
        return Settings.model_validate(DEFAULT_SETTINGS)
    except (ValueError, ValidationError) as e:
        raise InvalidInput(f"Invalid settings file {path}: {e}") from e


def worker_count() -> int:
    """Worker threads, capped by HETNET_THREADS from the environment or .env"""
    load_dotenv()
    cpus = os.cpu_count() or 1
    raw = os.getenv("HETNET_THREADS")
    if not raw:
        return cpus
    try:
        return max(1, min(int(raw), cpus))
    except ValueError:
        raise InvalidInput(f"HETNET_THREADS must be an integer, got {raw!r}")


# ==========================================
# Run configuration
# ==========================================

class RunOptions(BaseModel):
    model_config = ConfigDict(extra="forbid")

    eps_grid: Optional[List[float]] = None
    samples: Optional[int] = Field(default=None, gt=0)
    seed: Optional[int] = None
    n_cap: Optional[int] = None
    nu_convention: Literal["composed", "display"] = "composed"
    out_dir: Optional[str] = None
    tolerance: Optional[float] = Field(default=None, ge=0)
    connections: Optional[List[str]] = None
    witness_count: int = 1
    max_draws: int = 20000
    full_state: bool = False

    @field_validator("eps_grid")
    @classmethod
    def _descending_grid(cls, grid: Optional[List[float]]) -> Optional[List[float]]:
        if grid is None:
            return grid
        if not grid or any(not 0.0 < eps < 1.0 for eps in grid):
            raise ValueError("eps grid values must lie in (0, 1)")
        if any(a <= b for a, b in zip(grid, grid[1:])):
            raise ValueError("eps grid must be strictly descending")
        return grid


class SweepAxis(BaseModel):
    """Evenly spaced values of one eigenvalue"""
    model_config = ConfigDict(extra="forbid")

    start: float
    stop: float
    num: int = Field(ge=0)

    def values(self) -> List[float]:
        return [float(v) for v in np.linspace(self.start, self.stop, self.num)]


class RunConfig(BaseModel):
    """A --config document"""
    model_config = ConfigDict(extra="forbid")

    network: Literal["B3B3", "B2B2"]
    eigenvalues: Dict[str, float]
    assumptions: List[str] = Field(default_factory=list)
    options: RunOptions = Field(default_factory=RunOptions)
    sweep: Optional[Dict[str, SweepAxis]] = None
    # witness search box: eigenvalue -> (low, high)
    box: Optional[Dict[str, Tuple[float, float]]] = None

    @field_validator("assumptions")
    @classmethod
    def _known_assumptions(cls, names: List[str]) -> List[str]:
        unknown = [name for name in names if name not in ASSUMPTIONS]
        if unknown:
            raise ValueError(f"Unknown assumptions {unknown}; expected any of {ASSUMPTIONS}")
        return names

    def build_spec(self, **overrides) -> NetworkSpec:
        data = dict(self.eigenvalues)
        data.update(overrides)
        try:
            return SPEC_TYPES[self.network].model_validate(data)
        except ValidationError as e:
            raise InvalidInput(f"Invalid eigenvalues for {self.network}: {e}") from e


def parse_run_config(text: str, source: str = "<config>") -> RunConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InvalidInput(f"{source}: malformed JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        raise InvalidInput(f"{source}: {e}") from e


def load_run_config(path: str) -> RunConfig:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            text = f.read()
    except OSError as e:
        raise InvalidInput(f"Cannot read config {path}: {e}") from e
    return parse_run_config(text, source=path)


def parse_cli_options(eps_grid: Optional[str] = None, samples: Optional[int] = None,
                      tolerance: Optional[float] = None) -> RunOptions:
    """Command-line overrides, validated like the options block of a config"""
    data = {"samples": samples, "tolerance": tolerance}
    if eps_grid:
        try:
            data["eps_grid"] = [float(v) for v in eps_grid.split(",")]
        except ValueError as e:
            raise InvalidInput(f"--eps-grid must be comma-separated numbers, got {eps_grid!r}") from e
    try:
        return RunOptions.model_validate(data)
    except ValidationError as e:
        raise InvalidInput(f"Invalid command-line options: {e}") from e
