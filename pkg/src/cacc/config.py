"""Run configuration.

Precedence, lowest to highest: built-in defaults, a TOML file (given with
``--config`` or the ``CACC_CONFIG`` environment variable), command-line flags.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from .errors import InvalidInput

CONFIG_ENV = "CACC_CONFIG"
DEFAULT_BUDGET = 1 << 30
DEFAULT_PRIMES = (2, 3, 5, 7, 11, 13)


@dataclass(frozen=True)
class Config:
    memory_budget_bytes: int = DEFAULT_BUDGET
    primes: tuple[int, ...] = DEFAULT_PRIMES
    n_max: int = 12
    workers: int = field(default_factory=lambda: os.cpu_count() or 1)
    output_format: str = "json"

    # growth classifier thresholds
    plateau_length: int = 4
    exponent_tolerance: float = 0.25
    superquadratic_exponent: float = 2.5
    min_r2: float = 0.95

    def __post_init__(self):
        if self.memory_budget_bytes <= 0:
            raise InvalidInput("memory_budget_bytes must be positive")
        if not self.primes or any(p < 2 for p in self.primes):
            raise InvalidInput(f"primes must all be >= 2, got {list(self.primes)}")
        if self.workers < 1:
            raise InvalidInput("workers must be >= 1")
        if self.output_format not in ("json", "csv", "text"):
            raise InvalidInput(f"unknown output format {self.output_format!r}")
        object.__setattr__(self, "primes", tuple(int(p) for p in self.primes))

    def updated(self, **overrides) -> Config:
        """Copy with the non-None overrides applied."""
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


def load_config(path: str | os.PathLike | None = None) -> Config:
    """Defaults, overridden by the TOML file at `path` or ``$CACC_CONFIG``."""
    if path is None:
        path = os.environ.get(CONFIG_ENV) or None
    if path is None:
        return Config()
    with open(Path(path), "rb") as fh:
        data = tomllib.load(fh)
    data = data.get("cacc", data)
    known = {f.name for f in fields(Config)}
    unknown = set(data) - known
    if unknown:
        raise InvalidInput(f"unknown config keys: {sorted(unknown)}")
    if "primes" in data:
        data["primes"] = tuple(data["primes"])
    return Config(**data)
