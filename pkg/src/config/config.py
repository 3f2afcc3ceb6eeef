"""Run configuration shared by all CLI subcommands."""
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml
from pydantic import BaseModel, Field, field_validator, model_validator

from ..domain.entities import ScheduleShape
from ..domain.errors import ParameterRangeError


class RunConfig(BaseModel):
    """Validated parameters of one CLI invocation."""

    circuit_path: Optional[Path] = None
    J: float = Field(1.0, gt=0)
    M: float = Field(10.0, gt=0)
    s: Optional[float] = Field(None, ge=0, le=1)
    s_grid: Optional[int] = Field(None, ge=2)
    n_list: List[int] = Field(default_factory=lambda: [2, 4, 6, 8, 10, 12])
    T_list: List[float] = Field(default_factory=lambda: [10.0, 30.0, 100.0, 300.0])
    output_dir: Path = Path("results")
    seed: int = 0
    phi_index: int = Field(0, ge=0)
    schedule: ScheduleShape = ScheduleShape.LINEAR
    family: str = "identity"
    register_width: int = Field(1, ge=1)
    zero_tol: Optional[float] = Field(None, gt=0)
    kernel_tol: Optional[float] = Field(None, gt=0)
    force: bool = False

    @field_validator("n_list")
    @classmethod
    def _even_chain_lengths(cls, value: List[int]) -> List[int]:
        for n in value:
            if n < 2 or n % 2:
                raise ValueError(f"n values must be even and >= 2, got {n}")
        return value

    @field_validator("T_list")
    @classmethod
    def _ascending_times(cls, value: List[float]) -> List[float]:
        if not value:
            raise ValueError("T list must not be empty")
        if any(T <= 0 for T in value):
            raise ValueError("total times must be positive")
        if any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError("T list must be strictly ascending")
        return value

    @field_validator("family")
    @classmethod
    def _known_family(cls, value: str) -> str:
        if value not in ("identity", "random-rotation"):
            raise ValueError(f"unknown circuit family {value!r} (identity|random-rotation)")
        return value

    @model_validator(mode="after")
    def _circuit_exists(self) -> "RunConfig":
        if self.circuit_path is not None and not self.circuit_path.exists():
            raise ValueError(f"circuit path {self.circuit_path} does not exist")
        return self

    def s_values(self, default_points: int) -> List[float]:
        """Single s, or an evenly spaced grid over [0, 1]."""
        if self.s is not None:
            return [self.s]
        points = self.s_grid or default_points
        return [i / (points - 1) for i in range(points)]


def load_run_config(path: Optional[Path], overrides: Dict[str, Any]) -> RunConfig:
    """RunConfig from an optional YAML file, with explicit overrides taking precedence."""
    values: Dict[str, Any] = {}
    if path is not None:
        loaded = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
        if not isinstance(loaded, dict):
            raise ParameterRangeError(f"run configuration {path} must be a YAML mapping")
        values.update(loaded)
    values.update({key: value for key, value in overrides.items() if value is not None})
    return RunConfig(**values)
