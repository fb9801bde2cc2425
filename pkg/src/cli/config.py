"""
Run configuration: JSON documents validated by pydantic models.

Unknown keys are rejected at every level; failures are collected into a
ConfigurationError whose diagnostics name the offending field path.
"""

import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..exceptions import ConfigurationError, KGZError
from ..solitons import SolitonSpec, SystemParams, check_admissible, check_distinct_speeds
from ..spectral import make_grid

logger = logging.getLogger(__name__)

DEFAULT_OUTPUT_DIR = "output"


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class SystemSection(_Section):
    alpha: float = 1.0
    beta: float = 0.0


class SolitonSection(_Section):
    omega: float
    c: float
    x0: float = 0.0
    gamma0: float = 0.0

    def to_spec(self) -> SolitonSpec:
        return SolitonSpec(omega=self.omega, c=self.c, x0=self.x0, gamma0=self.gamma0)


class GridSection(_Section):
    n: int = Field(2048, ge=8)
    length: float = Field(100.0, gt=0)

    @field_validator("n")
    @classmethod
    def _even(cls, value: int) -> int:
        if value % 2:
            raise ValueError(f"grid point count must be even, got {value}")
        return value


class TimeSection(_Section):
    t0: float = 0.0
    t1: float = 10.0
    dt: float = 1e-3
    scheme: Literal["rk4", "strang", "lawson"] = "lawson"
    dealias: bool = True

    @model_validator(mode="after")
    def _direction(self) -> "TimeSection":
        if self.dt == 0:
            raise ValueError("dt must be nonzero")
        if self.t1 != self.t0 and (self.t1 - self.t0) * self.dt < 0:
            raise ValueError(f"dt={self.dt} has the wrong sign to go from t0={self.t0} to t1={self.t1}")
        return self


class OutputSection(_Section):
    dir: Optional[str] = None
    stride: int = Field(100, ge=1)


class ConstructionSection(_Section):
    t0: float = Field(20.0, gt=0)
    tn_list: List[float] = Field(default_factory=lambda: [40.0, 60.0, 80.0], min_length=1)
    self_check: bool = True
    track_modulation: bool = True
    threshold_scale: float = Field(1.0, ge=0)

    @model_validator(mode="after")
    def _ordered(self) -> "ConstructionSection":
        if self.tn_list != sorted(set(self.tn_list)):
            raise ValueError(f"tn_list must be strictly increasing, got {self.tn_list}")
        if not self.t0 < self.tn_list[0]:
            raise ValueError(f"t0={self.t0} must be below min(tn_list)={self.tn_list[0]}")
        return self


class SpectrumSection(_Section):
    count: int = Field(4, ge=1, le=10)
    operator: Literal["L1", "L2"] = "L1"
    soliton: int = Field(0, ge=0)
    coercivity_samples: int = Field(0, ge=0)
    seed: int = 0


class ModulationSection(_Section):
    tol: float = Field(1e-10, gt=0)
    max_iter: int = Field(30, ge=1)
    snapshot: Optional[str] = None
    track: bool = False


class RunConfig(_Section):
    system: SystemSection = Field(default_factory=SystemSection)
    solitons: List[SolitonSection] = Field(default_factory=list)
    grid: GridSection = Field(default_factory=GridSection)
    time: TimeSection = Field(default_factory=TimeSection)
    output: OutputSection = Field(default_factory=OutputSection)
    construction: Optional[ConstructionSection] = None
    spectrum: Optional[SpectrumSection] = None
    modulation: Optional[ModulationSection] = None

    @model_validator(mode="after")
    def _physics(self) -> "RunConfig":
        params = self.params()
        for j, soliton in enumerate(self.solitons):
            try:
                check_admissible(soliton.to_spec(), params)
            except KGZError as e:
                raise ValueError(f"soliton {j}: {e}")
        if len(self.solitons) > 1:
            try:
                check_distinct_speeds(self.specs())
            except KGZError as e:
                raise ValueError(str(e))
        if self.spectrum is not None and self.solitons and self.spectrum.soliton >= len(self.solitons):
            raise ValueError(f"spectrum.soliton={self.spectrum.soliton} but only {len(self.solitons)} solitons")
        if self.construction is not None and self.solitons:
            horizon = max(self.construction.tn_list)
            specs = self.specs()
            needed = 2.0 * (max(abs(s.x0) + abs(s.c) * horizon for s in specs)
                            + max(10.0 / s.k for s in specs))
            if self.grid.length < needed:
                raise ValueError(f"grid.length={self.grid.length} too small for the construction "
                                 f"horizon t={horizon} (need >= {needed:.1f})")
        return self

    def params(self) -> SystemParams:
        return SystemParams(alpha=self.system.alpha, beta=self.system.beta)

    def specs(self) -> List[SolitonSpec]:
        return [s.to_spec() for s in self.solitons]

    def make_grid(self):
        return make_grid(self.grid.n, self.grid.length)

    def output_dir(self) -> Path:
        return Path(self.output.dir or os.getenv("KGZ_OUTPUT_DIR", DEFAULT_OUTPUT_DIR))


def _format_loc(loc) -> str:
    return ".".join(str(part) for part in loc) or "<root>"


def apply_overrides(document: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
    """Set dotted keys ('time.dt') on the raw document; None values are skipped."""
    for dotted, value in overrides.items():
        if value is None:
            continue
        node = document
        parts = dotted.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigurationError("invalid override", [f"{dotted}: '{part}' is not a section"])
        node[parts[-1]] = value
    return document


def parse_config(text: str, overrides: Optional[Dict[str, Any]] = None, source: str = "<config>") -> RunConfig:
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"{source}: invalid JSON",
                                 [f"line {e.lineno}, column {e.colno}: {e.msg}"]) from e
    if not isinstance(document, dict):
        raise ConfigurationError(f"{source}: configuration must be a JSON object")

    document = apply_overrides(document, overrides or {})
    try:
        return RunConfig.model_validate(document)
    except ValidationError as e:
        diagnostics = [f"{_format_loc(err['loc'])}: {err['msg']}" for err in e.errors()]
        raise ConfigurationError(f"{source}: {len(diagnostics)} configuration error(s)", diagnostics) from e


def load_config(path: Union[str, Path], overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """Read and validate a configuration file; .env defaults are loaded first."""
    load_dotenv()
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(f"configuration file '{path}' not found")
    config = parse_config(path.read_text(), overrides, source=str(path))
    logger.info("loaded configuration %s (%d solitons)", path, len(config.solitons))
    return config
