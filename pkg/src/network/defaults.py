"""
Versioned generator defaults (degree laws, road constants, role constants).
"""

import json
from functools import lru_cache
from pathlib import Path
from typing import Optional, Tuple

from pydantic import BaseModel, Field, ValidationError

from ..config import DEFAULTS_FILE
from ..exceptions import FileFormatError

DEFAULTS_FORMAT = "dadres-generator-defaults"


class PowerLawDefaults(BaseModel):
    exponent: float = Field(default=3.0, gt=2.0)
    max_retries: int = Field(default=20, ge=1)


class ExponentialLawDefaults(BaseModel):
    a0: float = Field(ge=0)
    amplitude: float = Field(gt=0)
    width: float = Field(gt=0)
    center: float
    k_max: int = Field(ge=1)


class GrerecDefaults(BaseModel):
    p: float = Field(ge=0, le=1)
    q: float = Field(ge=0, le=1)
    spacing_mi: float = Field(gt=0)


class RoadDefaults(BaseModel):
    length_mi: Tuple[float, float]
    speed_mph: Tuple[float, float]
    lanes: Tuple[int, int]
    time_cost: Tuple[float, float]


class ModeDefaults(BaseModel):
    standard_vehicle_length_mi: float = Field(gt=0)
    max_trip_time_h: float = Field(gt=0)


class VehicleDefaults(BaseModel):
    length_mi: float = Field(gt=0)
    bbl_per_vehicle: float = Field(gt=0)


class VehiclesDefaults(BaseModel):
    truck: VehicleDefaults
    car: VehicleDefaults


class RoleDefaults(BaseModel):
    fuel_fraction: float = Field(gt=0, lt=1)
    nodes_per_depot: int = Field(ge=1)
    reserve_count: int = Field(ge=0)
    station_demand_bbl_h: Tuple[float, float]
    penalty: float = Field(ge=0)


class GeneratorDefaults(BaseModel):
    format: str
    version: int
    power_law: PowerLawDefaults
    exponential_law: ExponentialLawDefaults
    grerec: GrerecDefaults
    road: RoadDefaults
    mode: ModeDefaults
    vehicles: VehiclesDefaults
    roles: RoleDefaults
    phases: int = Field(default=3, ge=1)
    pieces: int = Field(default=4, ge=1)


@lru_cache(maxsize=4)
def load_defaults(path: Optional[str] = None) -> GeneratorDefaults:
    """Read and validate the defaults file (packaged file when `path` is None)."""
    file = Path(path) if path else DEFAULTS_FILE
    try:
        raw = json.loads(file.read_text(encoding="utf-8"))
        defaults = GeneratorDefaults.model_validate(raw)
    except (OSError, json.JSONDecodeError) as e:
        raise FileFormatError(f"cannot read generator defaults: {e}", path=str(file)) from e
    except ValidationError as e:
        raise FileFormatError(f"invalid generator defaults: {e}", path=str(file)) from e
    if defaults.format != DEFAULTS_FORMAT:
        raise FileFormatError(f"unexpected format {defaults.format!r}", path=str(file))
    return defaults
