import json
import logging
from pathlib import Path
from typing import List, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_serializer, field_validator, model_validator

from models.carbon import CarbonIntensitySeries
from utils.errors import InfeasibleInstanceError, UsageError

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1


class Compressor(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: str
    capacity: float = Field(ge=0)  # flow units per interval
    energy_per_interval: float = Field(ge=0)  # kWh when on for one interval

    @property
    def energy_per_capacity(self) -> float:
        return self.energy_per_interval / self.capacity if self.capacity > 0 else float("inf")


class DrLoad(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: str
    curtailable_kwh: float = Field(ge=0)
    max_activations: int = Field(ge=0)
    # compression demand relieved per activation, in flow units; defaults to curtailable_kwh
    flow_relief: float = Field(ge=0)

    @model_validator(mode="before")
    @classmethod
    def relief_from_curtailment(cls, data):
        if isinstance(data, dict) and data.get("flow_relief") is None:
            data = {**data, "flow_relief": data.get("curtailable_kwh")}
        return data


class SchedulingInstance(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    horizon: int = Field(ge=1)
    interval_hours: float = Field(default=1.0, gt=0)
    compressors: List[Compressor]
    dr_loads: List[DrLoad] = Field(default_factory=list)
    price: np.ndarray
    demand: np.ndarray
    carbon: CarbonIntensitySeries

    @field_validator("price", "demand", mode="before")
    @classmethod
    def nonnegative_series(cls, value):
        arr = np.array(value, dtype=float).reshape(-1)
        if not np.all(np.isfinite(arr)) or np.any(arr < 0):
            raise ValueError("Price and demand series must be finite and nonnegative")
        arr.setflags(write=False)
        return arr

    @field_serializer("price", "demand")
    def series_to_list(self, value: np.ndarray) -> list:
        return [float(v) for v in value]

    @field_serializer("carbon")
    def carbon_to_dict(self, value: CarbonIntensitySeries) -> dict:
        return {
            "values": [float(v) for v in value.values],
            "interval_hours": value.interval_hours,
            "start_index": value.start_index,
        }

    @model_validator(mode="after")
    def check_lengths(self):
        if not self.compressors:
            raise ValueError("An instance needs at least one compressor")
        for name, series in (("price", self.price), ("demand", self.demand),
                             ("carbon", self.carbon.values)):
            if series.shape[0] != self.horizon:
                raise ValueError(f"{name} series has {series.shape[0]} intervals, horizon is {self.horizon}")
        return self

    @property
    def n_compressors(self) -> int:
        return len(self.compressors)

    @property
    def n_dr(self) -> int:
        return len(self.dr_loads)

    @property
    def n_bits(self) -> int:
        return (self.n_compressors + self.n_dr) * self.horizon

    @property
    def capacities(self) -> np.ndarray:
        return np.array([c.capacity for c in self.compressors])

    @property
    def energies(self) -> np.ndarray:
        return np.array([c.energy_per_interval for c in self.compressors])

    @property
    def reliefs(self) -> np.ndarray:
        return np.array([d.flow_relief for d in self.dr_loads])

    @property
    def curtailments(self) -> np.ndarray:
        return np.array([d.curtailable_kwh for d in self.dr_loads])

    @property
    def budgets(self) -> np.ndarray:
        return np.array([d.max_activations for d in self.dr_loads], dtype=int)

    def shortfall_intervals(self) -> List[int]:
        total = self.capacities.sum()
        return [int(t) for t in np.flatnonzero(total < self.demand)]

    def check_feasible(self) -> None:
        short = self.shortfall_intervals()
        if short:
            raise InfeasibleInstanceError(short)


class PenaltyWeights(BaseModel):
    model_config = ConfigDict(frozen=True)

    w_carbon: float = Field(default=0.0, ge=0)  # cost per gCO2
    w_pressure: float = Field(default=0.0, ge=0)  # cost per squared flow-unit deviation
    w_comfort: float = Field(default=0.0, ge=0)  # cost per squared activation excess


class ScheduleDecision(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    compressor_on: np.ndarray
    dr_active: np.ndarray

    @field_validator("compressor_on", "dr_active", mode="before")
    @classmethod
    def boolean_matrix(cls, value):
        arr = np.array(value, dtype=bool)
        if arr.ndim != 2:
            raise ValueError(f"Decision matrices must be 2-D, got shape {arr.shape}")
        arr.setflags(write=False)
        return arr

    @field_serializer("compressor_on", "dr_active")
    def matrix_to_list(self, value: np.ndarray) -> list:
        return value.astype(int).tolist()

    @classmethod
    def all_off(cls, instance: SchedulingInstance) -> "ScheduleDecision":
        return cls(
            compressor_on=np.zeros((instance.n_compressors, instance.horizon), dtype=bool),
            dr_active=np.zeros((instance.n_dr, instance.horizon), dtype=bool),
        )

    def check_shape(self, instance: SchedulingInstance) -> None:
        expected_c = (instance.n_compressors, instance.horizon)
        expected_d = (instance.n_dr, instance.horizon)
        if self.compressor_on.shape != expected_c or self.dr_active.shape != expected_d:
            raise UsageError(
                f"Decision shapes {self.compressor_on.shape}/{self.dr_active.shape} "
                f"do not match instance {expected_c}/{expected_d}"
            )


class ScheduleMetrics(BaseModel):
    model_config = ConfigDict(frozen=True)

    energy_cost: float
    carbon_g: float = Field(ge=0)
    violations: int = Field(ge=0)


def load_instance(path: Union[str, Path]) -> SchedulingInstance:
    """Read a versioned instance JSON file"""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise UsageError(f"{path}: malformed JSON ({e})") from e
    if not isinstance(data, dict):
        raise UsageError(f"{path}: expected a JSON object")
    version = data.pop("format_version", None)
    if version != FORMAT_VERSION:
        raise UsageError(f"{path}: unsupported format_version {version!r}, expected {FORMAT_VERSION}")
    instance = SchedulingInstance.model_validate(data)
    instance.check_feasible()
    logger.info(f"Loaded instance with {instance.n_bits} decision bits from {path}")
    return instance


def save_instance(instance: SchedulingInstance, path: Union[str, Path]) -> None:
    payload = {"format_version": FORMAT_VERSION, **instance.model_dump()}
    Path(path).write_text(json.dumps(payload, indent=2), encoding="utf-8")
