import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator


class IntervalSeries(BaseModel):
    """Nonnegative per-interval values anchored at an absolute interval index"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    values: np.ndarray
    interval_hours: float = Field(default=0.25, gt=0)
    start_index: int = Field(default=0, ge=0)

    @field_validator("values", mode="before")
    @classmethod
    def nonnegative_finite(cls, value):
        arr = np.array(value, dtype=float).reshape(-1)
        if not np.all(np.isfinite(arr)):
            raise ValueError("Series values must be finite")
        if np.any(arr < 0):
            raise ValueError("Series values must be nonnegative")
        arr.setflags(write=False)
        return arr

    def __len__(self) -> int:
        return self.values.shape[0]

    def same_grid(self, other: "IntervalSeries") -> bool:
        return (
            len(self) == len(other)
            and self.interval_hours == other.interval_hours
            and self.start_index == other.start_index
        )


class CarbonIntensitySeries(IntervalSeries):
    """Grid carbon intensity in gCO2/kWh"""


class EnergySeries(IntervalSeries):
    """Consumption in kWh per interval"""


class EmissionSeries(IntervalSeries):
    """Attributed emissions in gCO2 per interval"""
