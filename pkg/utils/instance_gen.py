"""
Seeded synthetic inputs for the scheduler and the carbon tools.

All constants are synthetic: the shapes are plausible (morning/evening demand
peaks, weekend dip, evening carbon peak) but not calibrated to a real network.
Every generator is a pure function of GenParams; each draws from its own
Philox stream so adding a generator never perturbs another one's output.
"""
import math
import logging
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from models.carbon import CarbonIntensitySeries, EnergySeries
from models.schedule import Compressor, DrLoad, SchedulingInstance
from utils.rng import MAX_SEED, make_rng

logger = logging.getLogger(__name__)

DEFAULT_SEED = 20240601

# stream ids passed to make_rng alongside the seed
DEMAND_STREAM, CARBON_STREAM, INSTANCE_STREAM, PANEL_STREAM = 1, 2, 3, 4


class GenParams(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    seed: int = Field(default=DEFAULT_SEED, ge=0, le=MAX_SEED)
    days: int = Field(default=60, ge=1)
    nodes: int = Field(default=50, ge=1)
    customers: int = Field(default=200, ge=1)
    intervals_per_day: int = Field(default=96, ge=1)
    compressors: int = Field(default=4, ge=1, le=16)
    dr_loads: int = Field(default=8, ge=0)
    horizon: int = Field(default=24, ge=1)

    node_flow: float = Field(default=2.0, gt=0)  # mean flow units per city-gate node
    demand_noise: float = Field(default=0.05, ge=0)  # std dev as a fraction of base flow
    carbon_low: float = Field(default=100.0, ge=0)
    carbon_high: float = Field(default=600.0, ge=0)
    carbon_noise: float = Field(default=30.0, ge=0)  # gCO2/kWh std dev
    kwh_per_flow: float = Field(default=1.0, gt=0)

    @model_validator(mode="after")
    def check_bounds(self):
        if self.carbon_low > self.carbon_high:
            raise ValueError("carbon_low must not exceed carbon_high")
        return self


def _hours(count: int, intervals_per_day: int) -> np.ndarray:
    """Hour of day at the start of each interval"""
    return (np.arange(count) % intervals_per_day) * (24.0 / intervals_per_day)


def demand_shape(hours: np.ndarray, day: np.ndarray) -> np.ndarray:
    """Deterministic relative profile: twin daily peaks (07:30, 19:30) and a weekend dip"""
    daily = 1.0 + 0.25 * np.cos(4 * np.pi * (hours - 7.5) / 24) + 0.1 * np.cos(2 * np.pi * (hours - 19.5) / 24)
    weekly = np.where(day % 7 >= 5, 0.85, 1.0)
    return daily * weekly


def gen_demand(params: GenParams, intervals_per_day: Optional[int] = None) -> np.ndarray:
    """Network compression demand in flow units, days * intervals_per_day values"""
    ipd = intervals_per_day or params.intervals_per_day
    count = params.days * ipd
    base = params.nodes * params.node_flow
    index = np.arange(count)
    series = base * demand_shape(_hours(count, ipd), index // ipd)
    if params.demand_noise > 0:
        rng = make_rng(params.seed, DEMAND_STREAM, ipd)
        series = series + params.demand_noise * base * rng.standard_normal(count)
    return np.maximum(series, 0.0)


def gen_carbon_intensity(params: GenParams, intervals_per_day: Optional[int] = None) -> CarbonIntensitySeries:
    """Diurnal gCO2/kWh between carbon_low and carbon_high, peaking in the evening"""
    ipd = intervals_per_day or params.intervals_per_day
    count = params.days * ipd
    mid = (params.carbon_low + params.carbon_high) / 2.0
    amplitude = (params.carbon_high - params.carbon_low) / 2.0
    values = mid + amplitude * np.cos(2 * np.pi * (_hours(count, ipd) - 19.0) / 24)
    if params.carbon_noise > 0:
        rng = make_rng(params.seed, CARBON_STREAM, ipd)
        values = values + params.carbon_noise * rng.standard_normal(count)
    values = np.clip(values, params.carbon_low, params.carbon_high)
    return CarbonIntensitySeries(values=values, interval_hours=24.0 / ipd)


def gen_price(count: int, intervals_per_day: int) -> np.ndarray:
    """Time-of-use tariff in cost/kWh, dearest around 18:00"""
    return 0.12 + 0.05 * np.cos(2 * np.pi * (_hours(count, intervals_per_day) - 18.0) / 24)


def fit_budgets(budgets: List[int], slots: np.ndarray) -> List[int]:
    """
    Lower DR budgets until every load can be active exactly its budget times
    with at most slots[t] loads active in interval t (Gale-Ryser condition).
    """
    budgets = list(budgets)

    def violated() -> bool:
        ordered = sorted(budgets, reverse=True)
        return any(sum(ordered[:m]) > int(np.minimum(slots, m).sum()) for m in range(1, len(ordered) + 1))

    while violated():
        largest = max(range(len(budgets)), key=lambda i: (budgets[i], -i))
        budgets[largest] -= 1
    return budgets


def gen_scheduling_instance(params: GenParams) -> SchedulingInstance:
    """
    Hourly scheduling instance over `horizon` intervals

    Flows are whole multiples of a quantum q. Compressor capacities form the
    ladder q, 2q, 4q, ... (shuffled) whose total is about 1.3x peak demand, so
    every quantized demand level is exactly reachable; each DR load relieves q.
    """
    rng = make_rng(params.seed, INSTANCE_STREAM)
    hourly = GenParams(**{**params.model_dump(), "days": math.ceil(params.horizon / 24)})
    raw = gen_demand(hourly, intervals_per_day=24)[: params.horizon]
    peak = max(float(raw.max()), 1.0)

    ladder_total = 2**params.compressors - 1
    quantum = float(math.ceil(1.3 * peak / ladder_total))
    levels = np.ceil(raw / quantum)
    demand = quantum * levels

    rungs = rng.permutation(params.compressors)
    compressors = []
    for k, rung in enumerate(rungs):
        capacity = quantum * 2 ** int(rung)
        efficiency = rng.uniform(0.9, 1.1)
        compressors.append(Compressor(
            id=f"C{k}",
            capacity=capacity,
            energy_per_interval=round(capacity * params.kwh_per_flow * efficiency, 6),
        ))

    drawn = [int(b) for b in rng.integers(1, max(2, params.horizon // 4 + 1), size=params.dr_loads)]
    slots = np.minimum(levels.astype(int), params.dr_loads)
    budgets = fit_budgets(drawn, slots)
    dr_loads = [
        DrLoad(
            id=f"DR{d}",
            curtailable_kwh=round(quantum * params.kwh_per_flow * rng.uniform(0.5, 1.0), 6),
            max_activations=budgets[d],
            flow_relief=quantum,
        )
        for d in range(params.dr_loads)
    ]

    carbon = gen_carbon_intensity(hourly, intervals_per_day=24)
    instance = SchedulingInstance(
        horizon=params.horizon,
        interval_hours=1.0,
        compressors=compressors,
        dr_loads=dr_loads,
        price=gen_price(params.horizon, 24),
        demand=demand,
        carbon=CarbonIntensitySeries(values=carbon.values[: params.horizon], interval_hours=1.0),
    )
    logger.info(
        f"Generated instance seed={params.seed}: {params.compressors} compressors, "
        f"{params.dr_loads} DR loads, {params.horizon} intervals, quantum {quantum:g}"
    )
    return instance


def gen_consumption_panel(params: GenParams) -> List[EnergySeries]:
    """Per-customer kWh series at intervals_per_day resolution"""
    ipd = params.intervals_per_day
    count = params.days * ipd
    shape = demand_shape(_hours(count, ipd), np.arange(count) // ipd)
    shape = shape / shape.mean()
    interval_hours = 24.0 / ipd
    panel = []
    for customer in range(params.customers):
        rng = make_rng(params.seed, PANEL_STREAM, customer)
        # mean household draw between 0.4 and 1.6 kW
        mean_kwh = rng.uniform(0.4, 1.6) * interval_hours
        noise = 1.0 + 0.1 * rng.standard_normal(count)
        panel.append(EnergySeries(values=np.maximum(mean_kwh * shape * noise, 0.0),
                                  interval_hours=interval_hours))
    return panel
