import math
import logging
from datetime import date, timedelta
from typing import Dict, List, Tuple

import numpy as np

from models.carbon import CarbonIntensitySeries, EmissionSeries, EnergySeries
from models.schedule import ScheduleDecision, SchedulingInstance
from utils.errors import UsageError

logger = logging.getLogger(__name__)

BUCKETS = ("daily", "monthly", "annual", "total")
DEFAULT_EPOCH = date(2024, 1, 1)


def attribute(energy: EnergySeries, intensity: CarbonIntensitySeries) -> EmissionSeries:
    """Per-interval emissions: kWh times the contemporaneous gCO2/kWh, no rounding"""
    if not energy.same_grid(intensity):
        raise UsageError(
            f"Energy series ({len(energy)} x {energy.interval_hours} h from {energy.start_index}) "
            f"does not line up with carbon series ({len(intensity)} x {intensity.interval_hours} h "
            f"from {intensity.start_index})"
        )
    return EmissionSeries(
        values=energy.values * intensity.values,
        interval_hours=energy.interval_hours,
        start_index=energy.start_index,
    )


def _day_numbers(series: EmissionSeries) -> np.ndarray:
    hours = (series.start_index + np.arange(len(series))) * series.interval_hours
    # tolerate round-off for interval lengths that are not exact in binary
    return np.floor(hours / 24.0 + 1e-9).astype(int)


def aggregate(emissions: EmissionSeries, bucket: str, epoch: date = DEFAULT_EPOCH) -> List[Tuple[str, float]]:
    """
    Sum emissions into calendar buckets

    Args:
        emissions: per-interval gCO2
        bucket: one of daily, monthly, annual, total
        epoch: calendar date of interval index 0 (monthly and annual labels)

    Returns:
        (label, gCO2) pairs in time order
    """
    if bucket not in BUCKETS:
        raise UsageError(f"Unknown bucket {bucket!r}; choose from {', '.join(BUCKETS)}")
    if bucket == "total":
        return [("total", math.fsum(emissions.values))]

    labels = []
    for day in _day_numbers(emissions):
        if bucket == "daily":
            labels.append(f"day {day}")
        else:
            when = epoch + timedelta(days=int(day))
            labels.append(f"{when.year:04d}-{when.month:02d}" if bucket == "monthly" else f"{when.year:04d}")

    groups: Dict[str, List[float]] = {}
    for label, value in zip(labels, emissions.values):
        groups.setdefault(label, []).append(float(value))
    return [(label, math.fsum(values)) for label, values in groups.items()]


def total(emissions: EmissionSeries) -> float:
    return aggregate(emissions, "total")[0][1]


def schedule_energy(decision: ScheduleDecision, instance: SchedulingInstance) -> EnergySeries:
    """kWh drawn per interval: compressor energy net of DR curtailment, floored at zero"""
    decision.check_shape(instance)
    compression = instance.energies @ decision.compressor_on.astype(float)
    curtailed = instance.curtailments @ decision.dr_active.astype(float)
    return EnergySeries(
        values=np.maximum(compression - curtailed, 0.0),
        interval_hours=instance.carbon.interval_hours,
        start_index=instance.carbon.start_index,
    )


def policy_carbon(decision: ScheduleDecision, instance: SchedulingInstance) -> float:
    """Total gCO2 implied by a schedule"""
    return total(attribute(schedule_energy(decision, instance), instance.carbon))


def attribute_panel(panel: List[EnergySeries], intensity: CarbonIntensitySeries) -> List[EmissionSeries]:
    """Attribute every customer series of a panel against one intensity series"""
    return [attribute(series, intensity) for series in panel]


def panel_totals(panel: List[EnergySeries], intensity: CarbonIntensitySeries) -> List[float]:
    totals = [total(em) for em in attribute_panel(panel, intensity)]
    logger.info(f"Attributed {len(totals)} customers: {math.fsum(totals):.1f} gCO2 in total")
    return totals
