import numpy as np

from models.schedule import ScheduleDecision, ScheduleMetrics, SchedulingInstance
from utils.carbon import policy_carbon

# relative slack when comparing supplied flow against demand
FLOW_TOLERANCE = 1e-9


def supplied_flow(decision: ScheduleDecision, instance: SchedulingInstance) -> np.ndarray:
    """On-capacity plus DR relief per interval"""
    return (instance.capacities @ decision.compressor_on.astype(float)
            + instance.reliefs @ decision.dr_active.astype(float))


def count_violations(decision: ScheduleDecision, instance: SchedulingInstance) -> int:
    """Intervals with unmet demand plus DR loads activated beyond their budget"""
    decision.check_shape(instance)
    supply = supplied_flow(decision, instance)
    slack = FLOW_TOLERANCE * np.maximum(instance.demand, 1.0)
    unmet = int(np.sum(supply < instance.demand - slack))
    over_budget = int(np.sum(decision.dr_active.sum(axis=1) > instance.budgets))
    return unmet + over_budget


def evaluate(decision: ScheduleDecision, instance: SchedulingInstance) -> ScheduleMetrics:
    decision.check_shape(instance)
    compression_kwh = instance.energies @ decision.compressor_on.astype(float)
    return ScheduleMetrics(
        energy_cost=float(instance.price @ compression_kwh),
        carbon_g=policy_carbon(decision, instance),
        violations=count_violations(decision, instance),
    )
