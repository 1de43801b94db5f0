import math
import logging
from typing import Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict

from models.qubo import QuboMatrix, as_bits
from models.schedule import PenaltyWeights, ScheduleDecision, SchedulingInstance
from utils.errors import UsageError

logger = logging.getLogger(__name__)

KINDS = ("compressor", "dr")
# penalty weights are this many times the widest possible swing of the linear objective
PENALTY_MARGIN = 10.0


def bit_index(kind: str, unit: int, t: int, instance: SchedulingInstance) -> int:
    """Compressor bits first (unit-major, then interval), DR bits after them"""
    if kind not in KINDS:
        raise UsageError(f"Unknown decision kind {kind!r}; expected one of {KINDS}")
    units = instance.n_compressors if kind == "compressor" else instance.n_dr
    if not 0 <= unit < units:
        raise UsageError(f"{kind} unit {unit} out of range [0, {units})")
    if not 0 <= t < instance.horizon:
        raise UsageError(f"Interval {t} out of range [0, {instance.horizon})")
    base = 0 if kind == "compressor" else instance.n_compressors * instance.horizon
    return base + unit * instance.horizon + t


def decode(s: Sequence[int], instance: SchedulingInstance) -> ScheduleDecision:
    """Inverse of bit_index: split a bit vector into compressor and DR matrices"""
    bits = as_bits(s, instance.n_bits).astype(bool)
    split = instance.n_compressors * instance.horizon
    return ScheduleDecision(
        compressor_on=bits[:split].reshape(instance.n_compressors, instance.horizon),
        dr_active=bits[split:].reshape(instance.n_dr, instance.horizon),
    )


def encode(decision: ScheduleDecision, instance: SchedulingInstance) -> np.ndarray:
    decision.check_shape(instance)
    return np.concatenate([decision.compressor_on.ravel(), decision.dr_active.ravel()]).astype(np.int8)


def linear_costs(instance: SchedulingInstance, w_carbon: float) -> np.ndarray:
    """Per-bit energy cost plus weighted carbon cost; DR bits carry none"""
    per_kwh = instance.price + w_carbon * instance.carbon.values
    compressor_part = np.outer(instance.energies, per_kwh).ravel()
    return np.concatenate([compressor_part, np.zeros(instance.n_dr * instance.horizon)])


def build_qubo(instance: SchedulingInstance, weights: PenaltyWeights) -> QuboMatrix:
    """
    Encode energy cost, carbon cost, pressure safety and DR comfort as one QUBO

    Squared penalties are expanded with s^2 = s; their constants go to the offset,
    so energy(Q, s) is the schedule's total cost.
    """
    instance.check_feasible()
    n = instance.n_bits
    q = np.zeros((n, n))
    q[np.diag_indices(n)] += linear_costs(instance, weights.w_carbon)
    offset = 0.0

    caps, reliefs = instance.capacities, instance.reliefs
    for t in range(instance.horizon):
        idx = [bit_index("compressor", k, t, instance) for k in range(instance.n_compressors)]
        idx += [bit_index("dr", d, t, instance) for d in range(instance.n_dr)]
        flows = np.concatenate([caps, reliefs])
        demand = float(instance.demand[t])
        # w * (sum a_i s_i - D)^2 = w * (sum_ij a_i a_j s_i s_j - 2 D sum a_i s_i + D^2)
        q[np.ix_(idx, idx)] += weights.w_pressure * np.outer(flows, flows)
        q[idx, idx] -= weights.w_pressure * 2.0 * demand * flows
        offset += weights.w_pressure * demand**2

    for d, budget in enumerate(instance.budgets):
        idx = [bit_index("dr", d, t, instance) for t in range(instance.horizon)]
        q[np.ix_(idx, idx)] += weights.w_comfort
        q[idx, idx] -= weights.w_comfort * 2.0 * budget
        offset += weights.w_comfort * float(budget) ** 2

    logger.debug(f"Built {n}-bit scheduling QUBO with offset {offset:.6g}")
    return QuboMatrix(coefficients=q, offset=offset)


def flow_quantum(instance: SchedulingInstance) -> float:
    """Smallest nonzero flow mismatch a schedule can produce"""
    flows = np.concatenate([instance.capacities, instance.reliefs, instance.demand])
    flows = flows[flows > 0]
    if flows.size == 0:
        return 1.0
    rounded = np.round(flows)
    if np.all(np.abs(flows - rounded) < 1e-9):
        return float(math.gcd(*[int(v) for v in rounded]))
    logger.warning("Flow quantities are not integral; penalty calibration is approximate")
    return float(flows.min())


def calibrate_penalties(instance: SchedulingInstance, w_carbon: float = 0.0) -> PenaltyWeights:
    """Make any penalised deviation cost more than the full swing of the linear objective"""
    instance.check_feasible()
    objective_range = float(np.abs(linear_costs(instance, w_carbon)).sum())
    if objective_range == 0.0:
        objective_range = 1.0
    quantum = flow_quantum(instance)
    weights = PenaltyWeights(
        w_carbon=w_carbon,
        w_pressure=PENALTY_MARGIN * objective_range / quantum**2,
        w_comfort=PENALTY_MARGIN * objective_range,
    )
    logger.info(
        f"Calibrated penalties: w_pressure={weights.w_pressure:.6g} (flow quantum {quantum:g}), "
        f"w_comfort={weights.w_comfort:.6g}"
    )
    return weights


class ObjectiveBreakdown(BaseModel):
    model_config = ConfigDict(frozen=True)

    energy_cost: float
    carbon_cost: float
    pressure_penalty: float
    comfort_penalty: float

    @property
    def total(self) -> float:
        return self.energy_cost + self.carbon_cost + self.pressure_penalty + self.comfort_penalty


def objective_breakdown(decision: ScheduleDecision, instance: SchedulingInstance,
                        weights: PenaltyWeights) -> ObjectiveBreakdown:
    """
    The four QUBO terms evaluated directly from a decision

    carbon_cost covers compressor energy only, since DR bits carry no linear cost.
    evaluate().carbon_g also credits curtailed DR energy, so energy(Q, s) agrees
    with this breakdown and not with the policy carbon.
    """
    decision.check_shape(instance)
    on = decision.compressor_on.astype(float)
    active = decision.dr_active.astype(float)
    compression_kwh = instance.energies @ on
    supply = instance.capacities @ on + instance.reliefs @ active
    excess = active.sum(axis=1) - instance.budgets
    return ObjectiveBreakdown(
        energy_cost=float(instance.price @ compression_kwh),
        carbon_cost=float(weights.w_carbon * (instance.carbon.values @ compression_kwh)),
        pressure_penalty=float(weights.w_pressure * np.sum((supply - instance.demand) ** 2)),
        comfort_penalty=float(weights.w_comfort * np.sum(excess**2)),
    )
