import logging

import numpy as np

from models.qubo import QuboMatrix, energy
from models.results import SolveResult
from models.schedule import ScheduleDecision, SchedulingInstance
from scheduling.encoding import encode
from utils.errors import InfeasibleInstanceError

logger = logging.getLogger(__name__)


def solve_greedy_schedule(instance: SchedulingInstance) -> ScheduleDecision:
    """
    Cost-only baseline: per interval, switch on compressors in ascending
    energy-cost-per-capacity order until demand is covered. Never uses DR.
    """
    instance.check_feasible()
    on = np.zeros((instance.n_compressors, instance.horizon), dtype=bool)
    for t in range(instance.horizon):
        demand = float(instance.demand[t])
        order = sorted(
            (k for k, c in enumerate(instance.compressors) if c.capacity > 0),
            key=lambda k: (instance.price[t] * instance.compressors[k].energy_per_capacity,
                           instance.compressors[k].energy_per_capacity, k),
        )
        supplied = 0.0
        for k in order:
            if supplied >= demand:
                break
            on[k, t] = True
            supplied += instance.compressors[k].capacity
        if supplied < demand:
            raise InfeasibleInstanceError([t])
    return ScheduleDecision(
        compressor_on=on,
        dr_active=np.zeros((instance.n_dr, instance.horizon), dtype=bool),
    )


def greedy_result(instance: SchedulingInstance, qubo: QuboMatrix) -> SolveResult:
    """Greedy decision scored on the QUBO; it costs exactly one objective evaluation"""
    bits = encode(solve_greedy_schedule(instance), instance)
    value = energy(qubo, bits)
    logger.info(f"greedy on n={qubo.n}: energy {value:.6g} after 1 evaluation")
    return SolveResult(
        solver="greedy",
        best_bits=[int(b) for b in bits],
        best_energy=value,
        trace=[(1, value)],
        evals=1,
        seed=0,
    )
