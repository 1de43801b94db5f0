import math
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from models.qubo import QuboMatrix, energy, flip_delta
from models.results import SolveResult
from solvers.base_solver import BaseSolver, TraceRecorder
from utils.rng import MAX_SEED, make_rng


class SaConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    # None means 2 * max|Q_ij| of the problem being solved
    initial_temperature: Optional[float] = Field(default=None, gt=0)
    cooling_ratio: float = Field(default=0.995, gt=0, lt=1)
    sweeps: int = Field(default=200, ge=1)
    seed: int = Field(default=0, ge=0, le=MAX_SEED)
    restarts: int = Field(default=1, ge=1)

    def start_temperature(self, qubo: QuboMatrix) -> float:
        if self.initial_temperature is not None:
            return self.initial_temperature
        scale = qubo.max_abs
        return 2.0 * scale if scale > 0 else 1.0


def metropolis_accept(delta: float, temperature: float, rng: np.random.Generator) -> bool:
    """Accept downhill moves always, uphill ones with probability exp(-delta/T)"""
    if delta <= 0:
        return True
    return bool(rng.random() < math.exp(-delta / temperature))


def anneal(qubo: QuboMatrix, cfg: SaConfig, restart: int, recorder: TraceRecorder) -> List[float]:
    """
    Run one annealing chain, recording every candidate evaluation

    Returns:
        Energy of the current state after each accepted move
    """
    rng = make_rng(cfg.seed, restart)
    coefficients = qubo.coefficients
    n = qubo.n
    bits = rng.integers(0, 2, size=n).astype(np.int8)
    current = energy(qubo, bits)
    temperature = cfg.start_temperature(qubo)
    accepted = []

    for _ in range(cfg.sweeps):
        for i in rng.permutation(n):
            delta = flip_delta(coefficients, bits, i)
            candidate = current + delta
            if candidate < recorder.best_energy:
                flipped = bits.copy()
                flipped[i] ^= 1
                recorder.record(energy(qubo, flipped), flipped)
            else:
                recorder.record(candidate, bits)
            if metropolis_accept(delta, temperature, rng):
                bits[i] ^= 1
                current = candidate
                accepted.append(current)
        # drift guard for the incrementally tracked energy
        current = energy(qubo, bits)
        temperature *= cfg.cooling_ratio
    return accepted


def solve_sa(qubo: QuboMatrix, cfg: SaConfig) -> SolveResult:
    return SimulatedAnnealingSolver(cfg).solve(qubo)


class SimulatedAnnealingSolver(BaseSolver):
    def __init__(self, config: SaConfig):
        super().__init__(name="sa", seed=config.seed)
        self.config = config

    def solve(self, qubo: QuboMatrix) -> SolveResult:
        recorder = TraceRecorder()
        for restart in range(self.config.restarts):
            accepted = anneal(qubo, self.config, restart, recorder)
            self.logger.debug(
                f"Restart {restart}: {len(accepted)} moves accepted, best so far {recorder.best_energy:.6g}"
            )
        result = recorder.result(self.name, self.config.seed)
        self.log_result(qubo, result)
        return result
