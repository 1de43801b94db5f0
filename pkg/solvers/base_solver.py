import logging
from abc import ABC, abstractmethod
from typing import List, Optional

import numpy as np

from models.qubo import QuboMatrix
from models.results import SolveResult, TracePoint


class TraceRecorder:
    """Accumulates objective evaluations and best-so-far state across restarts"""

    def __init__(self):
        self.evals = 0
        self.best_energy = float("inf")
        self.best_bits: Optional[np.ndarray] = None
        self.trace: List[TracePoint] = []

    def record(self, energy: float, bits: np.ndarray) -> None:
        """Count one evaluation of `bits` whose exact energy is `energy`"""
        self.evals += 1
        if energy < self.best_energy:
            self.best_energy = energy
            self.best_bits = bits.copy()
        self.trace.append((self.evals, self.best_energy))

    def result(self, solver: str, seed: int) -> SolveResult:
        return SolveResult(
            solver=solver,
            best_bits=[int(b) for b in self.best_bits],
            best_energy=self.best_energy,
            trace=self.trace,
            evals=self.evals,
            seed=seed,
        )


class BaseSolver(ABC):
    def __init__(self, name: str, seed: int):
        self.name = name
        self.seed = seed
        self.logger = logging.getLogger(f"{__name__}.{name}")

    @abstractmethod
    def solve(self, qubo: QuboMatrix) -> SolveResult:
        """Minimise the QUBO and return the best state with its convergence trace"""
        pass

    def log_result(self, qubo: QuboMatrix, result: SolveResult) -> None:
        self.logger.info(
            f"{self.name} on n={qubo.n}: best energy {result.best_energy:.6g} "
            f"after {result.evals} evaluations (seed {self.seed})"
        )
