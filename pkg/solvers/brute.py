import logging
from typing import Tuple

import numpy as np

from models.qubo import QuboMatrix, all_bit_vectors, energies_of
from models.results import SolveResult
from solvers.base_solver import BaseSolver
from utils.errors import RefusalError

logger = logging.getLogger(__name__)

MAX_BITS = 24
# enumerate in blocks of 2^CHUNK_BITS states to bound memory
CHUNK_BITS = 16


def brute_force(qubo: QuboMatrix) -> Tuple[np.ndarray, float]:
    """
    Exhaustive minimum over {0,1}^n

    Ties go to the smallest integer encoding (bit 0 least significant).
    """
    n = qubo.n
    if n > MAX_BITS:
        raise RefusalError(f"Brute force refuses n={n} > {MAX_BITS} (2^{n} states)")
    low_bits = min(n, CHUNK_BITS)
    block = all_bit_vectors(low_bits)
    best_code, best_energy = 0, float("inf")
    for high in range(2 ** (n - low_bits)):
        high_bits = ((high >> np.arange(n - low_bits)) & 1).astype(np.int8)
        rows = np.hstack([block, np.broadcast_to(high_bits, (block.shape[0], n - low_bits))])
        values = energies_of(qubo, rows)
        k = int(np.argmin(values))
        # argmin returns the first minimum, and blocks are visited in increasing code order
        if values[k] < best_energy:
            best_energy = float(values[k])
            best_code = (high << low_bits) | k
    bits = ((best_code >> np.arange(n)) & 1).astype(np.int8)
    logger.debug(f"Brute force over 2^{n} states: optimum {best_energy:.6g}")
    return bits, best_energy


class BruteForceSolver(BaseSolver):
    def __init__(self, seed: int = 0):
        super().__init__(name="brute", seed=seed)

    def solve(self, qubo: QuboMatrix) -> SolveResult:
        bits, best = brute_force(qubo)
        evals = 2**qubo.n
        result = SolveResult(
            solver=self.name,
            best_bits=[int(b) for b in bits],
            best_energy=best,
            trace=[(evals, best)],
            evals=evals,
            seed=self.seed,
        )
        self.log_result(qubo, result)
        return result
