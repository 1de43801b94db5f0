from typing import List, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

TracePoint = Tuple[int, float]


class SolveResult(BaseModel):
    """Outcome of one solver run; the trace holds (cumulative evaluations, best-so-far energy)"""

    model_config = ConfigDict(frozen=True)

    solver: str
    best_bits: List[int]
    best_energy: float
    trace: List[TracePoint] = Field(min_length=1)
    evals: int = Field(ge=1)
    seed: int

    @model_validator(mode="after")
    def check_trace(self):
        previous_evals, previous_best = 0, float("inf")
        for evals, best in self.trace:
            if evals <= previous_evals:
                raise ValueError("Trace evaluation counts must be strictly increasing")
            if best > previous_best:
                raise ValueError("Trace best-so-far energies must be nonincreasing")
            previous_evals, previous_best = evals, best
        if self.trace[-1][1] != self.best_energy:
            raise ValueError("best_energy must equal the final trace entry")
        if self.trace[-1][0] != self.evals:
            raise ValueError("evals must equal the final trace evaluation count")
        return self

    @property
    def n(self) -> int:
        return len(self.best_bits)
