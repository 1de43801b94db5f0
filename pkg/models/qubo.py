import json
import logging
from pathlib import Path
from typing import Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from utils.errors import UsageError

logger = logging.getLogger(__name__)

BitsLike = Union[Sequence[int], np.ndarray]


def _frozen_array(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


class QuboMatrix(BaseModel):
    """Dense symmetric QUBO: minimise s^T Q s + offset over s in {0,1}^n"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    coefficients: np.ndarray
    offset: float = 0.0

    @field_validator("coefficients", mode="before")
    @classmethod
    def symmetrize(cls, value):
        q = np.array(value, dtype=float)
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise UsageError(f"QUBO matrix must be square, got shape {q.shape}")
        if q.shape[0] < 1:
            raise UsageError("QUBO matrix must have at least one variable")
        if not np.all(np.isfinite(q)):
            raise UsageError("QUBO coefficients must be finite")
        return _frozen_array((q + q.T) / 2.0)

    @field_validator("offset")
    @classmethod
    def finite_offset(cls, value: float) -> float:
        if not np.isfinite(value):
            raise UsageError("QUBO offset must be finite")
        return float(value)

    @property
    def n(self) -> int:
        return self.coefficients.shape[0]

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.coefficients)))

    @classmethod
    def from_entries(cls, n: int, entries, offset: float = 0.0) -> "QuboMatrix":
        """Build from (i, j, value) triples with i <= j; repeated pairs accumulate"""
        if n < 1:
            raise UsageError(f"n must be >= 1, got {n}")
        q = np.zeros((n, n))
        for entry in entries:
            if len(entry) != 3:
                raise UsageError(f"QUBO entry must be [i, j, value], got {entry}")
            i, j, value = int(entry[0]), int(entry[1]), float(entry[2])
            if not (0 <= i <= j < n):
                raise UsageError(f"QUBO entry ({i}, {j}) must satisfy 0 <= i <= j < {n}")
            q[i, j] += value
        return cls(coefficients=q, offset=offset)

    def to_entries(self) -> list:
        """Upper-triangular (i, j, value) triples equivalent to this matrix"""
        q = self.coefficients
        entries = []
        for i in range(self.n):
            if q[i, i] != 0.0:
                entries.append([i, i, float(q[i, i])])
            for j in range(i + 1, self.n):
                if q[i, j] != 0.0:
                    entries.append([i, j, float(2.0 * q[i, j])])
        return entries


class IsingForm(BaseModel):
    """sigma^T J sigma + h^T sigma + offset over sigma in {-1,+1}^n"""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    couplings: np.ndarray
    fields: np.ndarray
    offset: float = 0.0

    @model_validator(mode="after")
    def check_shapes(self):
        if self.couplings.shape != (self.fields.shape[0],) * 2:
            raise UsageError("Ising couplings and fields disagree on dimension")
        if np.any(np.diag(self.couplings) != 0.0):
            raise UsageError("Ising couplings must have a zero diagonal")
        return self

    @property
    def n(self) -> int:
        return self.fields.shape[0]

    def energy(self, spins: BitsLike) -> float:
        sigma = np.asarray(spins, dtype=float)
        if sigma.shape != (self.n,):
            raise UsageError(f"Spin vector has length {sigma.shape}, expected {self.n}")
        return float(sigma @ self.couplings @ sigma + self.fields @ sigma + self.offset)


def as_bits(s: BitsLike, n: int) -> np.ndarray:
    """Validate a binary vector against a problem dimension"""
    bits = np.asarray(s)
    if bits.shape != (n,):
        raise UsageError(f"Binary vector has shape {bits.shape}, expected ({n},)")
    if not np.all((bits == 0) | (bits == 1)):
        raise UsageError("Binary vector entries must be 0 or 1")
    return bits.astype(np.int8)


def energy(q: QuboMatrix, s: BitsLike) -> float:
    """s^T Q s (+ offset) using the symmetrized coefficients"""
    bits = as_bits(s, q.n).astype(float)
    return float(bits @ q.coefficients @ bits) + q.offset


def delta_energy(q: QuboMatrix, s: BitsLike, i: int) -> float:
    """Energy change from flipping bit i, in O(n)"""
    bits = as_bits(s, q.n)
    if not 0 <= i < q.n:
        raise UsageError(f"Bit index {i} out of range for n={q.n}")
    return flip_delta(q.coefficients, bits, i)


def flip_delta(coefficients: np.ndarray, bits: np.ndarray, i: int) -> float:
    """Unchecked flip delta for hot loops; coefficients must be symmetric"""
    row = coefficients[i]
    direction = 1 - 2 * int(bits[i])
    coupling = float(row @ bits) - row[i] * bits[i]
    return direction * (row[i] + 2.0 * coupling)


def to_ising(q: QuboMatrix) -> IsingForm:
    """Change of variables s = (sigma + 1) / 2"""
    coefficients = q.coefficients
    couplings = coefficients / 4.0
    np.fill_diagonal(couplings, 0.0)
    fields = coefficients.sum(axis=1) / 2.0
    offset = coefficients.sum() / 4.0 + np.trace(coefficients) / 4.0 + q.offset
    return IsingForm(
        couplings=_frozen_array(couplings),
        fields=_frozen_array(fields),
        offset=float(offset),
    )


def all_bit_vectors(n: int) -> np.ndarray:
    """Every vector of {0,1}^n as rows, row k encoding integer k (bit 0 least significant)"""
    codes = np.arange(2**n, dtype=np.int64)
    return ((codes[:, None] >> np.arange(n)) & 1).astype(np.int8)


def energies_of(q: QuboMatrix, rows: np.ndarray) -> np.ndarray:
    """Vectorised energy for a stack of binary row vectors"""
    x = rows.astype(float)
    return np.einsum("ki,ij,kj->k", x, q.coefficients, x) + q.offset


def load_qubo(path: Union[str, Path]) -> QuboMatrix:
    """Read the {"n": int, "entries": [[i, j, value], ...]} format"""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise UsageError(f"{path}: malformed JSON ({e})") from e
    if not isinstance(data, dict) or "n" not in data or "entries" not in data:
        raise UsageError(f"{path}: expected an object with 'n' and 'entries'")
    qubo = QuboMatrix.from_entries(int(data["n"]), data["entries"], offset=float(data.get("offset", 0.0)))
    logger.info(f"Loaded {qubo.n}-variable QUBO from {path}")
    return qubo


def save_qubo(qubo: QuboMatrix, path: Union[str, Path]) -> None:
    payload = {"n": qubo.n, "entries": qubo.to_entries()}
    if qubo.offset:
        payload["offset"] = qubo.offset
    Path(path).write_text(json.dumps(payload, indent=2), encoding="utf-8")
