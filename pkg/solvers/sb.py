from dataclasses import dataclass
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from models.qubo import IsingForm, QuboMatrix, energy, to_ising
from models.results import SolveResult
from solvers.base_solver import BaseSolver, TraceRecorder
from utils.errors import InstabilityError, UsageError
from utils.rng import MAX_SEED, make_rng


class SbConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    i_max: int = Field(default=100, ge=1)
    steps_per_iter: int = Field(default=50, ge=1)
    dt: float = Field(default=0.05, gt=0)
    c: float = Field(default=0.5, ge=0)
    restarts: int = Field(default=1, ge=1)
    seed: int = Field(default=0, ge=0, le=MAX_SEED)
    x_init_scale: float = Field(default=0.1, gt=0)
    blow_up_bound: float = Field(default=10.0, gt=1)
    # "adiabatic" keeps the Kerr term -x^3; "ballistic" drops it and holds |x| <= 1 with inelastic walls.
    variant: Literal["adiabatic", "ballistic"] = "adiabatic"
    # Divide Q by max|Q_ij| before building forces; energies are always reported unscaled.
    normalize: bool = True
    # Extra factor on the normalized force field.
    coupling_scale: float = Field(default=1.0, gt=0)

    @property
    def total_time(self) -> float:
        return self.i_max * self.steps_per_iter * self.dt


@dataclass(frozen=True)
class OscillatorState:
    x: np.ndarray
    v: np.ndarray
    t: float = 0.0
    step: int = 0


def pump(t: float, t_total: float) -> float:
    """Pump amplitude a(t) rising linearly from 0 at t=0 to 1 at t_total"""
    if t_total <= 0:
        raise UsageError(f"t_total must be positive, got {t_total}")
    if not 0 <= t <= t_total:
        raise UsageError(f"t={t} outside [0, {t_total}]")
    return t / t_total


def _advance(x: np.ndarray, v: np.ndarray, a: float, couplings2: np.ndarray,
             fields: np.ndarray, c: float, dt: float, ballistic: bool = False):
    # Symplectic Euler: velocity first, then position with the new velocity.
    force = (a - 1.0) * x
    if not ballistic:
        force = force - x * x * x
    force = force - c * (couplings2 @ x + fields)
    v = v + dt * force
    x = x + dt * v
    if ballistic:
        walls = np.abs(x) > 1.0
        if np.any(walls):
            x = np.where(walls, np.sign(x), x)
            v = np.where(walls, 0.0, v)
    return x, v


def _check_bounds(x: np.ndarray, bound: float, step: int) -> None:
    escaped = np.abs(x) > bound
    if np.any(escaped) or not np.all(np.isfinite(x)):
        index = int(np.argmax(np.where(np.isfinite(x), np.abs(x), np.inf)))
        raise InstabilityError(index=index, step=step, value=float(x[index]))


def sb_step(state: OscillatorState, ising: IsingForm, a: float, cfg: SbConfig) -> OscillatorState:
    """One integration step of the pumped oscillator network"""
    if state.x.shape != (ising.n,) or state.v.shape != (ising.n,):
        raise UsageError(f"State dimension {state.x.shape} does not match Ising n={ising.n}")
    if not 0.0 <= a <= 1.0:
        raise UsageError(f"Pump amplitude must lie in [0, 1], got {a}")
    x, v = _advance(state.x, state.v, a, 2.0 * ising.couplings, ising.fields, cfg.c, cfg.dt,
                    ballistic=cfg.variant == "ballistic")
    _check_bounds(x, cfg.blow_up_bound, state.step + 1)
    return OscillatorState(x=x, v=v, t=state.t + cfg.dt, step=state.step + 1)


def binarize(x) -> np.ndarray:
    """bit_i = 1 iff x_i > 0"""
    positions = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(positions)):
        raise UsageError("Cannot binarize non-finite oscillator positions")
    return (positions > 0).astype(np.int8)


def force_field(qubo: QuboMatrix, normalize: bool = True, coupling_scale: float = 1.0) -> IsingForm:
    """Ising form used to drive the oscillators.

    With normalize the matrix is first rescaled to max|Q_ij| = 1, then every
    coefficient is multiplied by coupling_scale.
    """
    divisor = qubo.max_abs if normalize else 1.0
    if divisor == 0.0:
        return to_ising(qubo)
    return to_ising(QuboMatrix(coefficients=qubo.coefficients * (coupling_scale / divisor)))


def initial_state(n: int, cfg: SbConfig, restart: int) -> OscillatorState:
    rng = make_rng(cfg.seed, restart)
    x = rng.uniform(-cfg.x_init_scale, cfg.x_init_scale, size=n)
    return OscillatorState(x=x, v=np.zeros(n))


def run_trajectory(qubo: QuboMatrix, ising: IsingForm, start: OscillatorState,
                   cfg: SbConfig, recorder: TraceRecorder) -> OscillatorState:
    """Integrate one restart, evaluating the binarized snapshot after every iteration"""
    couplings2 = 2.0 * ising.couplings
    total_steps = cfg.i_max * cfg.steps_per_iter
    t_total = cfg.total_time
    ballistic = cfg.variant == "ballistic"
    x, v, step = start.x, start.v, start.step
    for _ in range(cfg.i_max):
        for _ in range(cfg.steps_per_iter):
            a = pump(min(step * cfg.dt, t_total), t_total)
            x, v = _advance(x, v, a, couplings2, ising.fields, cfg.c, cfg.dt, ballistic)
            step += 1
            _check_bounds(x, cfg.blow_up_bound, step)
        bits = binarize(x)
        recorder.record(energy(qubo, bits), bits)
    return OscillatorState(x=x, v=v, t=step * cfg.dt, step=step)


def solve_sb(qubo: QuboMatrix, cfg: SbConfig) -> SolveResult:
    """Best binarized snapshot over all restarts and iterations"""
    return SimulatedBifurcationSolver(cfg).solve(qubo)


class SimulatedBifurcationSolver(BaseSolver):
    def __init__(self, config: SbConfig):
        super().__init__(name="sb", seed=config.seed)
        self.config = config

    def solve(self, qubo: QuboMatrix) -> SolveResult:
        cfg = self.config
        ising = force_field(qubo, cfg.normalize, cfg.coupling_scale)
        recorder = TraceRecorder()
        for restart in range(cfg.restarts):
            start = initial_state(qubo.n, cfg, restart)
            run_trajectory(qubo, ising, start, cfg, recorder)
            self.logger.debug(f"Restart {restart}: best so far {recorder.best_energy:.6g}")
        result = recorder.result(self.name, cfg.seed)
        self.log_result(qubo, result)
        return result
