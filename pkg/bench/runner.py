import hashlib
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field

from bench.metrics import (
    as_float, evals_to_within, finite_or_none, finite_values, median, median_iqr, percent_reduction,
)
from models.results import SolveResult, TracePoint
from scheduling.encoding import build_qubo, calibrate_penalties, decode
from scheduling.evaluation import evaluate
from scheduling.greedy import greedy_result
from solvers.brute import BruteForceSolver
from solvers.sa import SaConfig, SimulatedAnnealingSolver
from solvers.sb import SbConfig, SimulatedBifurcationSolver
from utils.errors import UsageError
from utils.instance_gen import GenParams, gen_scheduling_instance
from utils.rng import ALGORITHM

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
SOLVERS = ("greedy", "sa", "sb")


class SuiteConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    format_version: int = FORMAT_VERSION
    instances: List[GenParams] = Field(min_length=1)
    sb: SbConfig = Field(default_factory=SbConfig)
    sa: SaConfig = Field(default_factory=SaConfig)
    w_carbon: float = Field(default=1e-3, ge=0)
    brute_force_max_bits: int = Field(default=20, ge=0, le=24)
    tol: float = Field(default=0.01, gt=0)
    workers: int = Field(default=1, ge=1)

    @classmethod
    def from_seeds(cls, seeds: List[int], **params) -> "SuiteConfig":
        """Suite of identically shaped instances that differ only in seed"""
        suite_fields = {k: params.pop(k) for k in list(params) if k in cls.model_fields}
        return cls(instances=[GenParams(seed=s, **params) for s in seeds], **suite_fields)


def load_suite(path: Union[str, Path]) -> SuiteConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise UsageError(f"{path}: malformed JSON ({e})") from e
    suite = SuiteConfig.model_validate(data)
    if suite.format_version != FORMAT_VERSION:
        raise UsageError(f"{path}: unsupported format_version {suite.format_version}")
    return suite


def fingerprint(config: BaseModel, exclude: Optional[set] = None) -> str:
    return hashlib.sha256(config.model_dump_json(exclude=exclude).encode("utf-8")).hexdigest()[:16]


class SolverRun(BaseModel):
    best_energy: float
    evals: int
    evals_to_within: Optional[int]
    carbon_g: float
    violations: int
    trace: List[TracePoint]


class InstanceReport(BaseModel):
    seed: int
    n_bits: int
    best_known: Optional[float] = None
    best_known_source: str = "solvers"
    runs: Dict[str, SolverRun] = Field(default_factory=dict)
    errors: Dict[str, str] = Field(default_factory=dict)


class SolverSummary(BaseModel):
    median_evals_to_within: Optional[float]
    iqr_evals_to_within: Optional[float]
    reached: int
    median_best_energy: Optional[float]
    total_carbon_g: float
    median_carbon_reduction_vs_greedy: Optional[float]
    carbon_reduction_vs_greedy: Optional[float]
    violations: int


class BenchReport(BaseModel):
    format_version: int = FORMAT_VERSION
    rng_algorithm: str = ALGORITHM
    instance_seeds: List[int]
    fingerprints: Dict[str, str]
    instances: List[InstanceReport]
    summary: Dict[str, SolverSummary]
    carbon_reduction_sb_vs_sa: Optional[float]
    greedy_gap_percent: Optional[float]
    ablation_sb_vs_sa: Optional[float]


class BenchmarkRunner:
    def __init__(self, suite: SuiteConfig):
        self.suite = suite
        self.solvers = {
            "sa": SimulatedAnnealingSolver(suite.sa),
            "sb": SimulatedBifurcationSolver(suite.sb),
        }

    def run_instance(self, params: GenParams) -> InstanceReport:
        """Run every solver on one generated instance; a failing solver does not stop the others"""
        instance = gen_scheduling_instance(params)
        weights = calibrate_penalties(instance, self.suite.w_carbon)
        qubo = build_qubo(instance, weights)
        report = InstanceReport(seed=params.seed, n_bits=qubo.n)

        results: Dict[str, SolveResult] = {}
        for name in SOLVERS:
            logger.info(f"Instance {params.seed}: running {name}...")
            try:
                if name == "greedy":
                    results[name] = greedy_result(instance, qubo)
                else:
                    results[name] = self.solvers[name].solve(qubo)
            except Exception as e:
                logger.error(f"Instance {params.seed}: {name} failed: {e}")
                report.errors[name] = f"{type(e).__name__}: {e}"

        candidates = [r.best_energy for r in results.values()]
        if qubo.n <= self.suite.brute_force_max_bits:
            candidates.append(BruteForceSolver(params.seed).solve(qubo).best_energy)
            report.best_known_source = "brute"
        if not candidates:
            return report
        report.best_known = min(candidates)

        for name, result in results.items():
            metrics = evaluate(decode(result.best_bits, instance), instance)
            report.runs[name] = SolverRun(
                best_energy=result.best_energy,
                evals=result.evals,
                evals_to_within=evals_to_within(result.trace, report.best_known, self.suite.tol),
                carbon_g=metrics.carbon_g,
                violations=metrics.violations,
                trace=result.trace,
            )
        return report

    def run(self) -> BenchReport:
        params = self.suite.instances
        if self.suite.workers > 1:
            with ThreadPoolExecutor(max_workers=self.suite.workers) as pool:
                instances = list(pool.map(self.run_instance, params))
        else:
            instances = [self.run_instance(p) for p in params]
        instances.sort(key=lambda r: r.seed)
        return assemble_report(instances, self.suite)


def run_benchmark(suite: SuiteConfig) -> BenchReport:
    return BenchmarkRunner(suite).run()


def summarize(instances: List[InstanceReport]) -> Dict[str, SolverSummary]:
    """Per-solver aggregates, computed only from the stored per-instance runs"""
    summary = {}
    for name in SOLVERS:
        runs = [(r, r.runs[name]) for r in instances if name in r.runs]
        if not runs:
            continue
        evals_mid, evals_iqr = median_iqr([as_float(run.evals_to_within) for _, run in runs])
        reductions = [
            percent_reduction(r.runs["greedy"].carbon_g, run.carbon_g)
            for r, run in runs if "greedy" in r.runs
        ]
        greedy_total = sum(r.runs["greedy"].carbon_g for r, _ in runs if "greedy" in r.runs)
        solver_total = sum(run.carbon_g for r, run in runs if "greedy" in r.runs)
        summary[name] = SolverSummary(
            median_evals_to_within=finite_or_none(evals_mid),
            iqr_evals_to_within=finite_or_none(evals_iqr),
            reached=sum(run.evals_to_within is not None for _, run in runs),
            median_best_energy=finite_or_none(median([run.best_energy for _, run in runs])),
            total_carbon_g=sum(run.carbon_g for _, run in runs),
            median_carbon_reduction_vs_greedy=finite_or_none(median(finite_values(reductions))),
            carbon_reduction_vs_greedy=finite_or_none(percent_reduction(greedy_total, solver_total))
            if reductions else None,
            violations=sum(run.violations for _, run in runs),
        )
    return summary


def paired_percent(instances: List[InstanceReport], reference: str, other: str) -> List[float]:
    """Per-instance 100 * (carbon(other) - carbon(reference)) / carbon(reference)"""
    values = []
    for r in instances:
        if reference in r.runs and other in r.runs:
            ref, val = r.runs[reference].carbon_g, r.runs[other].carbon_g
            if ref == 0:
                if val == 0:
                    values.append(0.0)
                else:
                    logger.warning(f"Instance {r.seed}: {reference} emits nothing, skipping ratio")
                continue
            values.append(100.0 * (val - ref) / ref)
    return values


def ablation_sb_vs_sa(instances: List[InstanceReport]) -> Optional[float]:
    """Median extra carbon, in percent, from replacing SB with SA"""
    values = paired_percent(instances, "sb", "sa")
    return finite_or_none(median(values)) if values else None


def greedy_gap(instances: List[InstanceReport]) -> Optional[float]:
    """Median percentage by which the greedy objective exceeds the best-known objective"""
    gaps = [
        100.0 * (r.runs["greedy"].best_energy - r.best_known) / abs(r.best_known)
        for r in instances
        if "greedy" in r.runs and r.best_known not in (None, 0.0)
    ]
    return finite_or_none(median(gaps)) if gaps else None


def assemble_report(instances: List[InstanceReport], suite: SuiteConfig) -> BenchReport:
    sb_vs_sa = [-v for v in paired_percent(instances, "sa", "sb")]
    report = BenchReport(
        instance_seeds=[r.seed for r in instances],
        fingerprints={"sb": fingerprint(suite.sb), "sa": fingerprint(suite.sa), "suite": fingerprint(suite, exclude={"workers"})},
        instances=instances,
        summary=summarize(instances),
        carbon_reduction_sb_vs_sa=finite_or_none(median(sb_vs_sa)) if sb_vs_sa else None,
        greedy_gap_percent=greedy_gap(instances),
        ablation_sb_vs_sa=ablation_sb_vs_sa(instances),
    )
    for name, s in report.summary.items():
        logger.info(
            f"{name}: median evals-to-within {s.median_evals_to_within}, "
            f"carbon reduction vs greedy {s.carbon_reduction_vs_greedy}, violations {s.violations}"
        )
    return report
