#!/usr/bin/env python3
import os
import sys
import json
import logging
import argparse
from pathlib import Path
from typing import List, Optional

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from bench.export import FORMATS, export
from bench.runner import BenchReport, load_suite, run_benchmark
from models.carbon import CarbonIntensitySeries, EnergySeries
from models.qubo import QuboMatrix, load_qubo
from models.schedule import PenaltyWeights, SchedulingInstance, load_instance, save_instance
from scheduling.encoding import build_qubo, calibrate_penalties, decode
from scheduling.evaluation import evaluate
from scheduling.greedy import greedy_result
from solvers.brute import BruteForceSolver
from solvers.sa import SaConfig, SimulatedAnnealingSolver
from solvers.sb import SbConfig, SimulatedBifurcationSolver
from utils.carbon import BUCKETS, aggregate, attribute
from utils.errors import UsageError
from utils.instance_gen import (
    DEFAULT_SEED, GenParams, gen_carbon_intensity, gen_consumption_panel, gen_demand, gen_scheduling_instance,
)
from utils.io import read_series_csv, save_json, save_series_csv, save_trace_csv

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_INTERNAL, EXIT_USAGE = 0, 1, 2


def configure_logging() -> None:
    # stderr only: stdout is reserved for machine-readable payloads
    logging.basicConfig(
        level=os.getenv("LOG_LEVEL", "INFO").upper(),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )


def emit(payload) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


def cmd_gen(args) -> int:
    params = GenParams(
        seed=args.seed, days=args.days, nodes=args.nodes, customers=args.customers,
        intervals_per_day=args.intervals_per_day, compressors=args.compressors,
        dr_loads=args.dr_loads, horizon=args.horizon,
    )
    out_dir = Path(args.out_dir)
    (out_dir / "panel").mkdir(parents=True, exist_ok=True)

    paths = []
    instance_path = out_dir / "instance.json"
    save_instance(gen_scheduling_instance(params), instance_path)
    paths.append(instance_path)
    interval_hours = 24.0 / params.intervals_per_day
    paths.append(save_series_csv(
        EnergySeries(values=gen_demand(params), interval_hours=interval_hours), out_dir / "demand.csv"))
    paths.append(save_series_csv(gen_carbon_intensity(params), out_dir / "carbon.csv"))
    for i, series in enumerate(gen_consumption_panel(params)):
        paths.append(save_series_csv(series, out_dir / "panel" / f"customer_{i:03d}.csv"))

    logger.info(f"Wrote {len(paths)} files to {out_dir}")
    for path in paths:
        print(path)
    return EXIT_OK


def _load_problem(path: Path):
    """A QUBO file or a scheduling instance file, told apart by their keys"""
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise UsageError(f"{path}: malformed JSON ({e})") from e
    if isinstance(data, dict) and "entries" in data:
        return load_qubo(path)
    return load_instance(path)


def _weights(args, instance: SchedulingInstance) -> PenaltyWeights:
    if args.w_pressure is None and args.w_comfort is None:
        return calibrate_penalties(instance, args.w_carbon)
    calibrated = calibrate_penalties(instance, args.w_carbon)
    return PenaltyWeights(
        w_carbon=args.w_carbon,
        w_pressure=calibrated.w_pressure if args.w_pressure is None else args.w_pressure,
        w_comfort=calibrated.w_comfort if args.w_comfort is None else args.w_comfort,
    )


def cmd_solve(args) -> int:
    problem = _load_problem(Path(args.file))
    instance = problem if isinstance(problem, SchedulingInstance) else None
    qubo: QuboMatrix = build_qubo(instance, _weights(args, instance)) if instance is not None else problem

    if args.solver == "greedy":
        if instance is None:
            raise UsageError("The greedy solver needs a scheduling instance, not a bare QUBO")
        result = greedy_result(instance, qubo)
    elif args.solver == "brute":
        result = BruteForceSolver(args.seed).solve(qubo)
    elif args.solver == "sa":
        config = SaConfig(seed=args.seed, sweeps=args.sweeps, cooling_ratio=args.cooling_ratio,
                          initial_temperature=args.initial_temperature, restarts=args.restarts)
        result = SimulatedAnnealingSolver(config).solve(qubo)
    else:
        config = SbConfig(seed=args.seed, i_max=args.i_max, steps_per_iter=args.steps_per_iter,
                          dt=args.dt, c=args.c, restarts=args.restarts,
                          variant=args.variant, coupling_scale=args.coupling_scale)
        result = SimulatedBifurcationSolver(config).solve(qubo)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    trace_path = save_trace_csv(result, out_dir / f"trace_{result.solver}.csv")

    payload = result.model_dump(exclude={"trace"})
    payload["trace_csv"] = str(trace_path)
    if instance is not None:
        payload["metrics"] = evaluate(decode(result.best_bits, instance), instance).model_dump()
    emit(payload)
    return EXIT_OK


def cmd_bench(args) -> int:
    suite = load_suite(args.suite)
    if args.workers is not None:
        suite = suite.model_copy(update={"workers": args.workers})
    report = run_benchmark(suite)
    for path in export(report, args.out_dir, args.format):
        print(path)
    return EXIT_OK


def cmd_carbon(args) -> int:
    e_start, e_values = read_series_csv(args.energy)
    c_start, c_values = read_series_csv(args.intensity)
    energy = EnergySeries(values=e_values, interval_hours=args.interval_hours, start_index=e_start)
    intensity = CarbonIntensitySeries(values=c_values, interval_hours=args.interval_hours, start_index=c_start)
    emissions = attribute(energy, intensity)
    buckets = aggregate(emissions, args.bucket)
    total_g = aggregate(emissions, "total")[0][1]

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    emissions_path = save_series_csv(emissions, out_dir / "emissions.csv")
    summary = {"bucket": args.bucket, "buckets": [[label, value] for label, value in buckets], "total_g": total_g}
    summary_path = save_json(summary, out_dir / "carbon_summary.json")
    emit({**summary, "files": [str(emissions_path), str(summary_path)]})
    return EXIT_OK


def format_report(report: BenchReport) -> str:
    """Plain-text scheduling table: one row per solver"""
    header = f"{'Scheduler':<10} {'Evals to 1%':>12} {'Carbon red. vs greedy (%)':>26} {'Violations':>11}"
    lines = [header, "-" * len(header)]
    for name in ("greedy", "sa", "sb"):
        summary = report.summary.get(name)
        if summary is None:
            continue
        evals = "not reached" if summary.median_evals_to_within is None else f"{summary.median_evals_to_within:g}"
        reduction = "n/a" if summary.carbon_reduction_vs_greedy is None else f"{summary.carbon_reduction_vs_greedy:.1f}"
        lines.append(f"{name:<10} {evals:>12} {reduction:>26} {summary.violations:>11}")
    if report.ablation_sb_vs_sa is not None:
        lines.append(f"SB -> SA ablation: {report.ablation_sb_vs_sa:+.1f}% carbon")
    return "\n".join(lines)


def cmd_report(args) -> int:
    path = Path(args.report)
    try:
        report = BenchReport.model_validate_json(path.read_text(encoding="utf-8"))
    except ValueError as e:
        raise UsageError(f"{path}: not a benchmark report ({e})") from e
    print(format_report(report))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--seed', type=int, default=DEFAULT_SEED, help=f'Random seed (default: {DEFAULT_SEED})')
    common.add_argument('--out-dir', default='out', help='Directory for output files (default: out)')
    common.add_argument('--format', choices=FORMATS, default='json', help='Report format (default: json)')

    parser = argparse.ArgumentParser(description='Carbon-aware compressor and demand-response scheduling with '
                                                 'Simulated Bifurcation')
    sub = parser.add_subparsers(dest='command', required=True)

    gen = sub.add_parser('gen', parents=[common], help='Generate synthetic instances and series')
    defaults = GenParams()
    gen.add_argument('--days', type=int, default=defaults.days)
    gen.add_argument('--nodes', type=int, default=defaults.nodes)
    gen.add_argument('--customers', type=int, default=defaults.customers)
    gen.add_argument('--intervals-per-day', type=int, default=defaults.intervals_per_day)
    gen.add_argument('--compressors', type=int, default=defaults.compressors)
    gen.add_argument('--dr-loads', type=int, default=defaults.dr_loads)
    gen.add_argument('--horizon', type=int, default=defaults.horizon)
    gen.set_defaults(handler=cmd_gen)

    solve = sub.add_parser('solve', parents=[common], help='Solve a QUBO or scheduling instance file')
    solve.add_argument('file', help='QUBO JSON or instance JSON')
    solve.add_argument('--solver', choices=['sb', 'sa', 'greedy', 'brute'], default='sb')
    sb, sa = SbConfig(), SaConfig()
    solve.add_argument('--restarts', type=int, default=1)
    solve.add_argument('--i-max', type=int, default=sb.i_max)
    solve.add_argument('--steps-per-iter', type=int, default=sb.steps_per_iter)
    solve.add_argument('--dt', type=float, default=sb.dt)
    solve.add_argument('--c', type=float, default=sb.c)
    solve.add_argument('--variant', choices=['adiabatic', 'ballistic'], default=sb.variant)
    solve.add_argument('--coupling-scale', type=float, default=sb.coupling_scale)
    solve.add_argument('--sweeps', type=int, default=sa.sweeps)
    solve.add_argument('--cooling-ratio', type=float, default=sa.cooling_ratio)
    solve.add_argument('--initial-temperature', type=float, default=None)
    solve.add_argument('--w-carbon', type=float, default=1e-3, help='Cost per gCO2 (default: 1e-3)')
    solve.add_argument('--w-pressure', type=float, default=None, help='Override the calibrated pressure weight')
    solve.add_argument('--w-comfort', type=float, default=None, help='Override the calibrated comfort weight')
    solve.set_defaults(handler=cmd_solve)

    bench = sub.add_parser('bench', parents=[common], help='Run a benchmark suite')
    bench.add_argument('suite', help='Suite configuration JSON')
    bench.add_argument('--workers', type=int, default=None, help='Instances run concurrently')
    bench.set_defaults(handler=cmd_bench)

    carbon = sub.add_parser('carbon', parents=[common], help='Attribute emissions to a consumption series')
    carbon.add_argument('energy', help='Energy CSV (interval,value in kWh)')
    carbon.add_argument('intensity', help='Carbon-intensity CSV (interval,value in gCO2/kWh)')
    carbon.add_argument('--bucket', choices=BUCKETS, default='total')
    carbon.add_argument('--interval-hours', type=float, default=0.25)
    carbon.set_defaults(handler=cmd_carbon)

    report = sub.add_parser('report', parents=[common], help='Print a saved benchmark report as a table')
    report.add_argument('report', help='report.json written by bench')
    report.set_defaults(handler=cmd_report)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    configure_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (ValueError, OSError) as e:
        # UsageError and pydantic's ValidationError are both ValueErrors
        logger.error(f"{args.command}: {e}")
        return EXIT_USAGE
    except Exception as e:
        logger.exception(f"{args.command} failed: {e}")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
