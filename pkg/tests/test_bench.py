import json
import math
from pathlib import Path

import pytest

from bench.export import SUMMARY_COLUMNS, export, report_json
from bench.metrics import evals_to_within, median, median_iqr, percent_reduction
from bench.runner import (
    BenchmarkRunner, InstanceReport, SolverRun, SuiteConfig, ablation_sb_vs_sa, fingerprint, greedy_gap,
    load_suite, run_benchmark, summarize,
)
from models.schedule import Compressor
from scheduling.encoding import build_qubo, calibrate_penalties, decode
from scheduling.evaluation import evaluate
from solvers.brute import brute_force
from solvers.sa import SaConfig, solve_sa
from solvers.sb import SbConfig, solve_sb
from tests.factories import make_instance
from utils.errors import UsageError

ACCEPTANCE_SUITE = Path(__file__).resolve().parent.parent / "suites" / "acceptance.json"


def small_suite(seeds=(1, 2), **overrides):
    params = dict(compressors=2, dr_loads=1, horizon=4, nodes=10,
                  sb=SbConfig(i_max=20, restarts=2), sa=SaConfig(sweeps=10))
    params.update(overrides)
    return SuiteConfig.from_seeds(list(seeds), **params)


def run(carbon_g, best_energy=10.0, evals_to=1):
    return SolverRun(best_energy=best_energy, evals=5, evals_to_within=evals_to, carbon_g=carbon_g,
                     violations=0, trace=[(5, best_energy)])


class TestEvalsToWithin:
    def test_walks_to_threshold(self):
        assert evals_to_within([(1, 10.0), (2, 5.0), (3, 1.004)], 1.0) == 3

    def test_immediate_hit(self):
        assert evals_to_within([(1, 7.5)], 7.5) == 1

    def test_never_reached(self):
        assert evals_to_within([(1, 10.0), (2, 5.0)], 1.0) is None

    def test_negative_best_known(self):
        """Threshold is best_known + 1% of its magnitude"""
        assert evals_to_within([(1, -98.0), (4, -99.5)], -100.0) == 4

    def test_zero_best_known_uses_absolute_tolerance(self):
        assert evals_to_within([(1, 0.5), (2, 0.005)], 0.0) == 2

    def test_empty_trace(self):
        with pytest.raises(UsageError):
            evals_to_within([], 1.0)

    def test_non_finite_best_known(self):
        with pytest.raises(UsageError):
            evals_to_within([(1, 1.0)], math.inf)


class TestAggregates:
    def test_median_iqr_keeps_not_reached_as_inf(self):
        assert median_iqr([1.0, 2.0, 3.0, math.inf]) == (2.5, 1.0)
        assert median_iqr([1.0, math.inf, math.inf])[0] == math.inf

    def test_percent_reduction(self):
        assert percent_reduction(200.0, 150.0) == 25.0
        assert percent_reduction(0.0, 0.0) == 0.0

    def test_ablation_of_identical_policies(self):
        instances = [InstanceReport(seed=1, n_bits=4, runs={"sb": run(100.0), "sa": run(100.0)})]
        assert ablation_sb_vs_sa(instances) == 0.0

    def test_ablation_sign(self):
        instances = [InstanceReport(seed=1, n_bits=4, runs={"sb": run(100.0), "sa": run(110.0)})]
        assert ablation_sb_vs_sa(instances) == pytest.approx(10.0)

    def test_greedy_gap(self):
        instances = [InstanceReport(seed=1, n_bits=4, best_known=100.0, runs={"greedy": run(1.0, 110.0)})]
        assert greedy_gap(instances) == pytest.approx(10.0)

    def test_summary_counts_unreached(self):
        instances = [
            InstanceReport(seed=s, n_bits=4, runs={"greedy": run(200.0), "sb": run(150.0, evals_to=e)})
            for s, e in ((1, 3), (2, None))
        ]
        summary = summarize(instances)
        assert summary["sb"].reached == 1
        assert summary["sb"].carbon_reduction_vs_greedy == pytest.approx(25.0)
        assert summary["greedy"].carbon_reduction_vs_greedy == 0.0


def policy_run(result, instance):
    metrics = evaluate(decode(result.best_bits, instance), instance)
    return SolverRun(best_energy=result.best_energy, evals=result.evals, evals_to_within=None,
                     carbon_g=metrics.carbon_g, violations=metrics.violations, trace=result.trace)


class TestTruncatedAnnealingAblation:
    @pytest.fixture
    def instance(self):
        """Demand 2 met exactly by the efficient compressor; every other schedule emits more or violates"""
        return make_instance(
            compressors=[Compressor(id="efficient", capacity=2.0, energy_per_interval=1.0),
                         Compressor(id="small", capacity=1.0, energy_per_interval=2.0)],
            demand=[2.0],
        )

    def test_brute_force_optimum(self, instance):
        qubo = build_qubo(instance, calibrate_penalties(instance, 1e-3))
        bits, value = brute_force(qubo)
        assert bits.tolist() == [1, 0]
        sb = solve_sb(qubo, SbConfig(variant="ballistic", coupling_scale=6.0, restarts=4, i_max=20))
        assert sb.best_energy == pytest.approx(value)

    def test_one_sweep_of_annealing_costs_carbon(self, instance):
        """One zero-temperature sweep never evaluates its own start, so most seeds miss the optimum"""
        qubo = build_qubo(instance, calibrate_penalties(instance, 1e-3))
        sb = policy_run(solve_sb(qubo, SbConfig(variant="ballistic", coupling_scale=6.0, restarts=4, i_max=20)),
                        instance)
        ablations = []
        for seed in range(10):
            sa = solve_sa(qubo, SaConfig(seed=seed, sweeps=1, initial_temperature=1e-9))
            ablations.append(ablation_sb_vs_sa(
                [InstanceReport(seed=seed, n_bits=2, runs={"sb": sb, "sa": policy_run(sa, instance)})]
            ))
        assert all(a >= 0.0 for a in ablations)
        assert max(ablations) > 0.0


class TestSuiteConfig:
    def test_from_seeds(self):
        suite = small_suite(seeds=(4, 5))
        assert [p.seed for p in suite.instances] == [4, 5]
        assert suite.sb.i_max == 20

    def test_load_round_trip(self, tmp_path):
        path = tmp_path / "suite.json"
        path.write_text(small_suite().model_dump_json())
        assert load_suite(path) == small_suite()

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "suite.json"
        path.write_text("{")
        with pytest.raises(UsageError):
            load_suite(path)

    def test_unknown_key(self, tmp_path):
        path = tmp_path / "suite.json"
        path.write_text(json.dumps({"instances": [{"seed": 1}], "solver": "qaoa"}))
        with pytest.raises(ValueError):
            load_suite(path)

    def test_wrong_format_version(self, tmp_path):
        path = tmp_path / "suite.json"
        path.write_text(json.dumps({"format_version": 2, "instances": [{"seed": 1}]}))
        with pytest.raises(UsageError):
            load_suite(path)

    def test_fingerprint(self):
        assert fingerprint(SbConfig()) == fingerprint(SbConfig())
        assert fingerprint(SbConfig()) != fingerprint(SbConfig(c=0.25))
        assert len(fingerprint(SaConfig())) == 16


class TestBenchmarkRunner:
    @pytest.fixture
    def runner(self):
        return BenchmarkRunner(small_suite())

    def test_run_instance(self, runner):
        report = runner.run_instance(runner.suite.instances[0])
        assert set(report.runs) == {"greedy", "sa", "sb"}
        assert report.best_known_source == "brute"
        assert report.n_bits == 12
        assert all(r.best_energy >= report.best_known for r in report.runs.values())
        assert report.runs["greedy"].evals == 1
        assert report.runs["greedy"].violations == 0

    def test_failing_solver_is_recorded(self, runner, mocker):
        mocker.patch.object(runner.solvers["sa"], "solve", side_effect=RuntimeError("boom"))
        report = runner.run_instance(runner.suite.instances[0])
        assert report.errors == {"sa": "RuntimeError: boom"}
        assert set(report.runs) == {"greedy", "sb"}

    def test_summary_is_recomputable(self, runner):
        report = runner.run()
        assert report.instance_seeds == [1, 2]
        assert report.rng_algorithm.startswith("Philox")
        assert summarize(report.instances) == report.summary
        assert report.summary["greedy"].carbon_reduction_vs_greedy == 0.0

    def test_workers_do_not_change_results(self):
        assert report_json(run_benchmark(small_suite())) == report_json(run_benchmark(small_suite(workers=2)))


class TestExport:
    @pytest.fixture(scope="class")
    def report(self):
        return run_benchmark(small_suite(seeds=(3,)))

    def test_json_files(self, report, tmp_path):
        paths = export(report, tmp_path)
        names = [p.relative_to(tmp_path).as_posix() for p in paths]
        assert names == ["traces/3_greedy.csv", "traces/3_sa.csv", "traces/3_sb.csv", "report.json"]
        assert (tmp_path / "traces" / "3_greedy.csv").read_text().startswith("evals,best_energy\n1,")

    def test_csv_summary(self, report, tmp_path):
        export(report, tmp_path, "csv")
        lines = (tmp_path / "summary.csv").read_text().splitlines()
        assert lines[0] == ",".join(SUMMARY_COLUMNS)
        assert [line.split(",")[0] for line in lines[1:]] == ["greedy", "sa", "sb"]

    def test_byte_identical_reruns(self, tmp_path):
        first = export(run_benchmark(small_suite(seeds=(3,))), tmp_path / "a", "csv")
        second = export(run_benchmark(small_suite(seeds=(3,))), tmp_path / "b", "csv")
        for a, b in zip(first, second):
            assert a.read_bytes() == b.read_bytes()

    def test_unknown_format(self, report, tmp_path):
        with pytest.raises(ValueError):
            export(report, tmp_path, "xml")


@pytest.mark.slow
class TestAcceptanceSuite:
    """The shipped 20-instance suite: 72 bits each, too large for brute force"""

    @pytest.fixture(scope="class")
    def report(self):
        return run_benchmark(load_suite(ACCEPTANCE_SUITE))

    def test_every_solver_ran(self, report):
        assert len(report.instances) == 20
        assert all(not r.errors for r in report.instances)

    def test_no_violations(self, report):
        assert report.summary["sb"].violations == 0
        assert report.summary["sa"].violations == 0

    def test_sb_converges_five_times_faster(self, report):
        sb = report.summary["sb"].median_evals_to_within
        sa = report.summary["sa"].median_evals_to_within
        assert sb is not None
        # None means SA misses the threshold on more than half the instances
        assert sa is None or sb <= sa / 5

    def test_carbon_ordering(self, report):
        carbon = {
            name: median([r.runs[name].carbon_g for r in report.instances])
            for name in ("greedy", "sa", "sb")
        }
        assert carbon["sb"] <= carbon["sa"] <= carbon["greedy"]
        assert report.summary["sb"].median_carbon_reduction_vs_greedy >= 5.0

    def test_ablation_is_nonnegative(self, report):
        assert report.ablation_sb_vs_sa >= 0.0

    def test_first_instance_is_feasible(self):
        """A single instance run on its own gives the same zero-violation SB schedule"""
        runner = BenchmarkRunner(load_suite(ACCEPTANCE_SUITE))
        report = runner.run_instance(runner.suite.instances[0])
        assert report.runs["sb"].violations == 0
