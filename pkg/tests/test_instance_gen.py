import numpy as np
import pytest

from scheduling.encoding import build_qubo, calibrate_penalties
from utils.instance_gen import (
    GenParams, fit_budgets, gen_carbon_intensity, gen_consumption_panel, gen_demand, gen_scheduling_instance,
)


class TestGenParams:
    def test_defaults_match_network_scale(self):
        params = GenParams()
        assert (params.nodes, params.customers, params.days, params.intervals_per_day) == (50, 200, 60, 96)

    @pytest.mark.parametrize("field", ["days", "customers", "horizon", "compressors"])
    def test_rejects_zero(self, field):
        with pytest.raises(ValueError):
            GenParams(**{field: 0})

    def test_rejects_inverted_carbon_bounds(self):
        with pytest.raises(ValueError):
            GenParams(carbon_low=500.0, carbon_high=100.0)

    def test_rejects_unknown_fields(self):
        with pytest.raises(ValueError):
            GenParams(sites=3)


class TestDemand:
    def test_deterministic(self):
        params = GenParams(seed=3, days=2)
        assert gen_demand(params).tolist() == gen_demand(params).tolist()

    def test_seed_matters(self):
        assert gen_demand(GenParams(seed=3, days=2)).tolist() != gen_demand(GenParams(seed=4, days=2)).tolist()

    def test_nonnegative(self):
        assert (gen_demand(GenParams(days=7, demand_noise=2.0)) >= 0).all()

    def test_weekly_period_without_noise(self):
        params = GenParams(days=21, demand_noise=0.0)
        series = gen_demand(params).reshape(3, -1)
        assert np.array_equal(series[0], series[1])
        assert np.array_equal(series[1], series[2])

    def test_length(self):
        assert len(gen_demand(GenParams(days=3, intervals_per_day=24))) == 72


class TestCarbonIntensity:
    def test_within_bounds(self):
        values = gen_carbon_intensity(GenParams(days=10, carbon_noise=200.0)).values
        assert values.min() >= 100.0
        assert values.max() <= 600.0

    def test_deterministic(self):
        params = GenParams(seed=9, days=2)
        assert gen_carbon_intensity(params).values.tolist() == gen_carbon_intensity(params).values.tolist()

    def test_daily_mean_is_midpoint_without_noise(self):
        series = gen_carbon_intensity(GenParams(days=1, carbon_noise=0.0))
        assert series.values.mean() == pytest.approx(350.0, abs=1e-9)
        assert series.interval_hours == 0.25


class TestSchedulingInstance:
    def test_default_bit_count(self):
        """(4 compressors + 8 DR loads) x 24 hours"""
        assert gen_scheduling_instance(GenParams()).n_bits == 288

    @pytest.mark.parametrize("seed", range(10))
    def test_feasible(self, seed):
        instance = gen_scheduling_instance(GenParams(seed=seed))
        instance.check_feasible()
        assert instance.capacities.sum() >= instance.demand.max()

    def test_deterministic(self):
        params = GenParams(seed=5, compressors=2, dr_loads=4, horizon=12)
        assert gen_scheduling_instance(params).model_dump() == gen_scheduling_instance(params).model_dump()

    def test_capacities_form_binary_ladder(self):
        instance = gen_scheduling_instance(GenParams(seed=2, compressors=3))
        quantum = instance.capacities.min()
        assert sorted(instance.capacities / quantum) == [1.0, 2.0, 4.0]
        assert np.all(instance.reliefs == quantum)
        assert np.all(np.mod(instance.demand, quantum) == 0)

    def test_suite_shape(self):
        """2 compressors, 4 DR loads, horizon 12"""
        instance = gen_scheduling_instance(GenParams(seed=1, compressors=2, dr_loads=4, horizon=12))
        assert build_qubo(instance, calibrate_penalties(instance, 1e-3)).n == 72

    def test_horizon_longer_than_a_day(self):
        instance = gen_scheduling_instance(GenParams(seed=1, horizon=30, compressors=2, dr_loads=1))
        assert instance.horizon == 30
        assert len(instance.carbon) == 30

    def test_without_dr(self):
        instance = gen_scheduling_instance(GenParams(seed=1, dr_loads=0))
        assert instance.n_dr == 0


class TestFitBudgets:
    def test_already_feasible(self):
        assert fit_budgets([1, 2], np.array([2, 1, 1])) == [1, 2]

    def test_reduces_largest_first(self):
        """Two slots in total cannot host three activations"""
        assert fit_budgets([2, 1], np.array([1, 1])) == [1, 1]

    def test_per_interval_capacity(self):
        assert fit_budgets([3, 3], np.array([1, 1, 1])) == [1, 2]


class TestConsumptionPanel:
    def test_panel_shape(self):
        panel = gen_consumption_panel(GenParams(customers=4, days=2))
        assert len(panel) == 4
        assert all(len(series) == 192 for series in panel)
        assert all(series.interval_hours == 0.25 for series in panel)

    def test_sixty_days_of_quarter_hours(self):
        panel = gen_consumption_panel(GenParams(customers=2))
        assert len(panel[0]) == 5760

    def test_deterministic(self):
        params = GenParams(customers=3, days=1)
        first, second = gen_consumption_panel(params), gen_consumption_panel(params)
        assert [s.values.tolist() for s in first] == [s.values.tolist() for s in second]

    def test_customers_differ(self):
        panel = gen_consumption_panel(GenParams(customers=2, days=1))
        assert panel[0].values.tolist() != panel[1].values.tolist()
