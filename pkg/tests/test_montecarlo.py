"""Tests for the Monte-Carlo engine."""

import numpy as np
import pandas as pd
import pytest

from tailkernel.config import parse_run_config
from tailkernel.errors import DomainError
from tailkernel.estimators import EstimatorId, EstimatorPath, EstimatorSpec, estimator_path
from tailkernel.kernels import INDICATOR, TRIWEIGHT
from tailkernel.models import CensoringScheme, ParetoTypeModel, sample_censored
from tailkernel.montecarlo import (
    SELECTION_COLUMNS,
    SUMMARY_COLUMNS,
    ScenarioConfig,
    normality_check,
    run_scenario,
    run_scenario_async,
    scenarios_from_run_config,
    standard_scenarios,
    tv_smoothness,
)
from tailkernel.survival import OrderedCensoredSample

KERNEL = EstimatorSpec(EstimatorId.KERNEL, TRIWEIGHT)
WORMS = EstimatorSpec(EstimatorId.WORMS)
HILL = EstimatorSpec(EstimatorId.HILL)


def _scenario(scheme, replications=4, n=100, estimators=(KERNEL, WORMS), k_grid=None, seed=42):
    return ScenarioConfig(
        name="test", scheme=scheme, n=n, replications=replications, master_seed=seed,
        estimators=estimators, k_grid=k_grid or tuple(range(2, n)), nu=0.3, k_min=10,
    )


def _path(values):
    values = np.asarray(values, dtype=float)
    return EstimatorPath("kernel", "triweight", np.arange(10, 10 + values.size), values,
                         (None,) * values.size)


class TestTvSmoothness:
    def test_constant(self):
        assert tv_smoothness(_path([0.4, 0.4, 0.4])) == 0.0

    def test_monotone(self):
        assert tv_smoothness(_path([0.1, 0.2, 0.5, 0.9])) == pytest.approx(0.8)

    def test_zigzag(self):
        assert tv_smoothness(_path([1.0, 3.0, 2.0])) == 3.0

    def test_needs_two_values(self):
        with pytest.raises(DomainError):
            tv_smoothness(_path([1.0]))

    def test_window(self):
        path = _path([5.0, 1.0, 2.0, 4.0, 0.0])     # k = 10..14
        assert tv_smoothness(path, k_hi=13) == pytest.approx(4.0 + 1.0 + 2.0)
        assert tv_smoothness(path, k_lo=11, k_hi=13) == pytest.approx(3.0)
        with pytest.raises(DomainError):
            tv_smoothness(path, k_lo=14)

    def test_window_starts_at_ten(self):
        values = np.array([9.0, 0.5, 0.6])
        path = EstimatorPath("worms", "none", np.array([2, 10, 11]), values, (None,) * 3)
        assert tv_smoothness(path) == pytest.approx(0.1)


class TestScenarioConfig:
    def test_validation(self, weak_scheme):
        with pytest.raises(DomainError):
            _scenario(weak_scheme, replications=0)
        with pytest.raises(DomainError):
            _scenario(weak_scheme, k_grid=(1, 5))
        with pytest.raises(DomainError):
            _scenario(weak_scheme, estimators=())

    def test_grid_sorted(self, weak_scheme):
        cfg = _scenario(weak_scheme, k_grid=(30, 10, 20, 10))
        assert cfg.k_grid == (10, 20, 30)


class TestRunScenario:
    def test_shapes(self, weak_scheme):
        summary = run_scenario(_scenario(weak_scheme))
        assert list(summary.cells.columns) == SUMMARY_COLUMNS
        assert len(summary.cells) == 2 * 98
        assert list(summary.selections.columns) == SELECTION_COLUMNS
        assert len(summary.selections) == 2 * 4
        assert summary.raw.shape == (4, 2, 98)

    def test_single_replication_is_the_path(self, weak_scheme):
        cfg = _scenario(weak_scheme, replications=1)
        summary = run_scenario(cfg)
        sample = OrderedCensoredSample.from_sample(sample_censored(weak_scheme, 100, 42, 0))
        path = estimator_path(sample, KERNEL, cfg.k_grid)
        cells = summary.cells[summary.cells["estimator"] == "kernel"]
        np.testing.assert_allclose(cells["mean"].to_numpy(), path.estimates, rtol=0, atol=1e-15)
        assert (cells["defined_count"] == 1).all()

    def test_deterministic(self, weak_scheme):
        cfg = _scenario(weak_scheme, replications=6)
        a = run_scenario(cfg)
        b = run_scenario(cfg)
        pd.testing.assert_frame_equal(a.cells, b.cells)
        pd.testing.assert_frame_equal(a.selections, b.selections)

    def test_thread_count_does_not_matter(self, weak_scheme):
        cfg = _scenario(weak_scheme, replications=8)
        one = run_scenario(cfg, threads=1)
        four = run_scenario(cfg, threads=4)
        pd.testing.assert_frame_equal(one.cells, four.cells)
        pd.testing.assert_frame_equal(one.smoothness, four.smoothness)
        pd.testing.assert_frame_equal(one.selections, four.selections)

    async def test_async_entry_point(self, weak_scheme):
        summary = await run_scenario_async(_scenario(weak_scheme, replications=2), threads=2)
        assert summary.scenario == "test"
        assert len(summary.selections) == 4

    def test_mse_decomposition(self, weak_scheme):
        summary = run_scenario(_scenario(weak_scheme, replications=10))
        cells = summary.cells.dropna()
        np.testing.assert_allclose(cells["mse"], cells["variance"] + cells["bias"] ** 2,
                                   rtol=1e-10, atol=1e-14)

    def test_selection_table(self, weak_scheme):
        table = run_scenario(_scenario(weak_scheme)).selection_table()
        assert list(table["estimator"]) == ["kernel", "worms"]
        assert table["k_star"].between(10, 99).all()

    def test_invalid_threads(self, weak_scheme):
        with pytest.raises(DomainError):
            run_scenario(_scenario(weak_scheme), threads=0)


class TestStatistics:
    def test_hill_unbiased_on_exact_pareto(self):
        gamma1, n, k, reps = 0.5, 500, 100, 500
        cfg = _scenario(CensoringScheme(ParetoTypeModel.exact_pareto(gamma1)),
                        replications=reps, n=n, estimators=(HILL,), k_grid=(k,))
        row = run_scenario(cfg).cells.iloc[0]
        assert abs(row["bias"]) <= 3 * gamma1 / np.sqrt(k * reps)

    @pytest.mark.parametrize("gammas", [(0.5, 1.0), (1.0, 0.5)], ids=["weak", "strong"])
    def test_kernel_path_smoother_than_worms(self, gammas):
        scheme = CensoringScheme(ParetoTypeModel.burr(1.0, gammas[0]),
                                 ParetoTypeModel.burr(1.0, gammas[1]))
        n, reps = 500, 200
        cfg = _scenario(scheme, replications=reps, n=n, k_grid=tuple(range(10, n // 2 + 1)))
        summary = run_scenario(cfg, threads=4)
        smoother = 0
        for rep in summary.raw:
            kernel_tv = np.abs(np.diff(rep[0][np.isfinite(rep[0])])).sum()
            worms_tv = np.abs(np.diff(rep[1][np.isfinite(rep[1])])).sum()
            smoother += kernel_tv < worms_tv
        assert smoother >= 0.8 * reps

    def test_kernel_bias_at_selected_k_not_worse_than_worms(self, weak_scheme):
        cfg = _scenario(weak_scheme, replications=200, n=500, k_grid=tuple(range(2, 500)))
        sel = run_scenario(cfg, threads=4).selections
        err = {name: (sel[sel["estimator"] == name].sort_values("replication")["estimate"]
                      .to_numpy() - cfg.gamma1) for name in ("kernel", "worms")}
        diff = np.abs(err["kernel"]) - np.abs(err["worms"])
        diff = diff[np.isfinite(diff)]
        rng = np.random.default_rng(0)
        boot = rng.choice(diff, size=(2000, diff.size)).mean(axis=1)
        assert np.quantile(boot, 0.05) <= 0.0

    def test_normality(self):
        cfg = _scenario(CensoringScheme(ParetoTypeModel.exact_pareto(0.5)),
                        replications=500, n=2000, estimators=(KERNEL,), k_grid=(100,))
        check = normality_check(cfg, 100)
        assert 0.75 <= check.ratio <= 1.25

    def test_normality_worms(self):
        cfg = _scenario(CensoringScheme(ParetoTypeModel.exact_pareto(1.0)),
                        replications=500, n=2000, estimators=(WORMS,), k_grid=(100,))
        check = normality_check(cfg, 100, threads=4)
        assert check.reference_sigma2 == pytest.approx(1.0, abs=1e-8)
        assert 0.75 <= check.ratio <= 1.25

    def test_bias_reduction_on_weak_censoring(self, weak_scheme):
        reduced = EstimatorSpec.from_names("bias-reduced", "triweight", beta1=1.0)
        cfg = _scenario(weak_scheme, replications=200, n=500, estimators=(KERNEL, reduced),
                        k_grid=tuple(range(100, 301, 10)))
        cells = run_scenario(cfg, threads=4).cells
        kernel = cells[cells["estimator"] == "kernel"]
        corrected = cells[cells["estimator"] == "bias-reduced"]
        assert corrected["bias"].abs().mean() < kernel["bias"].abs().mean()
        assert corrected["mse"].mean() <= 2 * kernel["mse"].mean()

    def test_bias_reduction_uncensored(self):
        reduced = EstimatorSpec.from_names("bias-reduced", "triweight", beta1=1.0)
        cfg = _scenario(CensoringScheme(ParetoTypeModel.burr(1.0, 0.5)), replications=200,
                        n=500, estimators=(KERNEL, reduced), k_grid=(250,))
        bias = run_scenario(cfg, threads=4).cells.set_index("estimator")["bias"]
        assert abs(bias["bias-reduced"]) < abs(bias["kernel"])

    def test_normality_needs_one_estimator(self, weak_scheme):
        with pytest.raises(DomainError):
            normality_check(_scenario(weak_scheme), 20)


class TestScenarioConstruction:
    def test_standard_scenarios(self):
        scenarios = standard_scenarios(100, 2, 0, (KERNEL,))
        assert len(scenarios) == 8
        names = {s.name for s in scenarios}
        assert "burr-frechet-weak" in names
        weak = next(s for s in scenarios if s.name == "burr-burr-weak")
        strong = next(s for s in scenarios if s.name == "burr-burr-strong")
        assert weak.scheme.p == pytest.approx(2 / 3)
        assert strong.scheme.p == pytest.approx(1 / 3)

    def test_from_run_config(self):
        cfg = parse_run_config({"n": "120", "k_step": "10", "estimators": "kernel,worms",
                                "uncensored": "true", "name": "demo"})
        (scenario,) = scenarios_from_run_config(cfg)
        assert scenario.name == "demo"
        assert scenario.scheme.uncensored
        assert scenario.k_grid == tuple(range(2, 120, 10))
        assert [s.estimator for s in scenario.estimators] == [EstimatorId.KERNEL, EstimatorId.WORMS]

    def test_indicator_kernel_spec(self):
        cfg = parse_run_config({"kernel": "indicator", "estimators": "kernel"})
        (scenario,) = scenarios_from_run_config(cfg)
        assert scenario.estimators[0].kernel is INDICATOR
