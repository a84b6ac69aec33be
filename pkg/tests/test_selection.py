"""Tests for the Reiss-Thomas selection of k."""

import numpy as np
import pytest

from tailkernel.errors import DomainError, Reason
from tailkernel.estimators import EstimatorPath
from tailkernel.selection import RunningMedian, reiss_thomas


def _path(values, k_start=2):
    values = np.asarray(values, dtype=float)
    ks = np.arange(k_start, k_start + values.size)
    reasons = tuple(None if np.isfinite(v) else Reason.KM_TOP_ZERO for v in values)
    return EstimatorPath("kernel", "triweight", ks, values, reasons)


class TestRunningMedian:
    def test_lower_median(self):
        rm = RunningMedian()
        medians = []
        for x in (5.0, 1.0, 3.0, 2.0, 4.0):
            rm.push(x)
            medians.append(rm.median())
        assert medians == [5.0, 1.0, 3.0, 2.0, 3.0]
        assert len(rm) == 5

    def test_matches_sorting(self):
        rng = np.random.default_rng(1)
        values = rng.normal(size=200)
        rm = RunningMedian()
        for i, x in enumerate(values):
            rm.push(float(x))
            assert rm.median() == np.sort(values[:i + 1])[i // 2]

    def test_empty(self):
        with pytest.raises(DomainError):
            RunningMedian().median()

    def test_weighted_abs_deviation(self):
        rng = np.random.default_rng(2)
        values = rng.normal(size=150)
        weights = rng.uniform(0.5, 3.0, size=150)
        rm = RunningMedian()
        for i, (x, w) in enumerate(zip(values, weights)):
            rm.push(float(x), float(w))
            med = np.sort(values[:i + 1])[i // 2]
            expected = np.dot(weights[:i + 1], np.abs(values[:i + 1] - med))
            assert rm.abs_deviation() == pytest.approx(expected, rel=1e-9, abs=1e-12)


class TestReissThomas:
    def test_constant_path_takes_smallest_k(self):
        result = reiss_thomas(_path(np.full(40, 0.7)), nu=0.3, k_min=10)
        assert result.k_star == 10
        assert result.estimate == 0.7
        assert np.all(result.criterion_values == 0.0)

    def test_outlier_at_the_end(self):
        result = reiss_thomas(_path([1.0, 1.0, 1.0, 5.0]), nu=0.0, k_min=2)
        assert result.k_star == 2
        assert result.criterion_values[-1] == pytest.approx(4 / 5)

    def test_undefined_entries_skipped(self):
        result = reiss_thomas(_path([1.0, np.nan, 1.0, 1.0, 9.0]), nu=0.0, k_min=2)
        assert result.k_star == 2
        assert 3 not in result.k_values

    def test_translation_invariant(self):
        rng = np.random.default_rng(7)
        values = 0.5 + 0.05 * np.cumsum(rng.normal(size=80))
        a = reiss_thomas(_path(values))
        b = reiss_thomas(_path(values + 3.0))
        assert a.k_star == b.k_star

    def test_scale_invariant(self):
        rng = np.random.default_rng(8)
        values = 0.5 + 0.05 * np.cumsum(rng.normal(size=80))
        a = reiss_thomas(_path(values))
        b = reiss_thomas(_path(values * 4.0))
        assert a.k_star == b.k_star

    def test_k_max(self):
        values = np.concatenate([np.full(20, 2.0), np.full(20, 1.0)])
        result = reiss_thomas(_path(values), nu=0.0, k_min=2, k_max=15)
        assert result.k_values[-1] == 15

    def test_criterion_matches_direct_sum(self):
        rng = np.random.default_rng(11)
        values = 0.5 + 0.05 * np.cumsum(rng.normal(size=300))
        values[[17, 90, 91]] = np.nan
        nu = 0.3
        result = reiss_thomas(_path(values), nu=nu, k_min=10)
        ks = np.arange(2, 302)[np.isfinite(values)]
        defined = values[np.isfinite(values)]
        for k, crit in zip(result.k_values, result.criterion_values):
            head = defined[ks <= k]
            med = np.sort(head)[(head.size - 1) // 2]
            expected = np.dot(ks[ks <= k] ** nu, np.abs(head - med)) / k
            assert crit == pytest.approx(expected, rel=1e-9, abs=1e-12)

    def test_too_few_defined(self):
        with pytest.raises(DomainError):
            reiss_thomas(_path([1.0, np.nan, 2.0]), k_min=2)

    def test_nu_range(self):
        with pytest.raises(DomainError):
            reiss_thomas(_path(np.ones(20)), nu=0.8)

    def test_no_candidates(self):
        with pytest.raises(DomainError):
            reiss_thomas(_path(np.ones(5)), k_min=50)
