"""Tests for run-config parsing and thread resolution."""

import pytest

from tailkernel.config import (
    ADAPTIVE_TAU1_GRID,
    load_run_config,
    parse_run_config,
    resolve_threads,
)
from tailkernel.errors import ValidationError


class TestParseRunConfig:
    def test_defaults(self):
        cfg = parse_run_config({})
        assert cfg.family_f == "burr"
        assert cfg.n == 500
        assert cfg.estimators == ["efg", "worms", "kernel", "bab"]

    def test_values_are_typed(self):
        cfg = parse_run_config({
            "family.f": "frechet", "gamma.f": "0.25", "n": "300",
            "estimators": "hill, kernel", "adaptive": "false", "k_step": "5",
        })
        assert cfg.family_f == "frechet"
        assert cfg.gamma_f == 0.25
        assert cfg.n == 300
        assert cfg.estimators == ["hill", "kernel"]
        assert cfg.k_step == 5

    def test_unknown_key(self):
        with pytest.raises(ValidationError, match="unknown config key: colour"):
            parse_run_config({"colour": "red"})

    def test_nonpositive_gamma(self):
        with pytest.raises(ValidationError, match="gamma must be positive"):
            parse_run_config({"gamma.f": "0"})

    def test_nonpositive_zeta(self):
        with pytest.raises(ValidationError, match="zeta must be positive"):
            parse_run_config({"zeta.g": "-1"})

    def test_missing_value(self):
        with pytest.raises(ValidationError, match="missing value"):
            parse_run_config({"n": ""})

    def test_bad_number(self):
        with pytest.raises(ValidationError, match="expected an integer"):
            parse_run_config({"n": "many"})

    def test_unknown_estimator(self):
        with pytest.raises(ValidationError, match="unknown estimator"):
            parse_run_config({"estimators": "hill,moment"})

    def test_bias_reduced_needs_source(self):
        with pytest.raises(ValidationError, match="beta1 or adaptive"):
            parse_run_config({"estimators": "bias-reduced"})

    def test_beta1_and_adaptive_exclusive(self):
        with pytest.raises(ValidationError, match="mutually exclusive"):
            parse_run_config({"beta1": "1", "adaptive": "true"})

    def test_k_range_checked(self):
        with pytest.raises(ValidationError, match="k_min/k_max"):
            parse_run_config({"n": "100", "k_max": "100"})

    def test_nu_range(self):
        with pytest.raises(ValidationError, match="nu"):
            parse_run_config({"nu": "0.7"})


class TestLoadRunConfig:
    def test_reads_key_value_file(self, tmp_dir):
        path = tmp_dir / "run.cfg"
        path.write_text("family.f=burr\ngamma.f=0.5\nreplications=10\nseed=7\n")
        cfg = load_run_config(path)
        assert cfg.replications == 10
        assert cfg.seed == 7

    def test_missing_file(self, tmp_dir):
        with pytest.raises(ValidationError, match="not found"):
            load_run_config(tmp_dir / "absent.cfg")


class TestThreads:
    def test_explicit(self):
        assert resolve_threads(3) == 3

    def test_zero_means_auto(self):
        assert resolve_threads(0) >= 1

    def test_negative(self):
        with pytest.raises(ValidationError):
            resolve_threads(-1)

    def test_environment_default(self, monkeypatch):
        monkeypatch.setenv("TAILKERNEL_THREADS", "3")
        assert resolve_threads(None) == 3
        monkeypatch.setenv("TAILKERNEL_THREADS", "")
        assert resolve_threads(None) == 1

    def test_malformed_environment(self, monkeypatch):
        monkeypatch.setenv("TAILKERNEL_THREADS", "four")
        with pytest.raises(ValidationError, match="TAILKERNEL_THREADS"):
            resolve_threads(None)


def test_adaptive_grid():
    assert len(ADAPTIVE_TAU1_GRID) == 26
    assert ADAPTIVE_TAU1_GRID[0] == -0.5
    assert ADAPTIVE_TAU1_GRID[-1] == -3.0
