"""Monte-Carlo engine: replicate censored samples, sweep estimators over k, aggregate."""

from __future__ import annotations

import asyncio
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
import pandas as pd

from tailkernel.asymptotics import AsymptoticContext, sigma2
from tailkernel.config import DEFAULT_K_MIN, DEFAULT_NU, RAW_STORAGE_LIMIT, TV_K_MIN, RunConfig
from tailkernel.errors import DomainError, TailKernelError, ValidationError
from tailkernel.estimators import EstimatorId, EstimatorPath, EstimatorSpec, estimator_path
from tailkernel.kernels import INDICATOR
from tailkernel.logging_setup import get_scenario_logger, logger
from tailkernel.models import CensoringScheme, Family, ParetoTypeModel, sample_censored
from tailkernel.selection import reiss_thomas
from tailkernel.survival import OrderedCensoredSample

SUMMARY_COLUMNS = ["scenario", "estimator", "kernel", "k", "mean", "bias", "mse",
                   "variance", "defined_count"]
SMOOTHNESS_COLUMNS = ["scenario", "estimator", "mean_tv"]
SELECTION_COLUMNS = ["scenario", "replication", "estimator", "kernel", "k_star", "estimate"]

# (gamma1, gamma2) per censoring strength; Burr models use zeta = 1
WEAK_CENSORING = (0.5, 1.0)      # p = 2/3
STRONG_CENSORING = (1.0, 0.5)    # p = 1/3
STANDARD_PAIRINGS = (
    (Family.BURR, Family.BURR),
    (Family.FRECHET, Family.FRECHET),
    (Family.BURR, Family.FRECHET),
    (Family.FRECHET, Family.BURR),
)


@dataclass(frozen=True)
class ScenarioConfig:
    """One simulation scenario."""
    name: str
    scheme: CensoringScheme
    n: int
    replications: int
    master_seed: int
    estimators: tuple[EstimatorSpec, ...]
    k_grid: tuple[int, ...]
    nu: float = DEFAULT_NU
    k_min: int = DEFAULT_K_MIN

    def __post_init__(self) -> None:
        if self.replications < 1:
            raise DomainError("replications must be at least 1")
        if self.n < 50:
            raise DomainError("n must be at least 50")
        if not self.estimators:
            raise DomainError("at least one estimator is required")
        if not self.k_grid or min(self.k_grid) < 2 or max(self.k_grid) > self.n - 1:
            raise DomainError("k_grid must be a non-empty subset of [2, n-1]")
        object.__setattr__(self, "k_grid", tuple(sorted(set(int(k) for k in self.k_grid))))

    @property
    def gamma1(self) -> float:
        return self.scheme.f_model.gamma


@dataclass
class SimulationSummary:
    """Per-cell moments, per-estimator smoothness and per-replication selections."""
    scenario: str
    gamma1: float
    cells: pd.DataFrame
    smoothness: pd.DataFrame
    selections: pd.DataFrame
    raw: np.ndarray | None = field(default=None, repr=False)

    def selection_table(self) -> pd.DataFrame:
        """Mean Reiss-Thomas k* and estimate per estimator."""
        grouped = self.selections.groupby(["estimator", "kernel"], sort=False)
        table = grouped[["k_star", "estimate"]].mean().reset_index()
        table.insert(0, "scenario", self.scenario)
        return table


@dataclass
class _Replication:
    index: int
    estimates: np.ndarray          # (estimators, k_grid)
    tv: np.ndarray                 # (estimators,)
    k_star: np.ndarray             # (estimators,)
    at_k_star: np.ndarray          # (estimators,)


def tv_smoothness(path: EstimatorPath, k_lo: int = TV_K_MIN, k_hi: int | None = None) -> float:
    """Sum of absolute differences between consecutive defined estimates with k_lo <= k <= k_hi."""
    ks, values = path.defined_pairs()
    inside = ks >= k_lo
    if k_hi is not None:
        inside &= ks <= k_hi
    values = values[inside]
    if values.size < 2:
        raise DomainError("total variation needs at least 2 defined estimates in the window")
    return float(np.sum(np.abs(np.diff(values))))


def _replicate(config: ScenarioConfig, index: int) -> _Replication:
    sample = OrderedCensoredSample.from_sample(
        sample_censored(config.scheme, config.n, config.master_seed, index)
    )
    m = len(config.estimators)
    estimates = np.full((m, len(config.k_grid)), np.nan)
    tv = np.full(m, np.nan)
    k_star = np.full(m, np.nan)
    at_k_star = np.full(m, np.nan)
    for e, spec in enumerate(config.estimators):
        try:
            path = estimator_path(sample, spec, config.k_grid)
        except TailKernelError as exc:
            logger.debug("%s replication %d: %s failed: %s", config.name, index,
                         spec.estimator.value, exc)
            continue
        estimates[e] = path.estimates
        try:
            tv[e] = tv_smoothness(path, k_hi=config.n // 2)
        except DomainError:
            pass
        try:
            sel = reiss_thomas(path, config.nu, config.k_min)
        except DomainError:
            continue
        k_star[e] = sel.k_star
        at_k_star[e] = sel.estimate
    return _Replication(index, estimates, tv, k_star, at_k_star)


class _Accumulator:
    """Index-ordered aggregation; keeps raw values up to RAW_STORAGE_LIMIT replications."""

    def __init__(self, config: ScenarioConfig) -> None:
        self.config = config
        shape = (len(config.estimators), len(config.k_grid))
        self.keep_raw = config.replications <= RAW_STORAGE_LIMIT
        self.raw: list[np.ndarray] = []
        self.count = np.zeros(shape)
        self.sum_dev = np.zeros(shape)
        self.sum_dev2 = np.zeros(shape)
        self.tv_sum = np.zeros(shape[0])
        self.tv_count = np.zeros(shape[0])
        self.selection_rows: list[dict] = []
        self.next_index = 0

    def add(self, rep: _Replication) -> None:
        if rep.index != self.next_index:
            raise RuntimeError("replications must be aggregated in index order")
        self.next_index += 1
        if self.keep_raw:
            self.raw.append(rep.estimates)
        else:
            defined = np.isfinite(rep.estimates)
            dev = np.where(defined, rep.estimates - self.config.gamma1, 0.0)
            self.count += defined
            self.sum_dev += dev
            self.sum_dev2 += dev * dev
        tv_defined = np.isfinite(rep.tv)
        self.tv_sum += np.where(tv_defined, rep.tv, 0.0)
        self.tv_count += tv_defined
        for e, spec in enumerate(self.config.estimators):
            self.selection_rows.append({
                "scenario": self.config.name,
                "replication": rep.index,
                "estimator": spec.estimator.value,
                "kernel": spec.kernel_label,
                "k_star": rep.k_star[e],
                "estimate": rep.at_k_star[e],
            })

    def _moments(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        if self.keep_raw:
            stack = np.stack(self.raw)                     # (R, estimators, k)
            defined = np.isfinite(stack)
            count = defined.sum(axis=0).astype(float)
            dev = np.where(defined, stack - self.config.gamma1, 0.0)
            safe = np.maximum(count, 1.0)
            bias = dev.sum(axis=0) / safe
            mse = (dev * dev).sum(axis=0) / safe
            centred = np.where(defined, dev - bias, 0.0)
            variance = (centred * centred).sum(axis=0) / safe
        else:
            count = self.count
            safe = np.maximum(count, 1.0)
            bias = self.sum_dev / safe
            mse = self.sum_dev2 / safe
            variance = np.maximum(mse - bias * bias, 0.0)
        empty = count == 0
        bias, mse, variance = (np.where(empty, np.nan, a) for a in (bias, mse, variance))
        return count, bias, mse, variance

    def summary(self) -> SimulationSummary:
        cfg = self.config
        count, bias, mse, variance = self._moments()
        rows = []
        for e, spec in enumerate(cfg.estimators):
            for j, k in enumerate(cfg.k_grid):
                rows.append({
                    "scenario": cfg.name,
                    "estimator": spec.estimator.value,
                    "kernel": spec.kernel_label,
                    "k": k,
                    "mean": bias[e, j] + cfg.gamma1,
                    "bias": bias[e, j],
                    "mse": mse[e, j],
                    "variance": variance[e, j],
                    "defined_count": int(count[e, j]),
                })
        smooth = [{
            "scenario": cfg.name,
            "estimator": spec.estimator.value,
            "mean_tv": self.tv_sum[e] / self.tv_count[e] if self.tv_count[e] else math.nan,
        } for e, spec in enumerate(cfg.estimators)]
        return SimulationSummary(
            scenario=cfg.name,
            gamma1=cfg.gamma1,
            cells=pd.DataFrame(rows, columns=SUMMARY_COLUMNS),
            smoothness=pd.DataFrame(smooth, columns=SMOOTHNESS_COLUMNS),
            selections=pd.DataFrame(self.selection_rows, columns=SELECTION_COLUMNS),
            raw=np.stack(self.raw) if self.keep_raw else None,
        )


async def run_scenario_async(config: ScenarioConfig, threads: int = 1) -> SimulationSummary:
    """Run every replication on a thread pool; results are aggregated by index."""
    if threads < 1:
        raise DomainError("threads must be at least 1")
    sc_logger = get_scenario_logger(config.name)
    sc_logger.info("start: scheme=%s n=%d R=%d seed=%d threads=%d",
                   config.scheme.label(), config.n, config.replications,
                   config.master_seed, threads)
    acc = _Accumulator(config)
    chunk = RAW_STORAGE_LIMIT
    loop = asyncio.get_running_loop()
    with ThreadPoolExecutor(max_workers=threads) as pool:
        for start in range(0, config.replications, chunk):
            stop = min(start + chunk, config.replications)
            futures = [loop.run_in_executor(pool, _replicate, config, r)
                       for r in range(start, stop)]
            for rep in await asyncio.gather(*futures):
                acc.add(rep)
            sc_logger.info("replications %d/%d done", stop, config.replications)
    summary = acc.summary()
    sc_logger.info("finished")
    return summary


def run_scenario(config: ScenarioConfig, threads: int = 1) -> SimulationSummary:
    """Synchronous wrapper around run_scenario_async."""
    return asyncio.run(run_scenario_async(config, threads))


# ---------------------------------------------------------------------------
# Diagnostics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NormalityCheck:
    empirical_variance: float
    reference_sigma2: float
    ratio: float


def normality_check(config: ScenarioConfig, k: int, threads: int = 1) -> NormalityCheck:
    """Compare the spread of sqrt(k)(gamma_hat - gamma1) with sigma_K^2.

    The Kaplan-Meier integral estimator is the indicator-kernel member of the
    family, so its reference is sigma^2 of the indicator kernel.
    """
    if len(config.estimators) != 1:
        raise DomainError("normality_check takes a single estimator")
    spec = config.estimators[0]
    if spec.estimator not in (EstimatorId.KERNEL, EstimatorId.WORMS):
        raise DomainError("normality_check applies to the kernel estimator")
    kernel = INDICATOR if spec.estimator is EstimatorId.WORMS else spec.kernel
    reference = sigma2(kernel, AsymptoticContext.from_scheme(config.scheme))
    summary = run_scenario(replace(config, k_grid=(k,)), threads)
    row = summary.cells.iloc[0]
    if row["defined_count"] < 2:
        raise DomainError("too few defined replications for a variance")
    empirical = k * float(row["variance"])
    return NormalityCheck(empirical, reference, empirical / reference)


# ---------------------------------------------------------------------------
# Scenario construction
# ---------------------------------------------------------------------------

def _model(family: Family, gamma: float, zeta: float = 1.0) -> ParetoTypeModel:
    return ParetoTypeModel(family, gamma, zeta if family is Family.BURR else 1.0)


def standard_scenarios(n: int, replications: int, seed: int,
                       estimators: tuple[EstimatorSpec, ...],
                       k_grid: tuple[int, ...] | None = None,
                       nu: float = DEFAULT_NU, k_min: int = DEFAULT_K_MIN) -> list[ScenarioConfig]:
    """The four family pairings, each under weak (p = 2/3) and strong (p = 1/3) censoring."""
    grid = k_grid if k_grid is not None else tuple(range(2, n))
    scenarios = []
    for f_family, g_family in STANDARD_PAIRINGS:
        for strength, (g1, g2) in (("weak", WEAK_CENSORING), ("strong", STRONG_CENSORING)):
            scheme = CensoringScheme(_model(f_family, g1), _model(g_family, g2))
            name = f"{f_family.value}-{g_family.value}-{strength}"
            scenarios.append(ScenarioConfig(name, scheme, n, replications, seed,
                                            estimators, grid, nu, k_min))
    return scenarios


def scenarios_from_run_config(cfg: RunConfig) -> list[ScenarioConfig]:
    """Expand a validated RunConfig into scenario configs."""
    try:
        specs = tuple(
            EstimatorSpec.from_names(e, cfg.kernel, cfg.bab_kernel, cfg.variant,
                                     cfg.beta1, cfg.adaptive)
            for e in cfg.estimators
        )
    except DomainError as exc:
        raise ValidationError(str(exc)) from None
    k_max = cfg.k_max if cfg.k_max is not None else cfg.n - 1
    grid = tuple(range(2, k_max + 1, cfg.k_step))
    if cfg.scenarios == "standard":
        return standard_scenarios(cfg.n, cfg.replications, cfg.seed, specs, grid,
                                  cfg.nu, cfg.k_min)
    f_model = _model(Family(cfg.family_f), cfg.gamma_f, cfg.zeta_f)
    g_model = None if cfg.uncensored else _model(Family(cfg.family_g), cfg.gamma_g, cfg.zeta_g)
    scheme = CensoringScheme(f_model, g_model)
    return [ScenarioConfig(cfg.name, scheme, cfg.n, cfg.replications, cfg.seed,
                           specs, grid, cfg.nu, cfg.k_min)]
