"""Tail-index estimators for complete and right-censored samples.

Indexing follows the order statistics from the top: for a sample of size n,
Z_{n-j:n} is the (j+1)-th largest observation, and the log-spacing
L_j = log(Z_{n-j+1:n} / Z_{n-j:n}) for j = 1..k. Estimators that can fail
on a particular sample (fully censored tail, singular correction) return an
`Undefined` sentinel rather than raising, so a k-sweep never aborts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Iterable, Mapping

import numpy as np

from tailkernel.config import ADAPTIVE_K_STEP, ADAPTIVE_MIN_POINTS, ADAPTIVE_TAU1_GRID
from tailkernel.errors import (
    DomainError,
    NumericalError,
    Reason,
    SingularityError,
    Undefined,
    is_undefined,
)
from tailkernel.kernels import (
    BabKernel,
    Kernel,
    TRIWEIGHT,
    correction_rho_from_etas,
    eta_integrals,
    get_bab_kernel,
    get_kernel,
)
from tailkernel.logging_setup import logger
from tailkernel.survival import OrderedCensoredSample


class EstimatorId(str, Enum):
    HILL = "hill"
    CDM = "cdm"
    EFG = "efg"
    WORMS = "worms"
    WORMS_TILDE = "worms-tilde"
    KERNEL = "kernel"
    KERNEL_UNSHIFTED = "kernel-unshifted"
    BAB = "bab"
    BIAS_REDUCED = "bias-reduced"


class Variant(str, Enum):
    """Which order statistic enters the Kaplan-Meier ratio of the kernel weight."""
    SHIFTED = "shifted"       # F(Z_{n-j+1:n}), j = 2..k
    UNSHIFTED = "unshifted"   # F(Z_{n-j:n}),   j = 1..k


class Tau1Source(str, Enum):
    KNOWN_BETA1 = "known-beta1"
    ADAPTIVE = "adaptive"


# ---------------------------------------------------------------------------
# Configuration records
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BiasReductionConfig:
    """How the second-order parameter of the bias-reduced estimator is obtained."""
    kernel: Kernel
    tau1_source: Tau1Source = Tau1Source.ADAPTIVE
    beta1: float | None = None
    grid: tuple[float, ...] = ADAPTIVE_TAU1_GRID
    k_step: int = ADAPTIVE_K_STEP

    def __post_init__(self) -> None:
        if self.tau1_source is Tau1Source.KNOWN_BETA1:
            if self.beta1 is None or not self.beta1 > 0:
                raise DomainError("known beta1 must be positive")
        elif self.beta1 is not None:
            raise DomainError("beta1 is only used with a known-beta1 source")
        if not self.grid or any(t >= 0 for t in self.grid):
            raise DomainError("the tau1 grid must hold negative values")
        if self.k_step < 1:
            raise DomainError("k_step must be at least 1")

    @classmethod
    def known_beta1(cls, kernel: Kernel, beta1: float) -> BiasReductionConfig:
        return cls(kernel, Tau1Source.KNOWN_BETA1, beta1)

    @classmethod
    def adaptive_grid(cls, kernel: Kernel) -> BiasReductionConfig:
        return cls(kernel, Tau1Source.ADAPTIVE)


@dataclass(frozen=True)
class EstimatorSpec:
    """One estimator together with the kernels and options it needs."""
    estimator: EstimatorId
    kernel: Kernel = TRIWEIGHT
    bab: BabKernel = field(default_factory=lambda: get_bab_kernel("bab2"))
    variant: Variant = Variant.SHIFTED
    bias: BiasReductionConfig | None = None

    def __post_init__(self) -> None:
        if self.estimator is EstimatorId.BIAS_REDUCED and self.bias is None:
            raise DomainError("bias-reduced estimator needs a BiasReductionConfig")

    @classmethod
    def from_names(cls, estimator: str, kernel: str = "triweight", bab_kernel: str = "bab2",
                   variant: str = "shifted", beta1: float | None = None,
                   adaptive: bool = False) -> EstimatorSpec:
        """Build a spec from CLI/config strings."""
        try:
            est = EstimatorId(estimator)
            var = Variant(variant)
        except ValueError as exc:
            raise DomainError(str(exc)) from None
        k = get_kernel(kernel)
        bias = None
        if est is EstimatorId.BIAS_REDUCED:
            if beta1 is not None and adaptive:
                raise DomainError("beta1 and adaptive are mutually exclusive")
            if beta1 is not None:
                bias = BiasReductionConfig.known_beta1(k, beta1)
            elif adaptive:
                bias = BiasReductionConfig.adaptive_grid(k)
            else:
                raise DomainError("bias-reduced estimator needs beta1 or the adaptive grid")
        if est is EstimatorId.KERNEL_UNSHIFTED:
            var = Variant.UNSHIFTED
        return cls(est, k, get_bab_kernel(bab_kernel), var, bias)

    @property
    def kernel_label(self) -> str:
        """Kernel column value for CSV output ("none" for kernel-free estimators)."""
        if self.estimator in (EstimatorId.CDM, EstimatorId.KERNEL,
                              EstimatorId.KERNEL_UNSHIFTED, EstimatorId.BIAS_REDUCED):
            return self.kernel.name
        if self.estimator is EstimatorId.BAB:
            return self.bab.name
        return "none"


@dataclass(frozen=True)
class EstimatorPath:
    """Estimates of one estimator over an ascending grid of k."""
    estimator: str
    kernel: str
    k_values: np.ndarray
    estimates: np.ndarray
    reasons: tuple[Reason | None, ...]

    def __post_init__(self) -> None:
        k = np.asarray(self.k_values, dtype=np.int64)
        est = np.asarray(self.estimates, dtype=float)
        if k.ndim != 1 or k.shape != est.shape or len(self.reasons) != k.size:
            raise DomainError("k_values, estimates and reasons must have equal length")
        if k.size > 1 and np.any(np.diff(k) <= 0):
            raise DomainError("k_values must be strictly ascending")
        object.__setattr__(self, "k_values", k)
        object.__setattr__(self, "estimates", est)

    @property
    def defined(self) -> np.ndarray:
        return np.isfinite(self.estimates)

    @property
    def defined_count(self) -> int:
        return int(self.defined.sum())

    def value_at(self, k: int) -> float:
        idx = np.searchsorted(self.k_values, k)
        if idx >= self.k_values.size or self.k_values[idx] != k:
            raise DomainError(f"k={k} is not on this path")
        value = float(self.estimates[idx])
        reason = self.reasons[idx]
        return Undefined(reason) if reason is not None else value

    def defined_pairs(self) -> tuple[np.ndarray, np.ndarray]:
        mask = self.defined
        return self.k_values[mask], self.estimates[mask]


# ---------------------------------------------------------------------------
# Shared pieces
# ---------------------------------------------------------------------------

def _check_k(n: int, k: int) -> None:
    if not 2 <= k <= n - 1:
        raise DomainError(f"k must lie in [2, n-1] (k={k}, n={n})")


def _log_sorted(z_sorted) -> np.ndarray:
    z = np.asarray(z_sorted, dtype=float)
    if z.ndim != 1 or np.any(~np.isfinite(z)) or np.any(z <= 0):
        raise DomainError("every z must be positive and finite")
    return np.log(z)


def _spacings(logs: np.ndarray, k: int) -> np.ndarray:
    """L_1..L_k (index j-1)."""
    n = logs.size
    return (logs[n - k:n] - logs[n - 1 - k:n - 1])[::-1]


def _km_ratios(sample: OrderedCensoredSample, k: int, variant: Variant) -> np.ndarray | None:
    """Kaplan-Meier ratios r_j over the variant's j range, or None if F(Z_{n-k:n}) = 0."""
    s = sample.km_values
    n = sample.n
    base = s[n - 1 - k]
    if base <= 0:
        return None
    if variant is Variant.SHIFTED:
        return s[n - k:n - 1][::-1] / base
    return s[n - 1 - k:n - 1][::-1] / base


# ---------------------------------------------------------------------------
# Complete-sample estimators
# ---------------------------------------------------------------------------

def hill(z_sorted, k: int) -> float:
    """(1/k) sum_{i<=k} log(Z_{n-i+1:n} / Z_{n-k:n})."""
    logs = _log_sorted(z_sorted)
    _check_k(logs.size, k)
    n = logs.size
    return float(np.sum(logs[n - k:] - logs[n - 1 - k]) / k)


def hill_spacing_form(z_sorted, k: int) -> float:
    """(1/k) sum_{i<=k} i L_i; algebraically equal to `hill`."""
    logs = _log_sorted(z_sorted)
    _check_k(logs.size, k)
    weights = np.arange(1, k + 1, dtype=float)
    return float(np.dot(weights, _spacings(logs, k)) / k)


def cdm_kernel(z_sorted, k: int, kernel: Kernel) -> float:
    """sum_{i<=k} (i/(k+1)) K(i/(k+1)) L_i."""
    logs = _log_sorted(z_sorted)
    _check_k(logs.size, k)
    s = np.arange(1, k + 1, dtype=float) / (k + 1)
    return float(np.dot(kernel.gk(s), _spacings(logs, k)))


# ---------------------------------------------------------------------------
# Censored-sample estimators
# ---------------------------------------------------------------------------

def phat(sample: OrderedCensoredSample, k: int) -> float:
    """Proportion of uncensored observations among the top k."""
    if not 1 <= k <= sample.n:
        raise DomainError("need 1 <= k <= n")
    return float(sample.delta_concomitant[sample.n - k:].sum()) / k


def efg(sample: OrderedCensoredSample, k: int) -> float:
    """Hill estimator divided by the uncensored proportion."""
    h = hill(sample.z_sorted, k)
    p = phat(sample, k)
    if p == 0:
        return Undefined(Reason.FULLY_CENSORED)
    return h / p


def worms(sample: OrderedCensoredSample, k: int) -> float:
    """Kaplan-Meier integral estimator, shifted ratios, j = 2..k."""
    _check_k(sample.n, k)
    r = _km_ratios(sample, k, Variant.SHIFTED)
    if r is None:
        return Undefined(Reason.KM_TOP_ZERO)
    return float(np.dot(r, _spacings(sample.log_z, k)[1:]))


def worms_tilde(sample: OrderedCensoredSample, k: int) -> float:
    """Kaplan-Meier integral estimator, unshifted ratios, j = 1..k."""
    _check_k(sample.n, k)
    r = _km_ratios(sample, k, Variant.UNSHIFTED)
    if r is None:
        return Undefined(Reason.KM_TOP_ZERO)
    return float(np.dot(r, _spacings(sample.log_z, k)))


def kernel_estimator(sample: OrderedCensoredSample, k: int, kernel: Kernel,
                     variant: Variant = Variant.SHIFTED) -> float:
    """sum_j r_j K(r_j) L_j with Kaplan-Meier ratios r_j."""
    _check_k(sample.n, k)
    r = _km_ratios(sample, k, variant)
    if r is None:
        return Undefined(Reason.KM_TOP_ZERO)
    spacings = _spacings(sample.log_z, k)
    if variant is Variant.SHIFTED:
        spacings = spacings[1:]
    return float(np.dot(kernel.weighted(r), spacings))


def kernel_estimator_telescoped(sample: OrderedCensoredSample, k: int, kernel: Kernel) -> float:
    """Unshifted estimator by summation by parts.

    sum_{j<=k} [g(a_j) - g(a_{j-1})] log(Z_{n-j+1:n} / Z_{n-k:n}) with
    a_j = F(Z_{n-j:n}) / F(Z_{n-k:n}) and g(s) = s K(s); a_0 = 0 since the
    Kaplan-Meier curve vanishes at the maximum.
    """
    _check_k(sample.n, k)
    s = sample.km_values
    n = sample.n
    base = s[n - 1 - k]
    if base <= 0:
        return Undefined(Reason.KM_TOP_ZERO)
    a = s[n - 1 - k:n][::-1] / base                 # a_0 .. a_k
    g = np.asarray(kernel.weighted(a))
    logs = sample.log_z
    excess = logs[n - k:n][::-1] - logs[n - 1 - k]   # log(Z_{n-j+1}/Z_{n-k}), j = 1..k
    return float(np.dot(g[1:] - g[:-1], excess))


def bab_kernel_estimator(sample: OrderedCensoredSample, k: int, bab: BabKernel) -> float:
    """(1/k) sum_i K(i/(k+1), p_k) log(Z_{n-i+1:n}/Z_{n-k:n}) / log((k+1)/i)."""
    _check_k(sample.n, k)
    p = phat(sample, k)
    if p == 0:
        return Undefined(Reason.FULLY_CENSORED)
    i = np.arange(1, k + 1, dtype=float)
    s = i / (k + 1)
    logs = sample.log_z
    n = sample.n
    excess = logs[n - k:n][::-1] - logs[n - 1 - k]
    weights = np.asarray(bab(s, p)) / np.log((k + 1) / i)
    return float(np.dot(weights, excess) / k)


def t_statistic(sample: OrderedCensoredSample, k: int, omega: float, kernel: Kernel) -> float:
    """(1/w) sum_{j=2..k} r_j K(r_j) [(Z_{n-j:n}/Z_{n-k:n})^-w - (Z_{n-j+1:n}/Z_{n-k:n})^-w]."""
    if not omega > 0:
        raise DomainError("omega must be positive")
    _check_k(sample.n, k)
    r = _km_ratios(sample, k, Variant.SHIFTED)
    if r is None:
        return Undefined(Reason.KM_TOP_ZERO)
    logs = sample.log_z
    n = sample.n
    anchor = logs[n - 1 - k]
    upper = logs[n - k:n - 1][::-1] - anchor        # log(Z_{n-j+1}/Z_{n-k}), j = 2..k
    lower = logs[n - 1 - k:n - 2][::-1] - anchor    # log(Z_{n-j}/Z_{n-k}),   j = 2..k
    diff = np.exp(-omega * lower) * -np.expm1(-omega * (upper - lower)) / omega
    return float(np.dot(kernel.weighted(r), diff))


# ---------------------------------------------------------------------------
# Bias reduction
# ---------------------------------------------------------------------------

@lru_cache(maxsize=256)
def _grid_etas(kernel: Kernel, tau1: float) -> tuple[float, float, float]:
    return eta_integrals(kernel, tau1)


def _corrected(sample: OrderedCensoredSample, k: int, kernel: Kernel, gamma_hat: float,
               etas: tuple[float, float, float], omega: float) -> float:
    eta1, eta2, eta3 = etas
    try:
        rho_hat = correction_rho_from_etas(eta1, eta2, eta3)
    except SingularityError:
        return Undefined(Reason.RHO_SINGULAR)
    t = t_statistic(sample, k, omega, kernel)
    if is_undefined(t):
        return t
    return gamma_hat - rho_hat * (t - gamma_hat * eta2)


def bias_reduced(sample: OrderedCensoredSample, k: int, config: BiasReductionConfig,
                 tau1: float | None = None) -> float:
    """Kernel estimate minus its estimated second-order bias.

    With a known beta1 the second-order parameter is -beta1 * gamma_hat and the
    T statistic is taken at omega = beta1 directly. Otherwise `tau1` is used if
    given, else chosen by `adaptive_tau1` over k = 2..n-1.
    """
    gamma_hat = kernel_estimator(sample, k, config.kernel, Variant.SHIFTED)
    if is_undefined(gamma_hat):
        return gamma_hat
    if gamma_hat <= 0:
        return Undefined(Reason.NONPOSITIVE_ESTIMATE)
    if config.tau1_source is Tau1Source.KNOWN_BETA1:
        etas = eta_integrals(config.kernel, -config.beta1 * gamma_hat)
        return _corrected(sample, k, config.kernel, gamma_hat, etas, config.beta1)
    if tau1 is None:
        tau1 = adaptive_tau1(sample, config.kernel, range(2, sample.n), config)
    return _corrected(sample, k, config.kernel, gamma_hat, _grid_etas(config.kernel, tau1),
                      -tau1 / gamma_hat)


def select_tau1(paths: Mapping[float, np.ndarray]) -> float:
    """Grid value whose path has the smallest sum of squared deviations from its mean.

    Undefined entries are skipped; a path needs 2 defined entries to compete.
    Ties go to the most negative tau1.
    """
    best_tau, best_score = None, math.inf
    for tau in sorted(paths):
        values = np.asarray(paths[tau], dtype=float)
        values = values[np.isfinite(values)]
        if values.size < 2:
            continue
        score = float(np.sum((values - values.mean()) ** 2))
        if score < best_score:
            best_tau, best_score = tau, score
    if best_tau is None:
        raise NumericalError("every tau1 on the grid gave an undefined path")
    return best_tau


def adaptive_tau1(sample: OrderedCensoredSample, kernel: Kernel,
                  k_range: Iterable[int], config: BiasReductionConfig | None = None) -> float:
    """Pick tau1 from the grid by minimising the k-variability of the corrected path."""
    if config is None:
        config = BiasReductionConfig.adaptive_grid(kernel)
    ks = [int(k) for k in k_range]
    if len(ks) < ADAPTIVE_MIN_POINTS:
        raise DomainError(f"adaptive tau1 needs at least {ADAPTIVE_MIN_POINTS} values of k")
    if min(ks) < 2 or max(ks) > sample.n - 1:
        raise DomainError("k_range must lie in [2, n-1]")
    ks = ks[::config.k_step]

    gammas = [kernel_estimator(sample, k, kernel, Variant.SHIFTED) for k in ks]
    paths: dict[float, np.ndarray] = {}
    for tau in config.grid:
        etas = _grid_etas(kernel, tau)
        values = []
        for k, g in zip(ks, gammas):
            if is_undefined(g) or g <= 0:
                values.append(math.nan)
                continue
            values.append(_corrected(sample, k, kernel, g, etas, -tau / g))
        paths[tau] = np.asarray(values, dtype=float)
    chosen = select_tau1(paths)
    logger.debug("adaptive tau1 = %.2f over %d values of k", chosen, len(ks))
    return chosen


# ---------------------------------------------------------------------------
# Paths over k
# ---------------------------------------------------------------------------

def estimate(sample: OrderedCensoredSample, k: int, spec: EstimatorSpec,
             tau1: float | None = None) -> float:
    """Value of `spec` at a single k (possibly Undefined)."""
    est = spec.estimator
    if est is EstimatorId.HILL:
        return hill(sample.z_sorted, k)
    if est is EstimatorId.CDM:
        return cdm_kernel(sample.z_sorted, k, spec.kernel)
    if est is EstimatorId.EFG:
        return efg(sample, k)
    if est is EstimatorId.WORMS:
        return worms(sample, k)
    if est is EstimatorId.WORMS_TILDE:
        return worms_tilde(sample, k)
    if est is EstimatorId.KERNEL:
        return kernel_estimator(sample, k, spec.kernel, spec.variant)
    if est is EstimatorId.KERNEL_UNSHIFTED:
        return kernel_estimator(sample, k, spec.kernel, Variant.UNSHIFTED)
    if est is EstimatorId.BAB:
        return bab_kernel_estimator(sample, k, spec.bab)
    return bias_reduced(sample, k, spec.bias, tau1=tau1)


def estimator_path(sample: OrderedCensoredSample, spec: EstimatorSpec,
                   k_values: Iterable[int]) -> EstimatorPath:
    """Evaluate `spec` at every k; out-of-range k become undefined entries."""
    ks = np.asarray(sorted({int(k) for k in k_values}), dtype=np.int64)
    tau1 = None
    if spec.bias is not None and spec.bias.tau1_source is Tau1Source.ADAPTIVE \
            and spec.estimator is EstimatorId.BIAS_REDUCED:
        valid = [int(k) for k in ks if 2 <= k <= sample.n - 1]
        tau1 = adaptive_tau1(sample, spec.kernel, valid, spec.bias)

    estimates = np.empty(ks.size, dtype=float)
    reasons: list[Reason | None] = []
    for idx, k in enumerate(ks):
        if not 2 <= k <= sample.n - 1:
            value = Undefined(Reason.OUT_OF_RANGE)
        else:
            value = estimate(sample, int(k), spec, tau1=tau1)
            if not isinstance(value, Undefined) and not math.isfinite(value):
                value = Undefined(Reason.ZERO_DENOMINATOR)
        estimates[idx] = value
        reasons.append(value.reason if isinstance(value, Undefined) else None)
    return EstimatorPath(spec.estimator.value, spec.kernel_label, ks, estimates, tuple(reasons))
