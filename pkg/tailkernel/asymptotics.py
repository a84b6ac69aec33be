"""Asymptotic variance and bias constants, the asymptotic MSE and optimal k."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from tailkernel.errors import DomainError, NoOptimumError, Reason, Undefined, is_undefined
from tailkernel.estimators import Variant, kernel_estimator, phat
from tailkernel.kernels import (
    INDICATOR,
    Kernel,
    eta_integrals,
    moment,
    phi_indicator_closed_form,
    phi_optimal,
    power_integral,
    rho_from_etas,
    square_moment,
)
from tailkernel.logging_setup import logger
from tailkernel.models import CensoringScheme, CompositeTail, HallConstants, composite_tail, hall_constants
from tailkernel.survival import OrderedCensoredSample


@dataclass(frozen=True)
class AsymptoticContext:
    """Everything the limit theorems need about a censoring scheme."""
    gamma1: float
    p: float
    hall_F: HallConstants
    hall_G: HallConstants | None
    composite: CompositeTail
    alpha: float
    script_D: float

    @classmethod
    def from_scheme(cls, scheme: CensoringScheme) -> AsymptoticContext:
        hf = hall_constants(scheme.f_model)
        hg = hall_constants(scheme.g_model) if scheme.g_model is not None else None
        comp = composite_tail(scheme)
        alpha = hf.beta * comp.gamma
        gate = cls._gate(hf, hg)
        if gate and hf.D != 0 and math.isfinite(alpha):
            script_d = hf.D * comp.C ** (-alpha) / comp.p
        else:
            script_d = 0.0
        return cls(hf.gamma, comp.p, hf, hg, comp, alpha, script_d)

    @staticmethod
    def _gate(hf: HallConstants, hg: HallConstants | None) -> bool:
        return hg is None or hf.beta <= hg.beta

    @property
    def beta_gate(self) -> bool:
        """1{beta1 <= beta2}: the variable of interest drives the bias."""
        return self._gate(self.hall_F, self.hall_G)

    @property
    def tau1(self) -> float:
        return self.hall_F.tau


def _require_weak_censoring(p: float) -> None:
    if not p > 0.5:
        raise DomainError(f"p = {p:.4g} <= 1/2: the asymptotic variance is infinite")


def sigma2(kernel: Kernel, ctx: AsymptoticContext) -> float:
    """sigma_K^2 = gamma1^2 int s^(1-1/p) K(s)^2 ds."""
    _require_weak_censoring(ctx.p)
    return ctx.gamma1 ** 2 * square_moment(kernel, ctx.p)


def mean_bias_constant(kernel: Kernel, ctx: AsymptoticContext) -> float:
    """m_K = -1{beta1<=beta2} beta1 D1 C^(-gamma beta1) gamma1^2 int s^(beta1 gamma1) K(s) ds."""
    hf = ctx.hall_F
    if not ctx.beta_gate or hf.D == 0 or math.isinf(hf.beta):
        return 0.0
    t = hf.beta * ctx.gamma1
    scale = ctx.composite.C ** (-ctx.composite.gamma * hf.beta)
    return -hf.beta * hf.D * scale * ctx.gamma1 ** 2 * moment(kernel, t)


def worms_bias_constant(ctx: AsymptoticContext) -> float:
    """Bias constant of the Kaplan-Meier integral estimator as usually quoted.

    Equals p * mean_bias_constant(INDICATOR, ctx); the two agree only without
    censoring (p = 1).
    """
    hf = ctx.hall_F
    if not ctx.beta_gate or hf.D == 0 or math.isinf(hf.beta):
        return 0.0
    g = ctx.composite.gamma
    scale = ctx.composite.C ** (-g * hf.beta)
    return -(g ** 2) * hf.beta * hf.D * scale / ctx.p / (1.0 + hf.beta * g / ctx.p)


def sigma2_star(kernel: Kernel, ctx: AsymptoticContext) -> float:
    """Asymptotic variance of the bias-reduced estimator in its closed form.

    The closed form is stated with `rho`. `bias_reduced` weights its bracket
    with `correction_rho` instead, so its Monte-Carlo spread is wider than
    this constant.
    """
    _require_weak_censoring(ctx.p)
    tau1 = ctx.tau1
    if not math.isfinite(tau1):
        raise DomainError("the model has no second-order parameter")
    eta1, eta2, eta3 = eta_integrals(kernel, tau1)
    rho = rho_from_etas(eta1, eta2, eta3)
    lead = 1.0 + eta1 * rho

    def f(t):
        t = np.asarray(t, dtype=float)
        return (lead - rho * t ** (-tau1)) ** 2 * np.asarray(kernel(t)) ** 2

    return ctx.p * ctx.gamma1 ** 2 * power_integral(f, 1.0 - 1.0 / ctx.p)


def bias_cancellation_residual(kernel: Kernel, tau1: float) -> float:
    """(1 + eta1 rho) eta2 - rho eta3, which vanishes identically."""
    eta1, eta2, eta3 = eta_integrals(kernel, tau1)
    rho = rho_from_etas(eta1, eta2, eta3)
    return (1.0 + eta1 * rho) * eta2 - rho * eta3


# ---------------------------------------------------------------------------
# Asymptotic MSE and optimal k
# ---------------------------------------------------------------------------

def _amse_terms(kernel: Kernel, ctx: AsymptoticContext) -> tuple[float, float, float]:
    """(sigma^2/gamma1^2, m^2/gamma1^2, exponent 2 gamma beta*) in normalised units."""
    g2 = ctx.gamma1 ** 2
    exponent = 2.0 * ctx.composite.gamma * ctx.composite.beta_star
    return sigma2(kernel, ctx) / g2, mean_bias_constant(kernel, ctx) ** 2 / g2, exponent


def amse(kernel: Kernel, ctx: AsymptoticContext, k: int, n: int) -> float:
    """sigma_K^2 / k + (k/n)^(2 gamma beta*) m_K^2."""
    if not 1 <= k < n:
        raise DomainError("need 1 <= k < n")
    var, bias2, exponent = _amse_terms(kernel, ctx)
    tail = bias2 * (k / n) ** exponent if bias2 else 0.0
    return ctx.gamma1 ** 2 * (var / k + tail)


def argmin_amse(kernel: Kernel, ctx: AsymptoticContext, n: int) -> int:
    """Exhaustive minimiser of the asymptotic MSE over k = 1..n-1 (smallest on ties)."""
    if n < 2:
        raise DomainError("n must be at least 2")
    var, bias2, exponent = _amse_terms(kernel, ctx)
    ks = np.arange(1, n, dtype=float)
    curve = var / ks
    if bias2:
        curve = curve + bias2 * (ks / n) ** exponent
    return int(np.argmin(curve)) + 1


@dataclass(frozen=True)
class OptimalK:
    """Optimal number of upper order statistics.

    `k` uses the constant {2 a^3 D^2} that minimises the asymptotic MSE;
    `printed_k` uses {2 a^3 |D|^3}, kept for comparison. Both are clamped to
    [2, n-1]; `clamped` reports whether `k` was.
    """
    k: int
    printed_k: int
    raw: float
    clamped: bool


def _clamp(raw: float, n: int) -> tuple[int, bool]:
    k = math.floor(raw) if math.isfinite(raw) else n - 1
    clamped = not 2 <= k <= n - 1
    return min(max(k, 2), n - 1), clamped


def _require_bias(ctx: AsymptoticContext) -> None:
    _require_weak_censoring(ctx.p)
    if ctx.script_D == 0:
        raise NoOptimumError("no second-order bias (D = 0): the asymptotic MSE decreases in k")


def _optimal_k(phi: float, ctx: AsymptoticContext, n: int, label: str) -> OptimalK:
    a = ctx.alpha
    e = 1.0 / (2.0 * a + 1.0)
    scale = n ** (2.0 * a * e) * phi
    raw = scale * (2.0 * a ** 3 * ctx.script_D ** 2) ** (-e)
    printed_raw = scale * (2.0 * a ** 3 * abs(ctx.script_D) ** 3) ** (-e)
    k, clamped = _clamp(raw, n)
    printed_k, _ = _clamp(printed_raw, n)
    if clamped:
        logger.warning("%s optimal k %.1f clamped to %d (n=%d)", label, raw, k, n)
    if printed_k != k:
        logger.info("%s optimal k: %d (D^2 constant) vs %d (|D|^3 constant)", label, k, printed_k)
    return OptimalK(k, printed_k, raw, clamped)


def optimal_k_kernel(kernel: Kernel, ctx: AsymptoticContext, n: int) -> OptimalK:
    """Optimal k for the kernel estimator."""
    _require_bias(ctx)
    return _optimal_k(phi_optimal(kernel, ctx.p, ctx.alpha), ctx, n, kernel.name)


def optimal_k_worms(ctx: AsymptoticContext, n: int) -> OptimalK:
    """Optimal k for the indicator kernel, from the closed-form kernel factor."""
    _require_bias(ctx)
    return _optimal_k(phi_indicator_closed_form(ctx.p, ctx.alpha), ctx, n, "worms")


def optimal_k_ratio(kernel: Kernel, ctx: AsymptoticContext) -> float:
    """k*_K / k*_worms = Phi(K) / Phi(K1)."""
    _require_weak_censoring(ctx.p)
    return phi_optimal(kernel, ctx.p, ctx.alpha) / phi_optimal(INDICATOR, ctx.p, ctx.alpha)


# ---------------------------------------------------------------------------
# Plug-in interval
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Interval:
    estimate: float
    lower: float
    upper: float
    level: float


def asymptotic_interval(sample: OrderedCensoredSample, k: int, kernel: Kernel,
                        level: float = 0.95) -> Interval:
    """Normal interval gamma_hat +/- z sigma_hat / sqrt(k) from plug-in (gamma_hat, p_hat)."""
    if not 0 < level < 1:
        raise DomainError("level must lie in (0, 1)")
    gamma_hat = kernel_estimator(sample, k, kernel, Variant.SHIFTED)
    if is_undefined(gamma_hat):
        return Interval(gamma_hat, gamma_hat, gamma_hat, level)
    p_hat = phat(sample, k)
    if p_hat <= 0.5:
        missing = Undefined(Reason.OUT_OF_RANGE)
        return Interval(gamma_hat, missing, missing, level)
    sigma = abs(gamma_hat) * math.sqrt(square_moment(kernel, p_hat))
    half = stats.norm.ppf(0.5 + level / 2.0) * sigma / math.sqrt(k)
    return Interval(gamma_hat, gamma_hat - half, gamma_hat + half, level)
