"""Kernel families, their derivatives, and the weighted integrals built on them.

Integrals are computed numerically through one entry point, `power_integral`,
which handles the s**a endpoint factor by the substitution s = v**q. Two rules
are available: "adaptive" (scipy QUADPACK, absolute tolerance 1e-10) and
"fixed" (50-point Gauss-Legendre), the latter serving as a cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Callable, Literal

import numpy as np
from scipy import integrate

from tailkernel.config import FIXED_RULE_ORDER, QUAD_ABS_TOL, QUAD_LIMIT, SINGULAR_TOL
from tailkernel.errors import DomainError, NumericalError, SingularityError
from tailkernel.logging_setup import logger

Rule = Literal["adaptive", "fixed"]


class KernelId(str, Enum):
    INDICATOR = "indicator"
    BIWEIGHT = "biweight"
    TRIWEIGHT = "triweight"
    QUADWEIGHT = "quadweight"


# (power m, normalising constant c) of c (1 - s^2)^m
_POLY = {
    KernelId.BIWEIGHT: (2, 15.0 / 8.0),
    KernelId.TRIWEIGHT: (3, 35.0 / 16.0),
    KernelId.QUADWEIGHT: (4, 315.0 / 128.0),
}


def _out(arr: np.ndarray):
    return float(arr) if arr.ndim == 0 else arr


@dataclass(frozen=True)
class Kernel:
    """A kernel K on [0, 1) with K(s) = 0 elsewhere.

    The indicator kernel has no bounded derivatives at its jump; its derivative
    accessors return 0 and nothing on the estimator side needs them.
    """
    id: KernelId

    @property
    def name(self) -> str:
        return self.id.value

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        inside = (s >= 0) & (s < 1)
        if self.id is KernelId.INDICATOR:
            return _out(np.where(inside, 1.0, 0.0))
        m, c = _POLY[self.id]
        return _out(np.where(inside, c * (1.0 - s * s) ** m, 0.0))

    def d1(self, s):
        s = np.asarray(s, dtype=float)
        inside = (s >= 0) & (s < 1)
        if self.id is KernelId.INDICATOR:
            return _out(np.zeros_like(s))
        m, c = _POLY[self.id]
        return _out(np.where(inside, -2.0 * c * m * s * (1.0 - s * s) ** (m - 1), 0.0))

    def d2(self, s):
        s = np.asarray(s, dtype=float)
        inside = (s >= 0) & (s < 1)
        if self.id is KernelId.INDICATOR:
            return _out(np.zeros_like(s))
        m, c = _POLY[self.id]
        u = 1.0 - s * s
        val = c * (4.0 * m * (m - 1) * s * s * u ** (m - 2) - 2.0 * m * u ** (m - 1))
        return _out(np.where(inside, val, 0.0))

    def gk(self, s):
        """g_K(s) = s K(s)."""
        s = np.asarray(s, dtype=float)
        return _out(s * np.asarray(self(s)))

    def gk_d1(self, s):
        """g_K'(s) = K(s) + s K'(s)."""
        s = np.asarray(s, dtype=float)
        return _out(np.asarray(self(s)) + s * np.asarray(self.d1(s)))

    def weight(self, s):
        """K on the closed interval [0, 1], taking K(1) as the limit from the left.

        Kaplan-Meier ratios reach exactly 1 at the threshold; with this value the
        indicator kernel reproduces the unit weights of the Kaplan-Meier
        integral estimators, and the polynomial kernels are unaffected.
        """
        s = np.asarray(s, dtype=float)
        at_one = s == 1.0
        limit = 1.0 if self.id is KernelId.INDICATOR else 0.0
        return _out(np.where(at_one, limit, np.asarray(self(s))))

    def weighted(self, s):
        """s * weight(s), the closed-interval g_K."""
        s = np.asarray(s, dtype=float)
        return _out(s * np.asarray(self.weight(s)))


class BabKernelId(str, Enum):
    BAB0 = "bab0"
    BAB1 = "bab1"
    BAB2 = "bab2"


@dataclass(frozen=True)
class BabKernel:
    """Two-argument kernels K(s, p) normalised by p * int_0^1 K(s, p) ds = 1."""
    id: BabKernelId

    @property
    def name(self) -> str:
        return self.id.value

    def is_limit_case(self, p: float) -> bool:
        """True where bab2 falls back on its p -> 1 limit log(1/s)."""
        return self.id is BabKernelId.BAB2 and p == 1.0

    def __call__(self, s, p: float):
        s = np.asarray(s, dtype=float)
        if np.any((s <= 0) | (s > 1)):
            raise DomainError("BAB kernels are defined for s in (0, 1]")
        if not 0 < p <= 1:
            raise DomainError("BAB kernels are defined for p in (0, 1]")
        if self.id is BabKernelId.BAB0:
            return _out(-np.log(s) / p)
        if self.id is BabKernelId.BAB1:
            return _out(s ** (p - 1.0))
        if p == 1.0:
            logger.debug("bab2 evaluated at p = 1: using the limit log(1/s)")
            return _out(-np.log(s))
        return _out(np.expm1((p - 1.0) * np.log(s)) / (1.0 - p))


_KERNELS = {k.value: Kernel(k) for k in KernelId}
_BAB_KERNELS = {k.value: BabKernel(k) for k in BabKernelId}

INDICATOR = _KERNELS["indicator"]
BIWEIGHT = _KERNELS["biweight"]
TRIWEIGHT = _KERNELS["triweight"]
QUADWEIGHT = _KERNELS["quadweight"]


def get_kernel(name: str) -> Kernel:
    """Look up a kernel by its CLI/config id."""
    try:
        return _KERNELS[name]
    except KeyError:
        raise DomainError(f"unknown kernel {name!r}") from None


def get_bab_kernel(name: str) -> BabKernel:
    """Look up a BAB kernel by its CLI/config id."""
    try:
        return _BAB_KERNELS[name]
    except KeyError:
        raise DomainError(f"unknown BAB kernel {name!r}") from None


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------

@lru_cache(maxsize=4)
def _gauss_legendre_unit(order: int) -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = np.polynomial.legendre.leggauss(order)
    return 0.5 * (nodes + 1.0), 0.5 * weights


def integrate_unit(f: Callable, rule: Rule = "adaptive") -> float:
    """Integral of f over [0, 1]."""
    if rule == "fixed":
        nodes, weights = _gauss_legendre_unit(FIXED_RULE_ORDER)
        return float(np.dot(weights, np.asarray(f(nodes), dtype=float)))
    value, abserr = integrate.quad(
        lambda v: float(f(v)), 0.0, 1.0,
        epsabs=QUAD_ABS_TOL, epsrel=1e-12, limit=QUAD_LIMIT,
    )
    if not math.isfinite(value):
        raise NumericalError("quadrature returned a non-finite value")
    if abserr > 100 * QUAD_ABS_TOL:
        logger.warning("quadrature error estimate %.3g above tolerance", abserr)
    return float(value)


def _substitution_power(a: float) -> float:
    # s = v**q turns s**a ds into q v**(q(a+1)-1) dv
    if a < 0:
        return 1.0 / (a + 1.0)
    if a < 4:
        return 5.0 / (a + 1.0)
    return 1.0


def power_integral(f: Callable, a: float, rule: Rule = "adaptive",
                   log_power: int = 0) -> float:
    """int_0^1 s**a (log s)**log_power f(s) ds for a > -1 and smooth f."""
    if a <= -1:
        raise DomainError("power integral diverges for a <= -1")
    q = _substitution_power(a)
    b = q * (a + 1.0) - 1.0

    def integrand(v):
        v = np.asarray(v, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            s = v ** q
            vals = q * v ** b * np.asarray(f(s), dtype=float)
            if log_power:
                vals = vals * (q * np.log(v)) ** log_power
        return np.where(v > 0, vals, 0.0) if b > 0 or log_power else vals

    return integrate_unit(integrand, rule)


# ---------------------------------------------------------------------------
# Kernel integrals
# ---------------------------------------------------------------------------

def kernel_mass(kernel: Kernel, rule: Rule = "adaptive") -> float:
    """int_0^1 K(s) ds (1 for every admissible kernel)."""
    return power_integral(kernel, 0.0, rule)


def moment(kernel: Kernel, a: float, rule: Rule = "adaptive") -> float:
    """int_0^1 s**a K(s) ds."""
    return power_integral(kernel, a, rule)


def square_moment(kernel: Kernel, p: float, rule: Rule = "adaptive") -> float:
    """int_0^1 s**(1 - 1/p) K(s)**2 ds, finite for p > 1/2."""
    if not p > 0.5:
        raise DomainError("p must exceed 1/2 (the variance integral diverges)")
    return power_integral(lambda s: np.asarray(kernel(s)) ** 2, 1.0 - 1.0 / p, rule)


def eta_integrals(kernel: Kernel, tau1: float,
                  rule: Rule = "adaptive") -> tuple[float, float, float]:
    """(eta1, eta2, eta3) at the second-order parameter tau1 < 0."""
    if tau1 > 0:
        raise DomainError("tau1 must be negative")
    if tau1 == 0:
        logger.warning("eta integrals requested at tau1 = 0 (degenerate second order)")
    a = -tau1
    eta2 = power_integral(kernel, a, rule)
    log_term = power_integral(kernel, a, rule, log_power=1)
    eta1 = eta2 - tau1 * log_term
    eta3 = eta2 - power_integral(kernel, 2.0 * a, rule)
    return eta1, eta2, eta3


def rho_from_etas(eta1: float, eta2: float, eta3: float) -> float:
    denom = eta3 / eta2 - eta1
    if abs(denom) < SINGULAR_TOL:
        raise SingularityError("rho(tau1) is singular: eta3/eta2 - eta1 = 0")
    return 1.0 / denom


def rho(kernel: Kernel, tau1: float, rule: Rule = "adaptive") -> float:
    """rho(tau1) = 1 / (eta3/eta2 - eta1)."""
    return rho_from_etas(*eta_integrals(kernel, tau1, rule))


def t_bias_factor(eta2: float, eta3: float) -> float:
    """int_0^1 (2 s**(-2 tau1) - s**(-tau1)) K(s) ds = eta2 - 2 eta3.

    Second-order bias factor of the T statistic at omega = -tau1/gamma1, in
    the units where the kernel estimator's own bias factor is eta2.
    """
    return eta2 - 2.0 * eta3


def correction_rho_from_etas(eta1: float, eta2: float, eta3: float) -> float:
    """eta2 / (eta2 - 2 eta3 - eta1 eta2).

    Weight on T - gamma_hat * eta2 that cancels the first-order bias of the
    kernel estimate: the bracket carries A (eta2 - 2 eta3) from T and
    A eta1 eta2 from the plug-in eta2 at tau1 = -beta1 gamma_hat. It agrees
    with `rho` only where eta3 = eta2 - 2 eta3, e.g. the indicator kernel at
    tau1 = -1.
    """
    denom = t_bias_factor(eta2, eta3) - eta1 * eta2
    if abs(denom) < SINGULAR_TOL:
        raise SingularityError("bias correction is singular: eta2 - 2 eta3 - eta1 eta2 = 0")
    return eta2 / denom


def correction_rho(kernel: Kernel, tau1: float, rule: Rule = "adaptive") -> float:
    return correction_rho_from_etas(*eta_integrals(kernel, tau1, rule))


def bias_ratio_g(kernel: Kernel, t: float, rule: Rule = "adaptive") -> float:
    """|m_K| / |m| = (1 + t) int_0^1 s**t K(s) ds for t = beta1 gamma1 > 0."""
    if not 0 <= t < math.inf:
        raise DomainError("t must be positive and finite")
    return (1.0 + t) * moment(kernel, t, rule)


def variance_ratio_h(kernel: Kernel, p: float, rule: Rule = "adaptive") -> float:
    """sigma_K^2 / sigma^2 = ((2p - 1)/p) int_0^1 s**(1 - 1/p) K(s)**2 ds."""
    return (2.0 * p - 1.0) / p * square_moment(kernel, p, rule)


def phi_optimal(kernel: Kernel, p: float, alpha: float, rule: Rule = "adaptive") -> float:
    """Kernel factor Phi(K) of the optimal number of upper order statistics."""
    if not 0 < alpha < math.inf:
        raise DomainError("alpha must be positive and finite")
    e = 1.0 / (2.0 * alpha + 1.0)
    return square_moment(kernel, p, rule) ** e * moment(kernel, alpha / p, rule) ** (-2.0 * e)


def phi_indicator_closed_form(p: float, alpha: float) -> float:
    """Phi(K1) = (p/(2p-1))**(1/(2a+1)) (a/p + 1)**(2/(2a+1))."""
    if not p > 0.5:
        raise DomainError("p must exceed 1/2")
    e = 1.0 / (2.0 * alpha + 1.0)
    return (p / (2.0 * p - 1.0)) ** e * (alpha / p + 1.0) ** (2.0 * e)


def bab_normalisation(kernel: BabKernel, p: float, rule: Rule = "adaptive") -> float:
    """p * int_0^1 K(s, p) ds, which should equal 1.

    Integrated from the kernel's own evaluation; the s**(p-1) endpoint factor
    of the power kernels is handed to `power_integral`.
    """
    if not 0 < p <= 1:
        raise DomainError("BAB kernels are defined for p in (0, 1]")
    if kernel.id is BabKernelId.BAB0 or kernel.is_limit_case(p):
        return p * power_integral(lambda s: kernel(s, p), 0.0, rule)
    a = p - 1.0
    return p * power_integral(lambda s: np.asarray(kernel(s, p)) * np.asarray(s) ** -a, a, rule)
