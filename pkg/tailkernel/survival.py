"""Order statistics and Kaplan-Meier product-limit curves for F and G."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from tailkernel.config import KM_LOG_SPACE_THRESHOLD
from tailkernel.errors import DomainError
from tailkernel.models import CensoredSample


@dataclass(frozen=True)
class OrderedCensoredSample:
    """z ascending with concomitant indicators delta_(i) carried along.

    Ties are broken by delta descending (uncensored before censored).
    """
    z_sorted: np.ndarray
    delta_concomitant: np.ndarray

    @classmethod
    def from_sample(cls, sample: CensoredSample) -> OrderedCensoredSample:
        order = sample.sorted_order()
        return cls(sample.z[order], sample.delta[order])

    @classmethod
    def from_arrays(cls, z, delta) -> OrderedCensoredSample:
        return cls.from_sample(CensoredSample(np.asarray(z, dtype=float), np.asarray(delta)))

    @property
    def n(self) -> int:
        return int(self.z_sorted.size)

    def top(self, j: int) -> float:
        """Z_{n-j:n}, the (j+1)-th largest observation (j = 0 is the maximum)."""
        return float(self.z_sorted[self.n - 1 - j])

    def complemented(self) -> OrderedCensoredSample:
        """Same z with delta -> 1 - delta (the order is kept as is)."""
        return OrderedCensoredSample(self.z_sorted, 1 - self.delta_concomitant)

    @cached_property
    def log_z(self) -> np.ndarray:
        return np.log(self.z_sorted)

    @cached_property
    def km_values(self) -> np.ndarray:
        """Kaplan-Meier survival of F at each order statistic (shared by estimators)."""
        return km_survival_F(self).at_order_statistics()


@dataclass(frozen=True)
class SurvivalCurve:
    """Right-continuous step function with jumps at `knots`, 0 from the last knot on."""
    knots: np.ndarray
    values: np.ndarray

    def __call__(self, t):
        """Evaluate at t (scalar or array)."""
        t_arr = np.asarray(t, dtype=float)
        m = np.searchsorted(self.knots, t_arr, side="right")
        out = self._lookup(m)
        out = np.where(t_arr >= self.knots[-1], 0.0, out)
        return float(out) if out.ndim == 0 else out

    def left_limit(self, t):
        """Evaluate the limit from below, S(t-)."""
        t_arr = np.asarray(t, dtype=float)
        m = np.searchsorted(self.knots, t_arr, side="left")
        out = self._lookup(m)
        out = np.where(t_arr > self.knots[-1], 0.0, out)
        return float(out) if out.ndim == 0 else out

    def _lookup(self, m: np.ndarray) -> np.ndarray:
        padded = np.concatenate(([1.0], self.values))
        return padded[m]

    def at_order_statistics(self) -> np.ndarray:
        """S(Z_{i:n}) for i = 1..n, respecting ties."""
        return np.asarray(self(self.knots), dtype=float)

    def last_positive_index(self) -> int:
        """Largest 1-based i with S(Z_{i:n}) > 0, or 0 if none."""
        positive = np.nonzero(self.at_order_statistics() > 0)[0]
        return int(positive[-1]) + 1 if positive.size else 0


def _product_limit(z_sorted: np.ndarray, jumps: np.ndarray) -> SurvivalCurve:
    n = z_sorted.size
    if n == 0:
        raise DomainError("Kaplan-Meier curve of an empty sample")
    at_risk = n - np.arange(n, dtype=float)
    factors = 1.0 - jumps / at_risk
    if n > KM_LOG_SPACE_THRESHOLD:
        with np.errstate(divide="ignore"):
            values = np.exp(np.cumsum(np.log(factors)))
    else:
        values = np.cumprod(factors)
    values[-1] = 0.0
    return SurvivalCurve(knots=z_sorted, values=values)


def km_survival_F(sample: OrderedCensoredSample) -> SurvivalCurve:
    """Kaplan-Meier estimate of the survival of the variable of interest."""
    return _product_limit(sample.z_sorted, sample.delta_concomitant.astype(float))


def km_survival_G(sample: OrderedCensoredSample) -> SurvivalCurve:
    """Kaplan-Meier estimate of the censoring survival (roles of delta swapped)."""
    return _product_limit(sample.z_sorted, 1.0 - sample.delta_concomitant.astype(float))


def subdistribution_H1(sample: OrderedCensoredSample, z: float) -> float:
    """Empirical P(Z <= z, delta = 1)."""
    m = np.searchsorted(sample.z_sorted, z, side="right")
    return float(sample.delta_concomitant[:m].sum()) / sample.n


def verify_km_jump_identity(sample: OrderedCensoredSample, k: int) -> float:
    """Max residual of F(Z_{n-j}) - F(Z_{n-j+1}) = delta_(n-j+1) / (n G(Z_{n-j})), j = 1..k.

    Terms where G(Z_{n-j}) = 0 are skipped, as is j = 1 when the largest
    observation is censored: the curve is forced to 0 at Z_{n:n} whatever the
    top indicator, so the jump there is not a product-limit jump.
    Returns 0.0 when no term applies.
    """
    n = sample.n
    if not 1 <= k <= n - 1:
        raise DomainError("need 1 <= k <= n-1")
    f_curve = km_survival_F(sample)
    g_curve = km_survival_G(sample)
    f_at = f_curve.at_order_statistics()
    g_at = g_curve.at_order_statistics()
    delta = sample.delta_concomitant

    worst = 0.0
    for j in range(1, k + 1):
        lower = n - j - 1          # 0-based index of Z_{n-j:n}
        upper = n - j              # 0-based index of Z_{n-j+1:n}
        if g_at[lower] <= 0:
            continue
        if j == 1 and delta[upper] == 0:
            continue
        lhs = f_at[lower] - f_at[upper]
        rhs = delta[upper] / (n * g_at[lower])
        worst = max(worst, abs(lhs - rhs))
    return worst


def max_ratio_increment(curve: SurvivalCurve, k: int) -> float:
    """max over 1 <= j <= k of [S(Z_{n-j}) - S(Z_{n-j+1})] / S(Z_{n-k})."""
    at = curve.at_order_statistics()
    n = at.size
    if not 1 <= k <= n - 1:
        raise DomainError("need 1 <= k <= n-1")
    base = at[n - 1 - k]
    if base <= 0:
        return float("nan")
    lower = at[n - 1 - k: n - 1]       # Z_{n-k:n} .. Z_{n-1:n}
    upper = at[n - k: n]               # Z_{n-k+1:n} .. Z_{n:n}
    return float(np.max(lower - upper) / base)
