"""Reiss-Thomas choice of the number of upper order statistics."""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from tailkernel.config import DEFAULT_K_MIN, DEFAULT_NU
from tailkernel.errors import DomainError
from tailkernel.estimators import EstimatorPath


class RunningMedian:
    """Lower median of a growing multiset (two heaps).

    Each heap also keeps the sums of weights and weighted values of its items,
    so the weighted absolute deviation about the median is O(1) after a push.
    """

    def __init__(self) -> None:
        self._low: list[tuple[float, float]] = []    # (-x, w), max-heap, holds ceil(m/2) items
        self._high: list[tuple[float, float]] = []   # (x, w)
        self._low_w = self._low_wx = 0.0
        self._high_w = self._high_wx = 0.0

    def __len__(self) -> int:
        return len(self._low) + len(self._high)

    def _push_low(self, x: float, w: float) -> None:
        heapq.heappush(self._low, (-x, w))
        self._low_w += w
        self._low_wx += w * x

    def _push_high(self, x: float, w: float) -> None:
        heapq.heappush(self._high, (x, w))
        self._high_w += w
        self._high_wx += w * x

    def push(self, x: float, weight: float = 1.0) -> None:
        if self._low and x > -self._low[0][0]:
            self._push_high(x, weight)
        else:
            self._push_low(x, weight)
        if len(self._low) > len(self._high) + 1:
            neg, w = heapq.heappop(self._low)
            self._low_w -= w
            self._low_wx += w * neg
            self._push_high(-neg, w)
        elif len(self._high) > len(self._low):
            x_up, w = heapq.heappop(self._high)
            self._high_w -= w
            self._high_wx -= w * x_up
            self._push_low(x_up, w)

    def median(self) -> float:
        if not self._low:
            raise DomainError("median of an empty set")
        return -self._low[0][0]

    def abs_deviation(self) -> float:
        """sum_i w_i |x_i - median|."""
        m = self.median()
        return (m * self._low_w - self._low_wx) + (self._high_wx - m * self._high_w)


@dataclass(frozen=True)
class SelectionResult:
    k_star: int
    k_values: np.ndarray
    criterion_values: np.ndarray
    nu: float
    estimate: float


def reiss_thomas(path: EstimatorPath, nu: float = DEFAULT_NU, k_min: int = DEFAULT_K_MIN,
                 k_max: int | None = None) -> SelectionResult:
    """Minimise (1/k) sum_{i<=k} i^nu |gamma_i - median(gamma_1..gamma_k)| over k.

    Undefined entries are left out of both the median and the sum, and are never
    candidates. Ties go to the smallest k.
    """
    if not 0.0 <= nu <= 0.5:
        raise DomainError("nu must lie in [0, 1/2]")
    ks, values = path.defined_pairs()
    if ks.size < 3:
        raise DomainError("Reiss-Thomas selection needs at least 3 defined estimates")
    upper = int(ks[-1]) if k_max is None else k_max
    weights = ks.astype(float) ** nu

    # centred on the first value so that a flat path scores exactly zero
    origin = float(values[0])
    running = RunningMedian()
    cand_k: list[int] = []
    cand_crit: list[float] = []
    for k, x, w in zip(ks, values, weights):
        running.push(float(x) - origin, float(w))
        if not k_min <= k <= upper:
            continue
        cand_k.append(int(k))
        cand_crit.append(running.abs_deviation() / k)

    if not cand_k:
        raise DomainError(f"no defined estimate with k in [{k_min}, {upper}]")
    crit_arr = np.asarray(cand_crit)
    best = int(np.argmin(crit_arr))
    k_star = cand_k[best]
    return SelectionResult(
        k_star=k_star,
        k_values=np.asarray(cand_k, dtype=np.int64),
        criterion_values=crit_arr,
        nu=nu,
        estimate=float(values[np.searchsorted(ks, k_star)]),
    )
