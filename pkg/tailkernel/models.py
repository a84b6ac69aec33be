"""Pareto-type families, censoring schemes, Hall constants and censored sampling."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from tailkernel.errors import DomainError

# Substream ids inside one replication
_STREAM_LOW = 0
_STREAM_HIGH = 1


class Family(str, Enum):
    BURR = "burr"
    FRECHET = "frechet"
    EXACT_PARETO = "pareto"


@dataclass(frozen=True)
class ParetoTypeModel:
    """A heavy-tailed law with extreme value index `gamma`.

    Burr(zeta, gamma):  survival (1 + x^(1/zeta))^(-zeta/gamma), x >= 0
    Frechet(gamma):     survival 1 - exp(-x^(-1/gamma)), x > 0
    ExactPareto(gamma): survival x^(-1/gamma) on x >= 1
    """
    family: Family
    gamma: float
    zeta: float = 1.0

    def __post_init__(self) -> None:
        if not (self.gamma > 0 and math.isfinite(self.gamma)):
            raise DomainError("gamma must be positive")
        if self.family is Family.BURR and not (self.zeta > 0 and math.isfinite(self.zeta)):
            raise DomainError("zeta must be positive")

    @classmethod
    def burr(cls, zeta: float, gamma: float) -> ParetoTypeModel:
        return cls(Family.BURR, gamma, zeta)

    @classmethod
    def frechet(cls, gamma: float) -> ParetoTypeModel:
        return cls(Family.FRECHET, gamma)

    @classmethod
    def exact_pareto(cls, gamma: float) -> ParetoTypeModel:
        return cls(Family.EXACT_PARETO, gamma)

    def sort_key(self) -> tuple[str, float, float]:
        zeta = self.zeta if self.family is Family.BURR else 0.0
        return (self.family.value, self.gamma, zeta)

    def label(self) -> str:
        if self.family is Family.BURR:
            return f"burr({self.zeta:g},{self.gamma:g})"
        return f"{self.family.value}({self.gamma:g})"


@dataclass(frozen=True)
class HallConstants:
    """Second-order constants of survival(x) ~ C x^(-1/gamma) (1 + D x^(-beta)).

    beta = inf means no second-order term (D = 0).
    """
    gamma: float
    C: float
    D: float
    beta: float

    @property
    def tau(self) -> float:
        return -self.beta * self.gamma

    def asymptote(self, x: float) -> float:
        second = 0.0 if math.isinf(self.beta) else self.D * x ** (-self.beta)
        return self.C * x ** (-1.0 / self.gamma) * (1.0 + second)


@dataclass(frozen=True)
class CensoringScheme:
    """Variable of interest X ~ f_model censored by Y ~ g_model.

    g_model None is the uncensored mode: Y is never generated and every delta is 1.
    """
    f_model: ParetoTypeModel
    g_model: ParetoTypeModel | None = None

    @property
    def uncensored(self) -> bool:
        return self.g_model is None

    @property
    def gamma(self) -> float:
        g1 = self.f_model.gamma
        if self.g_model is None:
            return g1
        g2 = self.g_model.gamma
        return g1 * g2 / (g1 + g2)

    @property
    def p(self) -> float:
        """Asymptotic proportion of uncensored observations in the tail."""
        if self.g_model is None:
            return 1.0
        g1, g2 = self.f_model.gamma, self.g_model.gamma
        return g2 / (g1 + g2)

    def label(self) -> str:
        if self.g_model is None:
            return f"{self.f_model.label()}-uncensored"
        return f"{self.f_model.label()}-x-{self.g_model.label()}"


@dataclass(frozen=True)
class CompositeTail:
    """Hall constants of the observed tail H = 1 - (1-F)(1-G)."""
    gamma: float
    C: float
    beta_star: float
    D_star: float
    p: float


@dataclass(frozen=True)
class CensoredSample:
    """Observed pairs (z_i, delta_i) in input order."""
    z: np.ndarray
    delta: np.ndarray

    def __post_init__(self) -> None:
        z = np.asarray(self.z, dtype=float)
        delta = np.asarray(self.delta)
        if z.ndim != 1 or z.shape != delta.shape:
            raise DomainError("z and delta must be 1-d arrays of equal length")
        if z.size < 2:
            raise DomainError("sample needs at least 2 observations")
        if not np.all(np.isfinite(z)) or np.any(z <= 0):
            raise DomainError("every z must be positive and finite")
        if not np.all((delta == 0) | (delta == 1)):
            raise DomainError("every delta must be 0 or 1")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "delta", delta.astype(np.int8))

    @property
    def n(self) -> int:
        return int(self.z.size)

    def sorted_order(self) -> np.ndarray:
        """Permutation sorting by z ascending, uncensored first on ties."""
        return np.lexsort((-self.delta.astype(np.int64), self.z))

    def complemented(self) -> CensoredSample:
        return CensoredSample(self.z.copy(), 1 - self.delta)

    def scaled(self, c: float) -> CensoredSample:
        return CensoredSample(self.z * c, self.delta.copy())


# ---------------------------------------------------------------------------
# Distribution functions
# ---------------------------------------------------------------------------

def survival(model: ParetoTypeModel, x):
    """Right-tail function 1 - F(x); scalar in, float out; array in, array out."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0) or np.any(np.isnan(arr)):
        raise DomainError("survival is defined for x >= 0")
    with np.errstate(divide="ignore", over="ignore"):
        if model.family is Family.BURR:
            out = np.exp(-(model.zeta / model.gamma) * np.log1p(arr ** (1.0 / model.zeta)))
        elif model.family is Family.FRECHET:
            safe = np.where(arr > 0, arr, 1.0)
            out = np.where(arr > 0, -np.expm1(-safe ** (-1.0 / model.gamma)), 1.0)
        else:
            safe = np.maximum(arr, 1.0)
            out = safe ** (-1.0 / model.gamma)
    return float(out) if out.ndim == 0 else out


def quantile(model: ParetoTypeModel, u):
    """Inverse of the cdf: returns x with F(x) = u, for u in (0, 1)."""
    arr = np.asarray(u, dtype=float)
    if np.any(~((arr > 0) & (arr < 1))):
        raise DomainError("quantile requires u in (0, 1)")
    g = model.gamma
    if model.family is Family.BURR:
        zeta = model.zeta
        out = np.expm1(-(g / zeta) * np.log1p(-arr)) ** zeta
    elif model.family is Family.FRECHET:
        out = (-np.log(arr)) ** (-g)
    else:
        out = np.exp(-g * np.log1p(-arr))
    return float(out) if out.ndim == 0 else out


def hall_constants(model: ParetoTypeModel) -> HallConstants:
    """Second-order expansion constants of the model's tail."""
    if model.family is Family.BURR:
        return HallConstants(model.gamma, 1.0, -model.zeta / model.gamma, 1.0 / model.zeta)
    if model.family is Family.FRECHET:
        return HallConstants(model.gamma, 1.0, -0.5, 1.0 / model.gamma)
    return HallConstants(model.gamma, 1.0, 0.0, math.inf)


def composite_tail(scheme: CensoringScheme) -> CompositeTail:
    """Constants of the observed-variable tail, combining F and G."""
    hf = hall_constants(scheme.f_model)
    if scheme.g_model is None:
        return CompositeTail(hf.gamma, hf.C, hf.beta, hf.D, 1.0)
    hg = hall_constants(scheme.g_model)
    if hf.beta < hg.beta:
        d_star = hf.D
    elif hf.beta > hg.beta:
        d_star = hg.D
    else:
        d_star = hf.D + hg.D
    return CompositeTail(
        gamma=scheme.gamma,
        C=hf.C * hg.C,
        beta_star=min(hf.beta, hg.beta),
        D_star=d_star,
        p=scheme.p,
    )


def composite_survival(scheme: CensoringScheme, x):
    """Survival of Z = min(X, Y): product of the two survivals."""
    sf = survival(scheme.f_model, x)
    if scheme.g_model is None:
        return sf
    return sf * survival(scheme.g_model, x)


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------

def stream_generator(seed: int, *key: int) -> np.random.Generator:
    """Independent Philox stream addressed by (seed, *key)."""
    seq = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(seq))


def _uniforms(rng: np.random.Generator, n: int) -> np.ndarray:
    u = rng.random(n)
    # random() is in [0, 1); an exact 0 would put x on the support boundary
    return np.maximum(u, np.finfo(float).tiny)


def sample_censored(scheme: CensoringScheme, n: int, seed: int,
                    replication: int = 0) -> CensoredSample:
    """Draw n censored observations by inverse transform.

    The two models are assigned substreams by their canonical order rather than
    by role, so swapping f and g reuses the same uniforms for the same law.
    """
    if n < 2:
        raise DomainError("n must be at least 2")
    f, g = scheme.f_model, scheme.g_model
    if g is None:
        x = quantile(f, _uniforms(stream_generator(seed, replication, _STREAM_LOW), n))
        return CensoredSample(x, np.ones(n, dtype=np.int8))

    f_stream, g_stream = _STREAM_LOW, _STREAM_HIGH
    if g.sort_key() < f.sort_key():
        f_stream, g_stream = _STREAM_HIGH, _STREAM_LOW
    x = quantile(f, _uniforms(stream_generator(seed, replication, f_stream), n))
    y = quantile(g, _uniforms(stream_generator(seed, replication, g_stream), n))
    z = np.minimum(x, y)
    delta = (x <= y).astype(np.int8)
    return CensoredSample(z, delta)
