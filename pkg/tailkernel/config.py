"""Configuration loading (.env, numerical constants, run-config parsing)."""

import math
import os
from dataclasses import dataclass, field
from pathlib import Path

from dotenv import dotenv_values, load_dotenv

from tailkernel.errors import ValidationError

# Load .env from the package's parent directory
SCRIPT_DIR = Path(__file__).resolve().parent.parent
load_dotenv(SCRIPT_DIR / ".env")

LOGS_DIR = Path(os.getenv("TAILKERNEL_LOGS_DIR") or SCRIPT_DIR / "logs")
OUTPUT_DIR = Path(os.getenv("TAILKERNEL_OUTPUT_DIR") or SCRIPT_DIR / "results")
LOG_LEVEL = os.getenv("TAILKERNEL_LOG_LEVEL", "INFO").upper()

# Quadrature
QUAD_ABS_TOL = 1e-10
QUAD_LIMIT = 200
FIXED_RULE_ORDER = 50

# Denominators closer to zero than this are treated as singular
SINGULAR_TOL = 1e-12

# Kaplan-Meier products switch to log-space accumulation above this size
KM_LOG_SPACE_THRESHOLD = 10_000

# Reiss-Thomas selection
DEFAULT_NU = 0.3
DEFAULT_K_MIN = 10

# Adaptive second-order grid {-0.5 - 0.1 i : i = 0..25}
ADAPTIVE_TAU1_GRID: tuple[float, ...] = tuple(round(-0.5 - 0.1 * i, 10) for i in range(26))
ADAPTIVE_K_STEP = 5
ADAPTIVE_MIN_POINTS = 10

# Monte-Carlo
DESK_REPLICATIONS = 200
DESK_SAMPLE_SIZE = 500
RAW_STORAGE_LIMIT = 1000
# total variation of a path is taken over k in [TV_K_MIN, n // 2]
TV_K_MIN = 10

# CSV floats are written with 17 significant digits
FLOAT_FORMAT = "%.17g"

# Exit codes
EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3


def resolve_threads(threads: int | None) -> int:
    """Map a --threads value to a worker count (0 = one per CPU).

    Without a value, TAILKERNEL_THREADS is read (default 1).
    """
    if threads is None:
        raw = os.getenv("TAILKERNEL_THREADS", "").strip() or "1"
        try:
            threads = int(raw)
        except ValueError:
            raise ValidationError(f"TAILKERNEL_THREADS must be an integer, got {raw!r}") from None
    if threads < 0:
        raise ValidationError("threads must be >= 0")
    if threads == 0:
        return os.cpu_count() or 1
    return threads


# ---------------------------------------------------------------------------
# Run configuration (key=value files for `simulate`)
# ---------------------------------------------------------------------------

_FAMILIES = {"burr", "frechet", "pareto"}
_ESTIMATORS = {
    "hill", "cdm", "efg", "worms", "worms-tilde", "kernel",
    "kernel-unshifted", "bab", "bias-reduced",
}
_KERNELS = {"indicator", "biweight", "triweight", "quadweight"}
_BAB_KERNELS = {"bab0", "bab1", "bab2"}

RUN_CONFIG_KEYS = frozenset({
    "family.f", "gamma.f", "zeta.f",
    "family.g", "gamma.g", "zeta.g",
    "n", "replications", "seed",
    "estimators", "kernel", "bab_kernel", "variant",
    "nu", "k_min", "k_max", "k_step",
    "beta1", "adaptive",
    "scenarios", "uncensored", "threads", "name",
})


@dataclass
class RunConfig:
    """Validated contents of a simulate config file."""
    family_f: str = "burr"
    gamma_f: float = 0.5
    zeta_f: float = 1.0
    family_g: str = "burr"
    gamma_g: float = 1.0
    zeta_g: float = 1.0
    n: int = DESK_SAMPLE_SIZE
    replications: int = DESK_REPLICATIONS
    seed: int = 0
    estimators: list[str] = field(default_factory=lambda: ["efg", "worms", "kernel", "bab"])
    kernel: str = "triweight"
    bab_kernel: str = "bab2"
    variant: str = "shifted"
    nu: float = DEFAULT_NU
    k_min: int = DEFAULT_K_MIN
    k_max: int | None = None
    k_step: int = 1
    beta1: float | None = None
    adaptive: bool = False
    scenarios: str = "single"
    uncensored: bool = False
    threads: int | None = None
    name: str = "scenario"


def _as_float(key: str, raw: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise ValidationError(f"{key}: expected a number, got {raw!r}") from None
    if not math.isfinite(value):
        raise ValidationError(f"{key}: value must be finite")
    return value


def _as_int(key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ValidationError(f"{key}: expected an integer, got {raw!r}") from None


def _as_bool(key: str, raw: str) -> bool:
    lowered = raw.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValidationError(f"{key}: expected true/false, got {raw!r}")


def parse_run_config(values: dict[str, str | None]) -> RunConfig:
    """Validate raw key=value pairs into a RunConfig."""
    unknown = sorted(set(values) - RUN_CONFIG_KEYS)
    if unknown:
        raise ValidationError(f"unknown config key: {unknown[0]}")

    cfg = RunConfig()
    for key, raw in values.items():
        if raw is None or raw.strip() == "":
            raise ValidationError(f"{key}: missing value")
        raw = raw.strip()
        if key in ("family.f", "family.g"):
            if raw not in _FAMILIES:
                raise ValidationError(f"{key}: unknown family {raw!r}")
            setattr(cfg, "family_" + key[-1], raw)
        elif key in ("gamma.f", "gamma.g", "zeta.f", "zeta.g"):
            value = _as_float(key, raw)
            if value <= 0:
                label = key.split(".")[0]
                raise ValidationError(f"{key}: {label} must be positive")
            setattr(cfg, key.replace(".", "_"), value)
        elif key in ("n", "replications", "seed", "k_min", "k_max", "k_step", "threads"):
            setattr(cfg, key, _as_int(key, raw))
        elif key == "estimators":
            names = [s.strip() for s in raw.split(",") if s.strip()]
            bad = [s for s in names if s not in _ESTIMATORS]
            if bad or not names:
                raise ValidationError(f"estimators: unknown estimator {bad[0] if bad else raw!r}")
            cfg.estimators = names
        elif key == "kernel":
            if raw not in _KERNELS:
                raise ValidationError(f"kernel: unknown kernel {raw!r}")
            cfg.kernel = raw
        elif key == "bab_kernel":
            if raw not in _BAB_KERNELS:
                raise ValidationError(f"bab_kernel: unknown kernel {raw!r}")
            cfg.bab_kernel = raw
        elif key == "variant":
            if raw not in ("shifted", "unshifted"):
                raise ValidationError(f"variant: expected shifted or unshifted, got {raw!r}")
            cfg.variant = raw
        elif key == "nu":
            cfg.nu = _as_float(key, raw)
        elif key == "beta1":
            cfg.beta1 = _as_float(key, raw)
        elif key in ("adaptive", "uncensored"):
            setattr(cfg, key, _as_bool(key, raw))
        elif key == "scenarios":
            if raw not in ("single", "standard"):
                raise ValidationError(f"scenarios: expected single or standard, got {raw!r}")
            cfg.scenarios = raw
        elif key == "name":
            cfg.name = raw

    _check_run_config(cfg)
    return cfg


def _check_run_config(cfg: RunConfig) -> None:
    if cfg.n < 50:
        raise ValidationError("n: sample size must be at least 50")
    if cfg.replications < 1:
        raise ValidationError("replications: must be at least 1")
    if cfg.seed < 0 or cfg.seed >= 2 ** 64:
        raise ValidationError("seed: must be a 64-bit unsigned integer")
    if not 0.0 <= cfg.nu <= 0.5:
        raise ValidationError("nu: must lie in [0, 1/2]")
    k_max = cfg.k_max if cfg.k_max is not None else cfg.n - 1
    if not 2 <= cfg.k_min <= k_max <= cfg.n - 1:
        raise ValidationError("k_min/k_max: need 2 <= k_min <= k_max <= n-1")
    if cfg.k_step < 1:
        raise ValidationError("k_step: must be at least 1")
    if cfg.beta1 is not None and cfg.beta1 <= 0:
        raise ValidationError("beta1: beta must be positive")
    if "bias-reduced" in cfg.estimators and cfg.beta1 is None and not cfg.adaptive:
        raise ValidationError("bias-reduced: set beta1 or adaptive=true")
    if cfg.beta1 is not None and cfg.adaptive:
        raise ValidationError("beta1 and adaptive are mutually exclusive")
    if cfg.threads is not None and cfg.threads < 0:
        raise ValidationError("threads: must be >= 0")


def load_run_config(path: Path) -> RunConfig:
    """Read and validate a key=value config file."""
    if not path.is_file():
        raise ValidationError(f"{path}: config file not found")
    return parse_run_config(dict(dotenv_values(path)))
