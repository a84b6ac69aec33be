"""Logger setup (console, runs file log, per-scenario loggers)."""

import logging
import logging.handlers

from tailkernel.config import LOG_LEVEL, LOGS_DIR

logging.basicConfig(
    level=getattr(logging, LOG_LEVEL, logging.INFO),
    format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
    datefmt="%Y-%m-%d %H:%M:%S",
)
logger = logging.getLogger("tailkernel")

# Structured file logging
LOGS_DIR.mkdir(parents=True, exist_ok=True)

_LOG_FORMAT = logging.Formatter(
    "%(asctime)s [%(levelname)s] %(message)s", datefmt="%Y-%m-%d %H:%M:%S"
)

# Runs logger: one line per command invocation and its outcome
runs_logger = logging.getLogger("tailkernel.runs")
runs_logger.propagate = False
_runs_handler = logging.handlers.RotatingFileHandler(
    LOGS_DIR / "runs.log", maxBytes=5 * 1024 * 1024, backupCount=3
)
_runs_handler.setFormatter(_LOG_FORMAT)
runs_logger.addHandler(_runs_handler)
runs_logger.setLevel(logging.INFO)

# Scenario logger factory for per-scenario replication progress
_scenario_loggers: dict[str, logging.Logger] = {}


def get_scenario_logger(name: str) -> logging.Logger:
    """Return a cached logger that writes to logs/scenarios/{name}.log."""
    if name in _scenario_loggers:
        return _scenario_loggers[name]
    scenario_dir = LOGS_DIR / "scenarios"
    scenario_dir.mkdir(parents=True, exist_ok=True)
    sc_logger = logging.getLogger(f"tailkernel.scenario.{name}")
    sc_logger.propagate = False
    handler = logging.handlers.RotatingFileHandler(
        scenario_dir / f"{name}.log", maxBytes=2 * 1024 * 1024, backupCount=2
    )
    handler.setFormatter(_LOG_FORMAT)
    sc_logger.addHandler(handler)
    sc_logger.setLevel(logging.INFO)
    _scenario_loggers[name] = sc_logger
    return sc_logger


def summarize_params(params: dict) -> str:
    """Render a parameter dict as a compact one-liner for log entries."""
    parts = []
    for k, v in params.items():
        v_str = str(v)
        if len(v_str) > 80:
            v_str = v_str[:77] + "..."
        parts.append(f"{k}={v_str}")
    summary = ", ".join(parts)
    return summary[:200] if len(summary) > 200 else summary
