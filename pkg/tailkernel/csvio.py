"""CSV codecs: censored data files, estimator paths and simulation summaries."""

from __future__ import annotations

import math
from pathlib import Path
from typing import IO, Iterable

import numpy as np
import pandas as pd

from tailkernel.config import FLOAT_FORMAT
from tailkernel.errors import Reason, ValidationError
from tailkernel.estimators import EstimatorPath
from tailkernel.models import CensoredSample
from tailkernel.montecarlo import SimulationSummary

DATA_HEADER = ["z", "delta"]
PATH_COLUMNS = ["estimator", "kernel", "k", "estimate", "defined", "reason"]
INTERVAL_COLUMNS = ["lower", "upper"]


def write_csv(frame: pd.DataFrame, dest: Path | IO[str]) -> None:
    """Write with 17 significant digits, '.' decimals and LF line endings."""
    frame.to_csv(dest, index=False, float_format=FLOAT_FORMAT, na_rep="nan",
                 lineterminator="\n")


def _read_frame(source: Path | IO[str], label: str) -> pd.DataFrame:
    try:
        return pd.read_csv(source, dtype=str, keep_default_na=False)
    except pd.errors.EmptyDataError:
        raise ValidationError(f"{label}: fewer than 2 rows") from None
    except (OSError, UnicodeDecodeError) as exc:
        raise ValidationError(f"{label}: cannot read file ({exc})") from None
    except pd.errors.ParserError as exc:
        raise ValidationError(f"{label}: malformed CSV ({exc})") from None


# ---------------------------------------------------------------------------
# Data files
# ---------------------------------------------------------------------------

def read_data_file(path: Path) -> CensoredSample:
    """Parse a z,delta file; every bad row is reported with its line number."""
    label = str(path)
    if not Path(path).is_file():
        raise ValidationError(f"{label}: file not found")
    frame = _read_frame(path, label)
    if [c.strip() for c in frame.columns] != DATA_HEADER:
        raise ValidationError(f"{label}: header must be 'z,delta'")
    if len(frame) < 2:
        raise ValidationError(f"{label}: fewer than 2 rows")

    z = np.empty(len(frame))
    delta = np.empty(len(frame), dtype=np.int8)
    for pos, (raw_z, raw_delta) in enumerate(frame.itertuples(index=False, name=None)):
        line = pos + 2
        try:
            value = float(raw_z)
        except ValueError:
            raise ValidationError(f"{label}: row {line}: z is not a number ({raw_z!r})") from None
        if not math.isfinite(value) or value <= 0:
            raise ValidationError(f"{label}: row {line}: z must be positive ({raw_z!r})")
        if raw_delta.strip() not in ("0", "1"):
            raise ValidationError(f"{label}: row {line}: delta must be 0 or 1 ({raw_delta!r})")
        z[pos] = value
        delta[pos] = int(raw_delta)
    return CensoredSample(z, delta)


# ---------------------------------------------------------------------------
# Estimator paths
# ---------------------------------------------------------------------------

def path_frame(paths: Iterable[EstimatorPath],
               intervals: dict[int, tuple[np.ndarray, np.ndarray]] | None = None) -> pd.DataFrame:
    """Long-format table of paths; `intervals` maps path position to (lower, upper)."""
    frames = []
    for pos, path in enumerate(paths):
        frame = pd.DataFrame({
            "estimator": path.estimator,
            "kernel": path.kernel,
            "k": path.k_values,
            "estimate": path.estimates,
            "defined": path.defined.astype(int),
            "reason": [r.value if r is not None else "" for r in path.reasons],
        })
        if intervals is not None:
            lower, upper = intervals.get(pos, (np.full(path.k_values.size, np.nan),) * 2)
            frame["lower"] = lower
            frame["upper"] = upper
        frames.append(frame)
    columns = PATH_COLUMNS + (INTERVAL_COLUMNS if intervals is not None else [])
    if not frames:
        return pd.DataFrame(columns=columns)
    return pd.concat(frames, ignore_index=True)[columns]


def read_path_csv(source: Path | IO[str], estimator: str | None = None) -> list[EstimatorPath]:
    """Parse path CSV back into EstimatorPath objects, one per (estimator, kernel)."""
    label = str(source) if isinstance(source, Path) else "<stream>"
    frame = _read_frame(source, label)
    missing = [c for c in ("estimator", "kernel", "k", "estimate") if c not in frame.columns]
    if missing:
        raise ValidationError(f"{label}: missing column {missing[0]!r}")
    if estimator is not None:
        frame = frame[frame["estimator"] == estimator]
        if frame.empty:
            raise ValidationError(f"{label}: no rows for estimator {estimator!r}")

    paths = []
    for (est, kern), group in frame.groupby(["estimator", "kernel"], sort=False):
        try:
            ks = group["k"].astype(np.int64).to_numpy()
            values = np.array([float(v) for v in group["estimate"]])
            if "reason" in group.columns:
                reasons = tuple(Reason(r) if r else None for r in group["reason"])
            else:
                reasons = tuple(None if math.isfinite(v) else Reason.ZERO_DENOMINATOR
                                for v in values)
        except ValueError as exc:
            raise ValidationError(f"{label}: bad path row ({exc})") from None
        order = np.argsort(ks, kind="stable")
        paths.append(EstimatorPath(est, kern, ks[order], values[order],
                                   tuple(reasons[i] for i in order)))
    return paths


# ---------------------------------------------------------------------------
# Simulation output
# ---------------------------------------------------------------------------

def write_scenario_files(summary: SimulationSummary, out_dir: Path) -> list[Path]:
    """Write the summary, smoothness and selection CSVs of one scenario."""
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for suffix, frame in (("summary", summary.cells),
                          ("smoothness", summary.smoothness),
                          ("selection", summary.selections)):
        dest = out_dir / f"{summary.scenario}_{suffix}.csv"
        with dest.open("w", encoding="utf-8", newline="") as fh:
            write_csv(frame, fh)
        written.append(dest)
    return written
