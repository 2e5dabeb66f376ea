"""Parameter sweeps comparing the leading-order value against the oracle.

The controlling parameters of the approximation are theta = z/r and the
dimensionless distance k0*r, so sweeps are configured in those terms and
observation points are constructed as

    r = k0r/k0,  z = theta*r,  rho_xy = r*sqrt(1 - theta^2)

at a chosen azimuth.  Each grid cell yields one ComparisonRecord; a failed
oracle evaluation flags its record instead of aborting the sweep.  Records
are emitted in deterministic grid order (theta-major, then k0r) and CSV
fields are serialized with 17 significant digits so that parsing them back
is lossless.
"""

from __future__ import annotations

import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Sequence

import numpy as np

from .asymptotics import leading_order
from .errors import ConfigError, InsufficientDataError
from .oracle import QuadratureConfig, oracle_eval
from .spectra import SpectrumFunction
from .spectral import ObservationPoint

__all__ = [
    "ComparisonRecord",
    "SweepConfig",
    "point_from_parameters",
    "run_sweep",
    "fit_convergence_slope",
    "validity_map",
    "emit",
    "read_csv_records",
    "CSV_FIELDS",
]

CSV_FIELDS = (
    "k0r",
    "theta",
    "x",
    "y",
    "z",
    "asym_re",
    "asym_im",
    "oracle_re",
    "oracle_im",
    "rel_error",
    "validity_margin",
)

ORACLE_K0R_ENVELOPE = 300.0


@dataclass(frozen=True)
class ComparisonRecord:
    """One (k0r, theta) sample of asymptotic vs oracle."""

    k0r: float
    theta: float
    point: ObservationPoint
    asym: complex
    oracle: complex
    rel_error: float
    validity_margin: float
    wall_time_oracle: float
    failed: bool = False
    note: str = ""


@dataclass(frozen=True)
class SweepConfig:
    """Grid definition for a sweep.

    theta values must lie in (0, 1]; k0r values must be positive and stay
    within the oracle's desk-scale envelope (k0r <= 300).
    """

    spectrum: SpectrumFunction
    k0: float
    theta_values: tuple[float, ...]
    k0r_values: tuple[float, ...]
    azimuth: float = 0.0
    oracle_cfg: QuadratureConfig = field(default_factory=QuadratureConfig)

    def __post_init__(self):
        object.__setattr__(self, "theta_values", tuple(self.theta_values))
        object.__setattr__(self, "k0r_values", tuple(self.k0r_values))
        if self.k0 <= 0.0:
            raise ConfigError(f"k0 must be positive, got {self.k0}")
        if not self.theta_values or not self.k0r_values:
            raise ConfigError("theta_values and k0r_values must be nonempty")
        if any(not (0.0 < t <= 1.0) for t in self.theta_values):
            raise ConfigError("theta values must lie in (0, 1]")
        if any(v <= 0.0 for v in self.k0r_values):
            raise ConfigError("k0r values must be positive")
        if any(v > ORACLE_K0R_ENVELOPE for v in self.k0r_values):
            raise ConfigError(
                f"k0r values beyond {ORACLE_K0R_ENVELOPE:g} are outside the "
                "oracle's desk-scale envelope"
            )


def point_from_parameters(
    theta: float, k0r: float, k0: float, azimuth: float = 0.0
) -> ObservationPoint:
    """Observation point with the given direction cosine and k0*r."""
    r = k0r / k0
    z = theta * r
    rho = r * math.sqrt(max(1.0 - theta * theta, 0.0))
    return ObservationPoint(
        x=rho * math.cos(azimuth), y=rho * math.sin(azimuth), z=z
    )


def thread_count() -> int:
    """Worker cap from ASX_THREADS, defaulting to the available cores."""
    raw = os.environ.get("ASX_THREADS", "")
    if raw.strip():
        try:
            n = int(raw)
        except ValueError:
            raise ConfigError(f"ASX_THREADS must be an integer, got {raw!r}") from None
        if n < 1:
            raise ConfigError(f"ASX_THREADS must be >= 1, got {n}")
        return n
    return os.cpu_count() or 1


def _one_record(cfg: SweepConfig, theta: float, k0r: float) -> ComparisonRecord:
    p = point_from_parameters(theta, k0r, cfg.k0, cfg.azimuth)
    asym = leading_order(cfg.spectrum, p, cfg.k0)
    start = time.perf_counter()
    try:
        result = oracle_eval(cfg.spectrum, p, cfg.k0, cfg.oracle_cfg)
        elapsed = time.perf_counter() - start
        oracle_value = result.value
        rel = (
            abs(asym.value - oracle_value) / abs(oracle_value)
            if oracle_value != 0
            else math.inf
        )
        failed = not result.converged
        note = "" if result.converged else "oracle budget exhausted"
    except Exception as exc:  # per-record isolation: one bad cell, one flag
        elapsed = time.perf_counter() - start
        oracle_value = complex(math.nan, math.nan)
        rel = math.nan
        failed = True
        note = f"{type(exc).__name__}: {exc}"
    return ComparisonRecord(
        k0r=k0r,
        theta=theta,
        point=p,
        asym=asym.value,
        oracle=oracle_value,
        rel_error=rel,
        validity_margin=asym.validity_margin,
        wall_time_oracle=elapsed,
        failed=failed,
        note=note,
    )


def run_sweep(cfg: SweepConfig) -> list[ComparisonRecord]:
    """One record per (theta, k0r) grid cell, in deterministic grid order.

    Records are independent, so they may be computed concurrently (capped
    by ASX_THREADS); the returned ordering and every numeric field are
    identical regardless of the worker count.
    """
    grid = [(t, v) for t in cfg.theta_values for v in cfg.k0r_values]
    workers = min(thread_count(), len(grid))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(lambda tv: _one_record(cfg, *tv), grid))
    else:
        records = [_one_record(cfg, t, v) for t, v in grid]
    return records


def fit_convergence_slope(
    records: Iterable[ComparisonRecord], theta_fixed: float
) -> float:
    """Least-squares slope of log(rel_error) against log(k0r) at fixed theta.

    Needs at least 4 records with distinct k0r at the given theta; zero,
    non-finite or missing errors make the fit degenerate.
    """
    selected = [
        rec
        for rec in records
        if not rec.failed and abs(rec.theta - theta_fixed) <= 1e-9
    ]
    k0rs = sorted({rec.k0r for rec in selected})
    if len(k0rs) < 4:
        raise InsufficientDataError(
            f"need >= 4 records with distinct k0r at theta={theta_fixed}, "
            f"got {len(k0rs)}"
        )
    errs = np.array([rec.rel_error for rec in selected])
    if not np.all(np.isfinite(errs)) or np.any(errs <= 0.0):
        raise InsufficientDataError(
            "relative errors must be positive and finite for a log-log fit"
        )
    xs = np.log([rec.k0r for rec in selected])
    return float(np.polyfit(xs, np.log(errs), 1)[0])


def validity_map(cfg: SweepConfig) -> list[ComparisonRecord]:
    """Sweep charting rel_error against the validity margin theta/theta0.

    The theta grid must reach down toward the validity threshold of the
    chosen k0r values (min(theta) <= 2*theta0) and extend above it,
    otherwise there is no boundary to map.
    """
    theta0_max = max(1.0 / math.sqrt(v) for v in cfg.k0r_values)
    if min(cfg.theta_values) > 2.0 * theta0_max:
        raise ConfigError(
            f"theta grid (min {min(cfg.theta_values):g}) does not approach the "
            f"validity threshold theta0 <= {theta0_max:g}"
        )
    if max(cfg.theta_values) <= theta0_max:
        raise ConfigError(
            f"theta grid (max {max(cfg.theta_values):g}) does not extend above "
            f"the validity threshold theta0 = {theta0_max:g}"
        )
    return run_sweep(cfg)


def _g17(value: float) -> str:
    return format(value, ".17g")


def _g17_json(value: float) -> str:
    # json.loads understands NaN/Infinity but not the lowercase forms
    if math.isnan(value):
        return "NaN"
    if math.isinf(value):
        return "Infinity" if value > 0 else "-Infinity"
    return format(value, ".17g")


def _record_row(rec: ComparisonRecord) -> dict[str, float]:
    return {
        "k0r": rec.k0r,
        "theta": rec.theta,
        "x": rec.point.x,
        "y": rec.point.y,
        "z": rec.point.z,
        "asym_re": rec.asym.real,
        "asym_im": rec.asym.imag,
        "oracle_re": rec.oracle.real,
        "oracle_im": rec.oracle.imag,
        "rel_error": rec.rel_error,
        "validity_margin": rec.validity_margin,
    }


def emit(
    records: Sequence[ComparisonRecord],
    fmt: str = "csv",
    destination: str | Path | IO[str] | None = None,
    trailer: str | None = None,
) -> None:
    """Write records as CSV or as JSON lines ("obj") with the same fields.

    ``destination`` may be a path, an open text stream, or None/'-' for
    stdout.  ``trailer`` appends one final comment line (CSV) or object
    (obj), used by the CLI for the convergence-slope summary.
    """
    if fmt not in ("csv", "obj"):
        raise ConfigError(f"format must be 'csv' or 'obj', got {fmt!r}")

    lines: list[str] = []
    if fmt == "csv":
        lines.append(",".join(CSV_FIELDS))
        for rec in records:
            row = _record_row(rec)
            lines.append(",".join(_g17(row[name]) for name in CSV_FIELDS))
        if trailer is not None:
            lines.append(f"# slope,{trailer}")
    else:
        for rec in records:
            row = _record_row(rec)
            lines.append(
                "{" + ", ".join(f'"{k}": {_g17_json(v)}' for k, v in row.items()) + "}"
            )
        if trailer is not None:
            lines.append(json.dumps({"slope": trailer}))
    text = "\n".join(lines) + "\n"

    if destination is None or destination == "-":
        sys.stdout.write(text)
    elif hasattr(destination, "write"):
        destination.write(text)
    else:
        Path(destination).write_text(text, encoding="utf-8")


def read_csv_records(source: str | Path) -> list[dict[str, float]]:
    """Parse CSV produced by :func:`emit` back into per-row field dicts.

    ``source`` is a path, or the CSV text itself if it contains a newline.
    Comment lines (leading '#') are skipped.  Values parse back to the
    exact doubles that were written.
    """
    if isinstance(source, str) and "\n" in source:
        text = source
    else:
        text = Path(source).read_text(encoding="utf-8")
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines:
        return []
    header = lines[0].split(",")
    rows = []
    for line in lines[1:]:
        parts = line.split(",")
        rows.append({name: float(val) for name, val in zip(header, parts)})
    return rows
