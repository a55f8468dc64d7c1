"""Grid sweeps over model parameters and CSV / JSON emission."""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__
from .correlations import coincidence_general, first_photon_density
from .entanglement import concurrence_of_delay, wootters_concurrence
from .exceptions import InvalidParameterError
from .jitter import average_concurrence, jittered_density
from .params import PATH_LABELS, PhysicalParams, build_couplings

AXIS_NAMES = ("phi", "S", "sigma", "epsilon", "tau")
OBSERVABLES = {
    "P_nm": tuple(f"P_{p}" for p in PATH_LABELS),
    "C": ("concurrence",),
    "C_jittered": ("concurrence",),
    "C_bar": ("avg_concurrence",),
    "N_bar": ("n_bar",),
}
FLOAT_FORMAT = "%.12g"


@dataclass(frozen=True)
class SweepAxis:
    name: str
    min: float
    max: float
    count: int
    scale: str = "linear"

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise InvalidParameterError(f"unknown sweep axis {self.name!r}; expected one of {AXIS_NAMES}")
        if self.scale != "linear":
            raise InvalidParameterError("only linear axes are supported")
        if int(self.count) != self.count or self.count < 2:
            raise InvalidParameterError(f"axis {self.name!r} needs count >= 2")
        if not (math.isfinite(self.min) and math.isfinite(self.max)) or self.min == self.max:
            raise InvalidParameterError(f"axis {self.name!r} needs a non-empty finite range")

    @classmethod
    def parse(cls, text: str) -> "SweepAxis":
        """Parse ``name:min:max:count``; ``pi`` may appear in the bounds (``pi/2``)."""
        parts = text.split(":")
        if len(parts) != 4:
            raise InvalidParameterError(f"axis must look like name:min:max:count, got {text!r}")
        name, lo, hi, count = parts
        return cls(name, parse_number(lo), parse_number(hi), int(count))

    @property
    def values(self) -> np.ndarray:
        return np.linspace(self.min, self.max, int(self.count))


def parse_number(text: str) -> float:
    text = text.strip().lower().replace(" ", "")
    if "pi" in text:
        num, _, den = text.partition("/")
        coef = num.replace("*", "").replace("pi", "")
        value = (float(coef) if coef not in ("", "+", "-") else float(coef + "1")) * math.pi
        return value / float(den) if den else value
    return float(text)


@dataclass
class SweepSpec:
    axes: Sequence[SweepAxis]
    observable: str = "C"
    fixed: dict[str, float] = field(default_factory=dict)
    format: str = "csv"
    output: str | None = None

    def __post_init__(self):
        self.axes = tuple(self.axes)
        if not 1 <= len(self.axes) <= 3:
            raise InvalidParameterError("a sweep needs between 1 and 3 axes")
        names = [a.name for a in self.axes]
        if len(set(names)) != len(names):
            raise InvalidParameterError("sweep axes must be distinct")
        if self.observable not in OBSERVABLES:
            raise InvalidParameterError(f"unknown observable {self.observable!r}; expected one of {sorted(OBSERVABLES)}")
        if self.observable == "C_bar" and "tau" in names:
            raise InvalidParameterError("C_bar is averaged over tau; tau cannot be a sweep axis")
        if self.format not in ("csv", "json"):
            raise InvalidParameterError("format must be csv or json")
        allowed = {"gamma_X", "epsilon", "S", "phi", "phi_prime", "Gamma", "sigma", "tau", "t_XX", "unconditioned"}
        unknown = set(self.fixed) - allowed
        if unknown:
            raise InvalidParameterError(f"unknown fixed parameters {sorted(unknown)}")


@dataclass
class SweepResult:
    columns: list[str]
    rows: np.ndarray
    metadata: dict[str, Any]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([FLOAT_FORMAT % v for v in row])
        return buf.getvalue()

    def to_json(self) -> str:
        data = {col: [float(FLOAT_FORMAT % v) for v in self.rows[:, i]] for i, col in enumerate(self.columns)}
        return json.dumps({"metadata": self.metadata, "columns": self.columns, "data": data}, indent=1, sort_keys=False) + "\n"

    def write(self, path: str | Path, fmt: str = "csv") -> list[Path]:
        """Write the table; CSV output gets a ``.meta.json`` sidecar for the metadata."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        if fmt == "json":
            path.write_text(self.to_json())
            return [path]
        path.write_text(self.to_csv())
        meta = path.with_name(path.name + ".meta.json")
        meta.write_text(json.dumps(self.metadata, indent=1) + "\n")
        return [path, meta]


def read_result(path: str | Path) -> SweepResult:
    path = Path(path)
    if path.suffix == ".json":
        doc = json.loads(path.read_text())
        cols = doc["columns"]
        rows = np.column_stack([doc["data"][c] for c in cols]) if cols else np.empty((0, 0))
        return SweepResult(cols, rows, doc["metadata"])
    with path.open() as fh:
        reader = csv.reader(fh)
        cols = next(reader)
        rows = np.array([[float(v) for v in r] for r in reader])
    meta_path = path.with_name(path.name + ".meta.json")
    meta = json.loads(meta_path.read_text()) if meta_path.exists() else {}
    return SweepResult(cols, rows, meta)


def make_metadata(params: PhysicalParams, extra: dict[str, Any] | None = None, timestamp: bool = True) -> dict[str, Any]:
    meta: dict[str, Any] = {"tool": "cascade-sim", "version": __version__, "params": params.to_config()}
    if extra:
        meta.update(extra)
    if timestamp:
        meta["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return meta


def _evaluate(observable: str, point: dict[str, float], base: PhysicalParams, fixed: dict[str, float]) -> list[float]:
    phys = {k: v for k, v in point.items() if k in ("phi", "S", "epsilon")}
    params = base.replace(**phys)
    couplings = build_couplings(params)
    sigma = point.get("sigma", fixed.get("sigma", 0.0))
    tau = point.get("tau", fixed.get("tau", 0.0))
    if observable == "P_nm":
        rec = coincidence_general(tau, params, couplings)
        P = rec.P
        if fixed.get("unconditioned"):
            P = P * first_photon_density(fixed.get("t_XX", 0.0), params)
        return [float(v) for v in P]
    if observable == "C":
        return [float(concurrence_of_delay(tau, params, couplings))]
    if observable == "C_jittered":
        state = jittered_density(tau, sigma, params, couplings)
        return [float(wootters_concurrence(state.rho_bar).value)]
    if observable == "N_bar":
        return [float(jittered_density(tau, sigma, params, couplings).N_bar)]
    return [average_concurrence(sigma, params, couplings)]


def run_sweep(
    spec: SweepSpec,
    base: PhysicalParams | None = None,
    *,
    jobs: int = 1,
    timestamp: bool = True,
) -> SweepResult:
    """Evaluate ``spec.observable`` on the Cartesian grid of ``spec.axes``.

    Rows are in row-major order with the first axis varying slowest. With
    ``jobs > 1`` points are evaluated on a thread pool; the output order
    does not depend on completion order.
    """
    base = base or PhysicalParams()
    fixed = dict(spec.fixed)
    phys_fixed = {k: fixed.pop(k) for k in list(fixed) if k in ("gamma_X", "epsilon", "S", "phi", "phi_prime", "Gamma")}
    base = base.replace(**phys_fixed)
    names = [a.name for a in spec.axes]
    points = [dict(zip(names, combo)) for combo in itertools.product(*(a.values for a in spec.axes))]

    def work(point):
        return _evaluate(spec.observable, point, base, fixed)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            values = list(pool.map(work, points))
    else:
        values = [work(p) for p in points]

    columns = names + list(OBSERVABLES[spec.observable])
    rows = np.array([[p[n] for n in names] + v for p, v in zip(points, values)], dtype=float)
    meta = make_metadata(
        base,
        {
            "observable": spec.observable,
            "axes": [{"name": a.name, "min": a.min, "max": a.max, "count": a.count, "scale": a.scale} for a in spec.axes],
            "fixed": spec.fixed,
        },
        timestamp=timestamp,
    )
    return SweepResult(columns, rows, meta)
