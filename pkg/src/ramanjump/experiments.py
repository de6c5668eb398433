"""Sweep harness: bandwidth scans, area-error robustness scans, time
traces, and two-parameter fidelity maps, emitted as deterministic CSV or
JSON artifacts.

Sweep points are independent and are farmed out to a process pool with a
static partition; rows are merged in axis order so serial and parallel
runs produce identical files.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .atomic import LevelSystem, build_rb87_system
from .diagnostics import diagnostics_trace
from .dynamics import Model, build_model, default_output_grid, propagate
from .pulses import JumpSpec, StirapSpec, jump_train, stirap_pair

MHZ = 2.0e-3 * math.pi  # rad/ns per MHz

SWEEP_KINDS = ("bandwidth_scan", "robustness_scan", "time_trace",
               "fidelity_map", "diagnostics_trace")
PROTOCOLS = ("stirap", "jump")
TIERS = ("rwa3", "detuned3", "rwa4", "cross_coupled", "lab_frame")


@dataclass(frozen=True)
class SweepSpec:
    """Declarative description of one sweep."""

    kind: str
    protocol: str
    tiers: tuple = ("rwa3",)
    axes: dict = field(default_factory=dict)
    fixed: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in SWEEP_KINDS:
            raise ValueError(f"unknown sweep kind {self.kind!r}")
        if self.protocol not in PROTOCOLS:
            raise ValueError(f"unknown protocol {self.protocol!r}")
        for tier in self.tiers:
            if tier not in TIERS:
                raise ValueError(f"unknown tier {tier!r}")
        axes = {}
        for name, values in self.axes.items():
            arr = np.asarray(values, dtype=float)
            if arr.size == 0:
                raise ValueError(f"axis {name!r} is empty")
            if arr.size > 1 and not (np.all(np.diff(arr) > 0)
                                     or np.all(np.diff(arr) < 0)):
                raise ValueError(f"axis {name!r} must be strictly monotone")
            axes[name] = tuple(float(v) for v in arr)
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "tiers", tuple(self.tiers))
        object.__setattr__(self, "fixed", dict(self.fixed))

    def to_json(self) -> str:
        payload = {
            "kind": self.kind,
            "protocol": self.protocol,
            "tiers": list(self.tiers),
            "axes": {k: list(map(float, v)) for k, v in self.axes.items()},
            "fixed": dict(self.fixed),
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "SweepSpec":
        payload = json.loads(text)
        return cls(
            kind=payload["kind"],
            protocol=payload["protocol"],
            tiers=tuple(payload.get("tiers", ("rwa3",))),
            axes={k: tuple(v) for k, v in payload.get("axes", {}).items()},
            fixed=dict(payload.get("fixed", {})),
        )


@dataclass
class ExperimentResult:
    spec: SweepSpec
    columns: tuple
    rows: list  # list of tuples aligned with columns
    metadata: dict


def _train_for(protocol: str, system: LevelSystem, bandwidth_ratio: float,
               n_pairs: int = 6, area_error: float = 0.0):
    bandwidth = bandwidth_ratio * system.delta1
    if protocol == "stirap":
        return stirap_pair(StirapSpec(bandwidth=bandwidth), system)
    spec = JumpSpec(n_pairs=n_pairs, tau_J=1.0 / bandwidth,
                    area_error=area_error)
    return jump_train(spec, system)


def _point_populations(task: tuple) -> tuple:
    """Worker: final populations for one (axis point, tier) task."""
    (protocol, tier, bandwidth_ratio, n_pairs, area_error,
     detuning2) = task
    system = build_rb87_system()
    train = _train_for(protocol, system, bandwidth_ratio, n_pairs, area_error)
    model = build_model(tier, system, train, detuning2=detuning2)
    psi0 = np.zeros(model.dimension, dtype=complex)
    psi0[0] = 1.0
    grid = np.array([train.t_start, train.t_end])
    result = propagate(model, psi0, grid)
    pops = result.populations[-1]
    padded = tuple(float(p) for p in pops) + ("",) * (4 - len(pops))
    return padded + (result.step_count, "")


def _run_tasks(tasks: list, workers: int | None) -> list:
    if workers is None:
        workers = os.cpu_count() or 1
    out = []
    if workers <= 1 or len(tasks) <= 1:
        for task in tasks:
            out.append(_eval_guarded(task))
        return out
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # map preserves submission order, so the merge is deterministic
        out = list(pool.map(_eval_guarded, tasks, chunksize=1))
    return out


def _eval_guarded(task: tuple) -> tuple:
    try:
        return _point_populations(task)
    except Exception as exc:  # flag the row, keep the scan alive
        return ("",) * 4 + (0, f"{type(exc).__name__}: {exc}")


def _axis(spec: SweepSpec, name: str, default: np.ndarray) -> np.ndarray:
    if name in spec.axes:
        return np.asarray(spec.axes[name], dtype=float)
    return default


def run_bandwidth_scan(spec: SweepSpec, workers: int | None = None
                       ) -> ExperimentResult:
    """Final populations versus pulse bandwidth for each tier."""
    t0 = time.perf_counter()
    ratios = _axis(spec, "bandwidth_ratio",
                   np.logspace(math.log10(1e-2), math.log10(1e-1), 60))
    n_pairs = int(spec.fixed.get("n_pairs", 1))
    area_error = float(spec.fixed.get("area_error", 0.0))
    detuning2 = float(spec.fixed.get("detuning2_mhz", 0.0)) * MHZ
    tasks, keys = [], []
    for ratio in ratios:
        for tier in spec.tiers:
            tasks.append((spec.protocol, tier, float(ratio), n_pairs,
                          area_error, detuning2))
            keys.append((float(ratio), tier))
    results = _run_tasks(tasks, workers)
    rows = [key + res for key, res in zip(keys, results)]
    columns = ("bandwidth_ratio", "tier", "P1", "P2", "P1p", "P2p",
               "steps", "error")
    meta = _metadata(t0, len(rows))
    return ExperimentResult(spec, columns, rows, meta)


def run_robustness_scan(spec: SweepSpec, workers: int | None = None
                        ) -> ExperimentResult:
    """Final P2 versus pulse-area error for each pair count and tier."""
    t0 = time.perf_counter()
    errors = _axis(spec, "area_error", np.linspace(-math.pi, math.pi, 81))
    n_list = _axis(spec, "n_pairs", np.arange(1, 7, dtype=float))
    ratio = float(spec.fixed.get("bandwidth_ratio", 1.0 / 30.0))
    detuning2 = float(spec.fixed.get("detuning2_mhz", 0.0)) * MHZ
    tasks, keys = [], []
    for n in n_list:
        for err in errors:
            for tier in spec.tiers:
                tasks.append((spec.protocol, tier, ratio, int(n),
                              float(err), detuning2))
                keys.append((int(n), float(err), tier))
    results = _run_tasks(tasks, workers)
    rows = [key + res for key, res in zip(keys, results)]
    columns = ("n_pairs", "area_error", "tier", "P1", "P2", "P1p", "P2p",
               "steps", "error")
    return ExperimentResult(spec, columns, rows, _metadata(t0, len(rows)))


def run_fidelity_map(spec: SweepSpec, workers: int | None = None
                     ) -> ExperimentResult:
    """Final P2 over the (area error, two-photon detuning) grid."""
    t0 = time.perf_counter()
    errors = _axis(spec, "area_error",
                   np.linspace(-math.pi, 0.5 * math.pi, 31))
    det_mhz = _axis(spec, "detuning2_mhz", np.linspace(-30.0, 10.0, 41))
    ratio = float(spec.fixed.get("bandwidth_ratio", 1.0 / 30.0))
    n_pairs = int(spec.fixed.get("n_pairs", 6))
    tasks, keys = [], []
    for err in errors:
        for dm in det_mhz:
            for tier in spec.tiers:
                tasks.append((spec.protocol, tier, ratio, n_pairs,
                              float(err), float(dm) * MHZ))
                keys.append((float(err), float(dm), tier))
    results = _run_tasks(tasks, workers)
    rows = [key + res for key, res in zip(keys, results)]
    columns = ("area_error", "detuning2_mhz", "tier", "P1", "P2", "P1p",
               "P2p", "steps", "error")
    return ExperimentResult(spec, columns, rows, _metadata(t0, len(rows)))


def run_time_trace(spec: SweepSpec, workers: int | None = None,
                   n_samples: int = 2000) -> ExperimentResult:
    """Population trace over time for each tier at one parameter point."""
    t0 = time.perf_counter()
    ratio = float(spec.fixed.get("bandwidth_ratio", 1.0 / 30.0))
    n_pairs = int(spec.fixed.get("n_pairs", 6))
    area_error = float(spec.fixed.get("area_error", 0.0))
    detuning2 = float(spec.fixed.get("detuning2_mhz", 0.0)) * MHZ
    system = build_rb87_system()
    train = _train_for(spec.protocol, system, ratio, n_pairs, area_error)
    grid = default_output_grid(train, n_samples)
    rows = []
    for tier in spec.tiers:
        model = build_model(tier, system, train, detuning2=detuning2)
        psi0 = np.zeros(model.dimension, dtype=complex)
        psi0[0] = 1.0
        result = propagate(model, psi0, grid)
        for t, pops in zip(result.times, result.populations):
            padded = tuple(float(p) for p in pops) + ("",) * (4 - len(pops))
            rows.append((tier, float(t)) + padded)
    columns = ("tier", "t_ns", "P1", "P2", "P1p", "P2p")
    return ExperimentResult(spec, columns, rows, _metadata(t0, len(rows)))


def run_diagnostics_trace(spec: SweepSpec, workers: int | None = None,
                          n_samples: int = 2000) -> ExperimentResult:
    """Adiabatic-frame trace (eigenvalues, theta, alpha, eps, p0_ad)."""
    t0 = time.perf_counter()
    ratio = float(spec.fixed.get("bandwidth_ratio", 1.0 / 30.0))
    n_pairs = int(spec.fixed.get("n_pairs", 6))
    area_error = float(spec.fixed.get("area_error", 0.0))
    tier = spec.tiers[0]
    if tier != "rwa3":
        raise ValueError("diagnostics traces are defined for tier rwa3")
    system = build_rb87_system()
    train = _train_for(spec.protocol, system, ratio, n_pairs, area_error)
    model = build_model(tier, system, train)
    grid = default_output_grid(train, n_samples)
    psi0 = np.zeros(model.dimension, dtype=complex)
    psi0[0] = 1.0
    prop = propagate(model, psi0, grid)
    trace = diagnostics_trace(model, grid, prop)
    rows = []
    for i, t in enumerate(trace.times):
        rows.append((
            float(t),
            trace.eigenvalues[i, 0], trace.eigenvalues[i, 1],
            trace.eigenvalues[i, 2], trace.theta[i],
            trace.alpha[i, 0], trace.alpha[i, 2],
            trace.epsilon[i, 0], trace.epsilon[i, 1],
            trace.p0_ad[i],
        ))
    columns = ("t_ns", "E_minus", "E_0", "E_plus", "theta",
               "alpha_minus", "alpha_plus", "eps_0minus", "eps_0plus",
               "p0_ad")
    return ExperimentResult(spec, columns, rows, _metadata(t0, len(rows)))


_RUNNERS = {
    "bandwidth_scan": run_bandwidth_scan,
    "robustness_scan": run_robustness_scan,
    "time_trace": run_time_trace,
    "fidelity_map": run_fidelity_map,
    "diagnostics_trace": run_diagnostics_trace,
}


def run_sweep(spec: SweepSpec, workers: int | None = None
              ) -> ExperimentResult:
    return _RUNNERS[spec.kind](spec, workers)


def _metadata(t0: float, n_rows: int) -> dict:
    return {
        "version": __version__,
        "wall_time_s": round(time.perf_counter() - t0, 3),
        "rows": n_rows,
    }


def _format_cell(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if math.isnan(v):
        return "nan"
    return f"{v:.9g}"


def emit(result: ExperimentResult, fmt: str, path: str) -> None:
    """Write the result as CSV or JSON; rows are already in axis order."""
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown format {fmt!r}")
    try:
        if fmt == "csv":
            lines = [",".join(result.columns)]
            for row in result.rows:
                lines.append(",".join(_format_cell(c) for c in row))
            body = "\n".join(lines) + "\n"
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(body)
        else:
            payload = {
                "spec": json.loads(result.spec.to_json()),
                "metadata": result.metadata,
                "columns": list(result.columns),
                "rows": [[(c or None) if isinstance(c, str) else
                          (int(c) if isinstance(c, (int, np.integer))
                           else float(c)) for c in row]
                         for row in result.rows],
            }
            with open(path, "w", encoding="utf-8") as fh:
                json.dump(payload, fh, indent=2)
                fh.write("\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
