"""Figure rendering over the documented scan/trace CSV formats.

Four figure kinds map onto the four artifact layouts:

* ``trace``        population time traces (``tier,t_ns,P1,P2[,P1p,P2p]``)
* ``scan``         final population versus a scan axis, tiers overlaid
* ``heatmap``      P2 over the (area_error, detuning2_mhz) grid
* ``diagnostics``  adiabatic-frame panels (energies, angle, accumulation)

Rendering is read-only over its inputs and style is fixed, so repeated
runs regenerate identical files.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

KINDS = ("trace", "scan", "heatmap", "diagnostics")

# bandwidth scans get a vertical guide at the adiabatic limit ratio
BANDWIDTH_REFERENCE = 1.0 / 45.0

POPULATION_COLUMNS = ("P1", "P2", "P1p", "P2p")
SCAN_AXES = ("bandwidth_ratio", "area_error")

MARKERS = ("o", "s", "^", "d", "v", "*")


class MissingColumnError(ValueError):
    """A required CSV column is absent from the input header."""

    def __init__(self, kind: str, missing: list[str]):
        self.missing = missing
        super().__init__(
            f"figure kind {kind!r} requires missing column(s): "
            + ", ".join(missing))


@dataclass(frozen=True)
class FigureJob:
    """One input CSV rendered to one image file."""

    kind: str
    input_path: str
    output_path: str
    x_log: bool = False
    reference_x: float | None = None
    title: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}")


def load_table(path: str) -> tuple[list[str], dict[str, list[str]]]:
    """Read a CSV into per-column string lists; empty body is an error."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: no CSV header") from None
        columns: dict[str, list[str]] = {name: [] for name in header}
        for row in reader:
            for name, cell in zip(header, row):
                columns[name].append(cell)
    if not columns or not next(iter(columns.values())):
        raise ValueError(f"{path}: CSV body is empty, nothing to plot")
    return header, columns


def _floats(cells: list[str]) -> np.ndarray:
    return np.array([float(c) if c else math.nan for c in cells])


def _require(job: FigureJob, header: list[str], names: tuple[str, ...]) -> None:
    missing = [n for n in names if n not in header]
    if missing:
        raise MissingColumnError(job.kind, missing)


def _good_rows(columns: dict[str, list[str]]) -> np.ndarray:
    n = len(next(iter(columns.values())))
    ok = np.ones(n, dtype=bool)
    if "error" in columns:
        ok &= np.array([c == "" for c in columns["error"]])
    if "P2" in columns:
        ok &= np.array([c != "" for c in columns["P2"]])
    return ok


def _scan_axis(header: list[str]) -> str:
    for name in SCAN_AXES:
        if name in header:
            return name
    raise MissingColumnError("scan", [" or ".join(SCAN_AXES)])


def _render_trace(job: FigureJob, header, columns, ax) -> dict:
    _require(job, header, ("t_ns", "P1", "P2"))
    t = _floats(columns["t_ns"])
    tiers = columns.get("tier", ["" for _ in t])
    drawn = 0
    for tier in dict.fromkeys(tiers):  # first-seen order
        sel = np.array([x == tier for x in tiers])
        label = f" ({tier})" if tier else ""
        for name in POPULATION_COLUMNS:
            if name not in columns:
                continue
            p = _floats(columns[name])[sel]
            if np.all(np.isnan(p)):
                continue
            ax.plot(t[sel], p, lw=1.2, label=name + label)
            drawn += 1
    ax.set_xlabel("t (ns)")
    ax.set_ylabel("population")
    ax.set_ylim(-0.02, 1.02)
    ax.legend(fontsize=8)
    return {"lines": drawn}


def _render_scan(job: FigureJob, header, columns, ax) -> dict:
    axis = _scan_axis(header)
    _require(job, header, (axis, "tier", "P2"))
    ok = _good_rows(columns)
    x = _floats(columns[axis])
    p2 = _floats(columns["P2"])
    tiers = columns["tier"]
    groups = []
    for tier in dict.fromkeys(tiers):
        key = [tier]
        sel = ok & np.array([t == tier for t in tiers])
        if "n_pairs" in columns:
            for n in dict.fromkeys(columns["n_pairs"]):
                nsel = sel & np.array([v == n for v in columns["n_pairs"]])
                if nsel.any():
                    groups.append((f"{tier} N={n}", nsel))
        elif sel.any():
            groups.append((tier, sel))
    for i, (label, sel) in enumerate(groups):
        order = np.argsort(x[sel])
        ax.plot(x[sel][order], p2[sel][order],
                marker=MARKERS[i % len(MARKERS)], ms=3.5, lw=1.0,
                label=label)
    ref = job.reference_x
    if ref is None and axis == "bandwidth_ratio":
        ref = BANDWIDTH_REFERENCE
    if ref is not None:
        ax.axvline(ref, color="0.4", ls="--", lw=0.9)
    if job.x_log or axis == "bandwidth_ratio":
        ax.set_xscale("log")
    ax.set_xlabel(axis)
    ax.set_ylabel("P2")
    ax.legend(fontsize=8)
    return {"curves": len(groups), "reference_x": ref}


def _render_heatmap(job: FigureJob, header, columns, ax) -> dict:
    _require(job, header, ("area_error", "detuning2_mhz", "P2"))
    ok = _good_rows(columns)
    err = _floats(columns["area_error"])[ok]
    det = _floats(columns["detuning2_mhz"])[ok]
    p2 = _floats(columns["P2"])[ok]
    xs = np.unique(err)
    ys = np.unique(det)
    grid = np.full((len(ys), len(xs)), math.nan)
    xi = np.searchsorted(xs, err)
    yi = np.searchsorted(ys, det)
    grid[yi, xi] = p2
    mesh = ax.pcolormesh(xs, ys, grid, shading="nearest",
                         cmap="viridis", vmin=0.0, vmax=1.0)
    plt.colorbar(mesh, ax=ax, label="P2")
    best = int(np.nanargmax(p2))
    optimum = (float(err[best]), float(det[best]))
    ax.plot(*optimum, marker="x", color="red", ms=10, mew=2)
    ax.set_xlabel("area error (rad)")
    ax.set_ylabel("two-photon detuning (MHz)")
    return {"optimum": optimum, "optimum_p2": float(p2[best])}


def _render_diagnostics(job: FigureJob, header, columns, fig) -> dict:
    needed = ("t_ns", "E_minus", "E_0", "E_plus", "theta",
              "eps_0minus", "eps_0plus", "p0_ad")
    _require(job, header, needed)
    t = _floats(columns["t_ns"])
    axes = fig.subplots(4, 1, sharex=True)
    for name in ("E_minus", "E_0", "E_plus"):
        axes[0].plot(t, _floats(columns[name]), lw=1.0, label=name)
    axes[0].set_ylabel("E (rad/ns)")
    axes[0].legend(fontsize=7)
    axes[1].plot(t, _floats(columns["theta"]) / math.pi, lw=1.0)
    axes[1].set_ylabel(r"$\theta/\pi$")
    for name in ("eps_0minus", "eps_0plus"):
        axes[2].plot(t, _floats(columns[name]), lw=1.0, label=name)
    axes[2].set_ylabel(r"$\epsilon$")
    axes[2].legend(fontsize=7)
    axes[3].plot(t, _floats(columns["p0_ad"]), lw=1.0)
    axes[3].set_ylabel("p0_ad")
    axes[3].set_xlabel("t (ns)")
    return {"panels": 4}


def render(job: FigureJob) -> dict:
    """Render one job; returns a summary of what was drawn.

    The summary includes, for heatmaps, the marked ``optimum`` cell
    (the argmax row of the input) so callers can cross-check it.
    """
    header, columns = load_table(job.input_path)
    fig = plt.figure(figsize=(6.0, 6.5 if job.kind == "diagnostics" else 4.2))
    try:
        if job.kind == "diagnostics":
            info = _render_diagnostics(job, header, columns, fig)
        else:
            ax = fig.subplots()
            info = {
                "trace": _render_trace,
                "scan": _render_scan,
                "heatmap": _render_heatmap,
            }[job.kind](job, header, columns, ax)
        if job.title:
            fig.suptitle(job.title)
        fig.tight_layout()
        fig.savefig(job.output_path, dpi=150)
    finally:
        plt.close(fig)
    info["output"] = job.output_path
    return info
