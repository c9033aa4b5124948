"""The four figure kinds rendered from simulator artifacts.

trajectories  three panels: position fan (wrapped, with break handling),
              velocity features (first agent, ensemble mean, V_p), and
              distance features (first agent deviation, V_Q)
acf           autocorrelation overlays of one or more `lag,rho` files
histograms    simulated histogram bars with a Monte-Carlo density overlay
k_entries     the parabola-shaped rows of the distance-coupling kernel
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import (
    SchemaError,
    Table,
    k_row_from_limit,
    read_limit_json,
    read_table,
    require_columns,
)

__all__ = ["FigureSpec", "KINDS", "render", "wrap_with_breaks"]

KINDS = ("trajectories", "acf", "histograms", "k_entries")


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    inputs: tuple[Path, ...]
    out: Path
    wrap: bool = True
    highlight_agent: int = 1
    ring_length: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; one of {KINDS}")
        if not self.inputs:
            raise ValueError("at least one input file is required")


def wrap_with_breaks(q: np.ndarray, ring_length: float) -> np.ndarray:
    """Positions folded onto [0, L) with NaN breaks at the wrap jumps.

    A fold moves consecutive samples by about L, which would paint spurious
    horizontal lines; masking the first sample after each jump larger than
    L/2 splits the trace into clean segments.
    """
    wrapped = np.mod(q, ring_length).astype(float)
    jumps = np.abs(np.diff(wrapped, axis=0)) > ring_length / 2.0
    out = wrapped.copy()
    rows, cols = np.nonzero(jumps)
    out[rows + 1, cols] = np.nan
    return out


def _agent_columns(table: Table, prefix: str) -> np.ndarray:
    names = [c for c in table.columns if c.startswith(prefix)]
    expected = [f"{prefix}{i + 1}" for i in range(len(names))]
    if not names or names != expected:
        raise SchemaError(f"{table.path}: expected contiguous columns "
                          f"{prefix}1..{prefix}N, have {list(table.columns)}")
    return np.column_stack([table.column(c) for c in names])


def _render_trajectories(spec: FigureSpec) -> None:
    table = read_table(spec.inputs[0])
    require_columns(table, ["t"])
    t = table.column("t")
    q = _agent_columns(table, "q_")
    p = _agent_columns(table, "p_")
    ring_length = (spec.ring_length if spec.ring_length is not None
                   else table.meta_float("ring_length"))
    n = q.shape[1]
    first = spec.highlight_agent - 1
    if not 0 <= first < n:
        raise ValueError(f"highlight agent {spec.highlight_agent} out of 1..{n}")

    Q = np.roll(q, -1, axis=1) - q
    Q[:, -1] += ring_length
    p_bar = p.mean(axis=1)
    v_p = p.var(axis=1)
    v_q = Q.var(axis=1)

    fig, axes = plt.subplots(3, 1, figsize=(9, 9), sharex=True,
                             gridspec_kw={"height_ratios": [2, 1, 1]})
    top, mid, bot = axes

    q_plot = wrap_with_breaks(q, ring_length) if spec.wrap else q
    for agent in range(n):
        if agent != first:
            top.plot(t, q_plot[:, agent], color="0.65", lw=0.6)
    top.plot(t, q_plot[:, first], color="tab:blue", lw=1.4,
             label=f"agent {spec.highlight_agent}")
    top.set_ylabel("position" + (" (mod L)" if spec.wrap else ""))
    top.legend(loc="upper right", fontsize=8)

    mid.plot(t, p[:, first], color="tab:blue", lw=0.8,
             label=f"p_{spec.highlight_agent}")
    mid.plot(t, p_bar, color="black", lw=1.2, label="mean velocity")
    mid.plot(t, v_p, color="tab:red", lw=1.0, label="V_p")
    mid.set_ylabel("velocity features")
    mid.legend(loc="upper right", fontsize=8)

    bot.plot(t, Q[:, first] - ring_length / n, color="tab:blue", lw=0.8,
             label=f"Q_{spec.highlight_agent} - L/N")
    bot.plot(t, v_q, color="tab:red", lw=1.0, label="V_Q")
    bot.set_ylabel("distance features")
    bot.set_xlabel("t")
    bot.legend(loc="upper right", fontsize=8)

    scenario = table.meta.get("scenario", table.path.stem)
    fig.suptitle(f"trajectories: {scenario}")
    fig.tight_layout()
    fig.savefig(spec.out, dpi=150)
    plt.close(fig)


def _render_acf(spec: FigureSpec) -> None:
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for path in spec.inputs:
        table = read_table(path)
        require_columns(table, ["lag", "rho"])
        label = table.meta.get("scenario", Path(path).stem)
        ax.plot(table.column("lag"), table.column("rho"), lw=1.2, label=label)
    ax.axhline(0.0, color="0.7", lw=0.6)
    ax.set_xlabel("lag (time units)")
    ax.set_ylabel("autocorrelation")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(spec.out, dpi=150)
    plt.close(fig)


def _render_histograms(spec: FigureSpec) -> None:
    hist = read_table(spec.inputs[0])
    require_columns(hist, ["bin_left", "bin_right", "count"])
    left = hist.column("bin_left")
    right = hist.column("bin_right")
    counts = hist.column("count")
    width = right - left
    total = counts.sum() * width
    density = np.divide(counts, total, out=np.zeros_like(counts),
                        where=total > 0)

    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.bar(left, density, width=width, align="edge", color="tab:blue",
           alpha=0.55, label=hist.meta.get("scenario", "simulation"))

    if len(spec.inputs) > 1:
        mc = read_table(spec.inputs[1])
        require_columns(mc, ["value"])
        values = mc.column("value")
        grid_counts, edges = np.histogram(values, bins=120, density=True)
        centers = 0.5 * (edges[:-1] + edges[1:])
        ax.plot(centers, grid_counts, color="black", lw=1.4,
                label="Monte-Carlo reference")
    ax.set_xlabel("ensemble variance")
    ax.set_ylabel("density")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(spec.out, dpi=150)
    plt.close(fig)


def _render_k_entries(spec: FigureSpec) -> None:
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for path in spec.inputs:
        doc = read_limit_json(path)
        row = k_row_from_limit(doc)
        n = row.size
        k = np.arange(1, n + 1)
        label = f"N={n}" if len(spec.inputs) > 1 else doc.get("scenario", f"N={n}")
        ax.plot(k, row, marker="o", ms=3, lw=1.0, label=label)
    ax.axhline(0.0, color="0.7", lw=0.6)
    ax.set_xlabel("agent offset k")
    ax.set_ylabel("kernel entry")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(spec.out, dpi=150)
    plt.close(fig)


_RENDERERS = {
    "trajectories": _render_trajectories,
    "acf": _render_acf,
    "histograms": _render_histograms,
    "k_entries": _render_k_entries,
}


def render(spec: FigureSpec) -> Path:
    """Render one figure; a pure function of the input files and the FigureSpec."""
    spec.out.parent.mkdir(parents=True, exist_ok=True)
    _RENDERERS[spec.kind](spec)
    return spec.out
