"""SVG chart rendering for sweep and scaling outputs.

Uses the Agg backend with a fixed hash salt and no creation date in the
metadata, so rendering the same records twice yields identical bytes.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

plt.rcParams["svg.hashsalt"] = "annealfair"


def _save(fig, path) -> Path:
    path = Path(path)
    fig.savefig(path, format="svg", metadata={"Date": None}, bbox_inches="tight")
    plt.close(fig)
    return path


def plot_entropy_vs_control(records_by_instance: dict, path, control_label: str) -> Path:
    """Entropy against the penalty control, one line per instance.

    Only valid points (ground-state probability effectively 1) appear,
    mirroring how the records are used for monotonicity.
    """
    fig, ax = plt.subplots(figsize=(5.0, 3.2))
    for key in sorted(records_by_instance):
        pts = [
            (r.control, r.entropy)
            for r in records_by_instance[key]
            if r.valid and not math.isnan(r.entropy)
        ]
        if not pts:
            continue
        xs, ys = zip(*pts)
        ax.plot(xs, ys, marker="o", markersize=2.5, linewidth=0.9, alpha=0.8)
    ax.set_xlabel(f"penalty coefficient {control_label}")
    ax.set_ylabel("entropy S (bits)")
    ax.grid(True, alpha=0.3)
    return _save(fig, path)


def plot_time_sweep(records, path, control_label: str) -> Path:
    """Total ground-state probability and entropy against anneal time,
    one line per control value."""
    by_control: dict[float, list] = {}
    for r in records:
        by_control.setdefault(r.control, []).append(r)
    fig, (ax_p, ax_s) = plt.subplots(2, 1, figsize=(5.0, 5.4), sharex=True)
    for control in sorted(by_control):
        recs = sorted(by_control[control], key=lambda r: r.T)
        ts = [r.T for r in recs]
        label = f"{control_label}={control:g}"
        ax_p.plot(ts, [r.p_gs for r in recs], marker="o", markersize=2.5, label=label)
        ax_s.plot(ts, [r.entropy for r in recs], marker="o", markersize=2.5, label=label)
    ax_p.set_ylabel("ground-state probability")
    ax_s.set_ylabel("entropy S (bits)")
    ax_s.set_xlabel("anneal time T")
    ax_p.set_xscale("log")
    for ax in (ax_p, ax_s):
        ax.grid(True, alpha=0.3)
    ax_p.legend(fontsize=7, ncol=2)
    return _save(fig, path)


def plot_scaling_entropy(result, path) -> Path:
    """Stacked panels, one per system size, each with all instance curves."""
    sizes = [row.n for row in result.rows]
    fig, axes = plt.subplots(
        len(sizes), 1, figsize=(5.0, 1.9 * len(sizes) + 0.8), sharex=True, squeeze=False
    )
    for ax, n in zip(axes[:, 0], sizes):
        for ir in result.instances:
            if ir.n != n:
                continue
            pts = [
                (r.control, r.entropy)
                for r in ir.records
                if r.valid and not math.isnan(r.entropy)
            ]
            if not pts:
                continue
            xs, ys = zip(*pts)
            ax.plot(xs, ys, linewidth=0.6, alpha=0.5)
        ax.set_ylabel(f"S (N={n})")
        ax.grid(True, alpha=0.3)
    axes[-1, 0].set_xlabel("penalty coefficient λ")
    return _save(fig, path)
