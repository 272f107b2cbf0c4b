"""Figure rendering for condition summaries.

Produces vector (SVG) files alongside the delimited summary output:
speedup-vs-team-size with Amdahl curves, conflict counts by kind and
scheme, overhead (messages and idle rounds) vs team size, and straggler
gaps by scheme and condition. Plots with no data series are skipped with a
warning rather than raised.
"""
from __future__ import annotations

import os
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .metrics import MetricsReport, amdahl_bound  # noqa: E402
from .taskgraph import CONDITION_P  # noqa: E402

_CONDITION_ORDER = ("parallel", "mixed", "serial")
_CONFLICT_KINDS = ("concurrent_writes", "rewrites", "temporal_violations")
_CONFLICT_LABELS = ("Concurrent write", "Rewrite", "Temporal violation")


def _by(reports, *fields):
    grouped = defaultdict(list)
    for r in reports:
        grouped[tuple(getattr(r, f) for f in fields)].append(r)
    return grouped


def _mean(values):
    values = [v for v in values if v is not None]
    return sum(values) / len(values) if values else None


def plot_speedup(reports: list[MetricsReport], path: str) -> bool:
    schemes = sorted({r.scheme for r in reports})
    series_found = False
    fig, axes = plt.subplots(1, max(len(schemes), 1),
                             figsize=(5.5 * max(len(schemes), 1), 4.0),
                             squeeze=False)
    for ax, scheme in zip(axes[0], schemes):
        for condition in _CONDITION_ORDER:
            cells = [r for r in reports
                     if r.scheme == scheme and r.condition == condition]
            points = sorted(
                (n, _mean([c.speedup for c in cells if c.n_agents == n]))
                for n in {c.n_agents for c in cells}
            )
            points = [(n, s) for n, s in points if s is not None]
            if points:
                series_found = True
                ax.plot(*zip(*points), marker="o",
                        label=f"{condition} (observed)")
            p = CONDITION_P[condition]
            ns = list(range(1, 6))
            ax.plot(ns, [amdahl_bound(p, n) for n in ns], linestyle="--",
                    alpha=0.6, label=f"Amdahl p={p}")
        ax.set_xlabel("Team size N")
        ax.set_ylabel("Speedup S(N)")
        ax.set_title(scheme)
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return series_found


def plot_conflicts(reports: list[MetricsReport], path: str) -> bool:
    schemes = sorted({r.scheme for r in reports})
    if not schemes:
        return False
    fig, ax = plt.subplots(figsize=(6, 4))
    width = 0.8 / len(schemes)
    for i, scheme in enumerate(schemes):
        cells = [r for r in reports if r.scheme == scheme]
        totals = [sum(getattr(c, kind) for c in cells) for kind in _CONFLICT_KINDS]
        xs = [j + i * width for j in range(len(_CONFLICT_KINDS))]
        ax.bar(xs, totals, width=width, label=scheme)
    ax.set_xticks([j + width * (len(schemes) - 1) / 2
                   for j in range(len(_CONFLICT_KINDS))])
    ax.set_xticklabels(_CONFLICT_LABELS)
    ax.set_ylabel("Conflict events")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return True


def plot_overhead(reports: list[MetricsReport], path: str) -> bool:
    schemes = sorted({r.scheme for r in reports})
    if not schemes:
        return False
    fig, (ax_msg, ax_idle) = plt.subplots(1, 2, figsize=(10, 4))
    for scheme in schemes:
        cells = [r for r in reports if r.scheme == scheme]
        ns = sorted({c.n_agents for c in cells})
        msgs = [sum(c.messages for c in cells if c.n_agents == n) for n in ns]
        idles = [sum(c.idle_rounds for c in cells if c.n_agents == n) for n in ns]
        ax_msg.plot(ns, msgs, marker="o", label=scheme)
        ax_idle.plot(ns, idles, marker="o", label=scheme)
    ax_msg.set_xlabel("Team size N")
    ax_msg.set_ylabel("Messages")
    ax_idle.set_xlabel("Team size N")
    ax_idle.set_ylabel("Idle agent-rounds")
    ax_msg.legend()
    ax_idle.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return True


def plot_stragglers(reports: list[MetricsReport], path: str) -> bool:
    schemes = sorted({r.scheme for r in reports})
    if not schemes:
        return False
    fig, ax = plt.subplots(figsize=(6, 4))
    width = 0.8 / len(schemes)
    for i, scheme in enumerate(schemes):
        means = []
        for condition in _CONDITION_ORDER:
            cells = [r for r in reports
                     if r.scheme == scheme and r.condition == condition]
            means.append(_mean([c.straggler_gap_mean for c in cells]) or 0.0)
        xs = [j + i * width for j in range(len(_CONDITION_ORDER))]
        ax.bar(xs, means, width=width, label=scheme)
    ax.set_xticks([j + width * (len(schemes) - 1) / 2
                   for j in range(len(_CONDITION_ORDER))])
    ax.set_xticklabels(_CONDITION_ORDER)
    ax.set_ylabel("Mean straggler gap (s)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return True


def emit_plots(reports: list[MetricsReport], out_dir: str) -> tuple[list[str], list[str]]:
    """Render all figures into out_dir/plots; returns (paths, warnings)."""
    plot_dir = os.path.join(out_dir, "plots")
    os.makedirs(plot_dir, exist_ok=True)
    emitted: list[str] = []
    warnings: list[str] = []
    if not reports:
        return emitted, ["no summary cells: all plots skipped"]
    for name, fn in (
        ("speedup.svg", plot_speedup),
        ("conflicts.svg", plot_conflicts),
        ("overhead.svg", plot_overhead),
        ("stragglers.svg", plot_stragglers),
    ):
        path = os.path.join(plot_dir, name)
        if fn(reports, path):
            emitted.append(path)
        else:
            warnings.append(f"missing data series: {name} omitted")
            if os.path.exists(path):
                os.remove(path)
    return emitted, warnings
