"""Figure rendering for benchmark reports and label-frequency tables.

Renders the two report styles next to their delimited outputs: per-length
mean runtime with a standard-deviation bar per query-length bucket, and the
ranked label-frequency distribution.  Files only; no interactive backends.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .harness import BenchReport


def plot_bench_reports(reports: Sequence[BenchReport], out_path: str) -> None:
    """Mean runtime (ms) with stddev bars per query length, one series each."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for report in reports:
        lengths = [row.length for row in report.rows if row.count]
        means = [row.mean_ns / 1e6 for row in report.rows if row.count]
        devs = [row.stddev_ns / 1e6 for row in report.rows if row.count]
        ax.errorbar(
            lengths,
            means,
            yerr=devs,
            marker="o",
            capsize=3,
            linestyle="-",
            label=report.method,
        )
    ax.set_xlabel("query length")
    ax.set_ylabel("runtime (ms)")
    ax.set_title("mean query runtime by length")
    if any(report.rows for report in reports):
        ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)


def plot_label_frequencies(rows: Iterable[tuple[str, int]], out_path: str) -> None:
    """Ranked label frequencies on a log scale."""
    rows = list(rows)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ranks = range(1, len(rows) + 1)
    ax.bar(ranks, [count for _, count in rows], width=0.8)
    ax.set_yscale("log")
    ax.set_xlabel("label rank")
    ax.set_ylabel("edge count")
    ax.set_title("edge label frequencies")
    ax.grid(True, axis="y", alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
