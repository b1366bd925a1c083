"""Figure rendering for experiment grids.

Renders one accuracy-versus-size figure and one dependence-profile
figure per (dataset, method) pair into an output directory, next to
the CSV reports. Matplotlib is imported lazily with the ``Agg``
backend so importing this module never touches a display.
"""

from __future__ import annotations

import re
from pathlib import Path

from .harness import GridResult

DEFAULT_DPI = 120


def _slug(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "_", text)


def _load_pyplot():
    import matplotlib

    matplotlib.use("Agg", force=False)
    import matplotlib.pyplot as plt

    return plt


def render_experiment_figures(
    result: GridResult, outdir, dpi: int = DEFAULT_DPI
) -> list[Path]:
    """Render accuracy and profile figures for every summary in ``result``.

    Returns the written paths. The accuracy figure overlays the linear
    independence probability at each tested size and marks the solved
    ideal sizes when they are reachable; the profile figure tracks each
    dependence dimension across ensemble sizes.
    """
    plt = _load_pyplot()
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    for summary in result.summaries:
        rows = sorted(
            (
                row
                for row in result.rows
                if row.dataset == summary.dataset
                and row.method == summary.method
            ),
            key=lambda row: row.size,
        )
        if not rows:
            continue
        stem = f"{_slug(summary.dataset)}_{_slug(summary.method)}"
        written.append(
            _accuracy_figure(plt, summary, rows,
                             outdir / f"{stem}_accuracy.png", dpi)
        )
        written.append(
            _profile_figure(plt, summary, rows,
                            outdir / f"{stem}_profile.png", dpi)
        )
    return written


def _accuracy_figure(plt, summary, rows, path: Path, dpi: int) -> Path:
    sizes = [row.size for row in rows]
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.errorbar(
        sizes,
        [row.mean_accuracy for row in rows],
        yerr=[row.accuracy_stddev for row in rows],
        marker="o", capsize=3, color="tab:blue", label="accuracy",
    )
    ax.set_xscale("log", base=2)
    ax.set_xticks(sizes)
    ax.xaxis.set_major_formatter("{x:g}")
    ax.set_xlabel("ensemble size")
    ax.set_ylabel("prequential accuracy", color="tab:blue")
    twin = ax.twinx()
    twin.plot(
        sizes, [row.pli for row in rows],
        marker="s", linestyle="--", color="tab:orange",
        label="P(linear independence)",
    )
    twin.set_ylabel("P(linear independence)", color="tab:orange")
    twin.set_ylim(-0.02, 1.02)
    for value, style, tag in ((summary.inc, "-.", "INC"),
                              (summary.sinc, ":", "SINC")):
        if value is not None and min(sizes) <= value <= max(sizes):
            ax.axvline(value, color="gray", linestyle=style, linewidth=1)
            ax.annotate(f"{tag}={value}", (value, ax.get_ylim()[0]),
                        textcoords="offset points", xytext=(4, 6),
                        fontsize=8, color="gray")
    ax.set_title(f"{summary.dataset} / {summary.method}")
    handles, labels = ax.get_legend_handles_labels()
    twin_handles, twin_labels = twin.get_legend_handles_labels()
    ax.legend(handles + twin_handles, labels + twin_labels,
              loc="lower right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=dpi)
    plt.close(fig)
    return path


def _profile_figure(plt, summary, rows, path: Path, dpi: int) -> Path:
    sizes = [row.size for row in rows]
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for l in range(summary.m - 1):
        ax.plot(
            sizes, [row.p_profile[l] for row in rows],
            marker="o", label=f"p_{l + 1}",
        )
    ax.set_xscale("log", base=2)
    ax.set_xticks(sizes)
    ax.xaxis.set_major_formatter("{x:g}")
    ax.set_xlabel("ensemble size")
    ax.set_ylabel("estimated dependence probability")
    ax.set_ylim(-0.02, 1.02)
    ax.set_title(f"{summary.dataset} / {summary.method} dependence profile")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=dpi)
    plt.close(fig)
    return path
