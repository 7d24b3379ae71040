"""Figure rendering for the CLI report paths (PNG next to each CSV)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

__all__ = ["render_curves", "render_distribution"]


def render_curves(x, columns, labels, xlabel: str, ylabel: str, title: str,
                  path: Path) -> Path:
    """Line plot of one or more sweep columns against a shared axis."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for col, label in zip(columns, labels):
        ax.plot(x, col, lw=1.5, label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    if len(labels) > 1:
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_distribution(n, probs, title: str, path: Path,
                        annotation: str | None = None) -> Path:
    """Stem-style plot of a molecule-number distribution."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.vlines(n, 0.0, probs, lw=1.2, alpha=0.7)
    ax.plot(n, probs, "o", ms=3.5)
    ax.set_xlabel("molecule number n")
    ax.set_ylabel("p_n")
    ax.set_title(title)
    ax.set_ylim(bottom=0.0)
    ax.grid(True, alpha=0.3)
    if annotation:
        ax.text(0.97, 0.95, annotation, transform=ax.transAxes,
                ha="right", va="top", fontsize=9,
                bbox=dict(boxstyle="round", fc="white", alpha=0.8))
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
