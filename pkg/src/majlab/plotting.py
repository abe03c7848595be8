"""Lorenz-curve figures written straight to image files."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def plot_lorenz(rows: Sequence[tuple], path: str | Path, labels: tuple[str, str] = ("x", "y")) -> Path:
    """Plot ``(t, L_x(t), L_y(t))`` rows as two piecewise-linear curves."""
    t = [float(r[0]) for r in rows]
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    ax.plot(t, [float(r[1]) for r in rows], marker="o", ms=3, label=f"Lorenz {labels[0]}")
    ax.plot(t, [float(r[2]) for r in rows], marker="s", ms=3, ls="--", label=f"Lorenz {labels[1]}")
    ax.set_xlabel("t")
    ax.set_ylabel("integral of lambda over [0, t]")
    ax.legend(frameon=False)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    out = Path(path)
    fig.savefig(out, dpi=120, metadata={"Software": None})
    plt.close(fig)
    return out
