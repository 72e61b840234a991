"""Figure rendering for the relaxation report."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .fields import FieldGrid  # noqa: E402


def _plot_grid(grid: FieldGrid, ylabel: str, title: str, path: Path,
               hline: float | None = None):
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    for i, x in enumerate(grid.xs):
        ts = grid.ts
        vals = [grid.samples[i][j].value for j in range(len(ts))]
        ax.plot(ts, vals, label=f"x = {x:g}")
    if hline is not None:
        ax.axhline(hline, color="0.6", lw=0.8, ls="--")
    ax.set_xlabel("t")
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.legend(frameon=False)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_relax_figures(u_grid: FieldGrid, s_grid: FieldGrid, outdir) -> list[str]:
    """Render displacement and stress relaxation curves next to the CSV."""
    outdir = Path(outdir)
    u_path = outdir / "displacement.png"
    s_path = outdir / "stress.png"
    _plot_grid(u_grid, "u(x, t)", "step-boundary displacement", u_path)
    _plot_grid(s_grid, "sigma(x, t)", "stress relaxation", s_path,
               hline=1.0)
    return [str(u_path), str(s_path)]
