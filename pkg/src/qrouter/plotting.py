"""Matplotlib renderings of the sweep tables (Agg backend, files only)."""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

# no timestamps or version strings in the files
_PNG_META = {"Software": None}

STYLE = {
    "font.size": 9,
    "axes.linewidth": 0.8,
    "lines.linewidth": 1.4,
    "legend.frameon": False,
    "figure.dpi": 120,
}


def _series(rows, name, x, y):
    pts = [(r[x], r[y]) for r in rows if r["series"] == name and r[y] is not None]
    return [p[0] for p in pts], [p[1] for p in pts]


def plot_fig3(rows, path: Path) -> Path:
    """Success probability against routing ratio, with theta(chi) on a twin axis."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.0, 2.8), tight_layout=True)
        chi, p_sim = _series(rows, "fixed", "chi", "P_sim")
        _, p_an = _series(rows, "fixed", "chi", "P_analytic")
        theta, _ = _series(rows, "fixed", "theta", "P_sim")
        ax.plot(chi, p_an, color="0.75", lw=4, label="closed form")
        ax.plot(chi, p_sim, color="k", ls="--", label="simulation")
        ax.set_xlim(0, math.pi / 2)
        ax.set_xlabel(r"routing ratio $\chi$ [rad]")
        ax.set_ylabel(r"$P_{\mathrm{succ}}$")
        twin = ax.twinx()
        twin.plot(chi, theta, color="tab:blue", lw=1)
        twin.set_ylabel(r"$\theta$ [rad]", color="tab:blue")
        twin.set_ylim(0, math.pi / 2)
        ax.legend(loc="upper right")
        fig.savefig(path, metadata=_PNG_META)
        plt.close(fig)
    return path


def plot_fig5(rows, path: Path) -> Path:
    """Max and min success probability of the two-gate router against chi_L."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(4.0, 2.8), tight_layout=True)
        x, pmax = _series(rows, "tunable_max", "chi_L", "P_sim")
        _, pmin = _series(rows, "tunable_min", "chi_L", "P_sim")
        _, uni = _series(rows, "uniform_min", "chi_L", "P_sim")
        ax.fill_between(x, pmin, pmax, color="tab:red", alpha=0.15, lw=0)
        ax.plot(x, pmax, color="tab:red", label="max")
        ax.plot(x, pmin, color="tab:blue", label="min")
        ax.plot(x, uni, color="k", ls=":", label="state-independent gate")
        for level in (1 / 8, 1 / 24):
            ax.axhline(level, color="k", ls="--", lw=0.8)
        ax.set_xlim(0, math.pi / 2)
        ax.set_ylim(0, 0.55)
        ax.set_xlabel(r"routing ratio limit $\chi_L$ [rad]")
        ax.set_ylabel(r"$P_{\mathrm{succ}}$")
        ax.legend(loc="upper right")
        fig.savefig(path, metadata=_PNG_META)
        plt.close(fig)
    return path


def save_figures(tables: dict, out_dir: Path) -> list[Path]:
    out = []
    if "fig3" in tables:
        out.append(plot_fig3(tables["fig3"], out_dir / "fig3.png"))
    if "fig5" in tables:
        out.append(plot_fig5(tables["fig5"], out_dir / "fig5.png"))
    return out
