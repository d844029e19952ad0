"""Figure rendering for sweep results (Agg backend, files only)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

LABELS = {"mrc": "MRC", "mmse": "MMSE-type", "zf": "ZF-type"}
MARKERS = {"mrc": "s", "mmse": "o", "zf": "^"}
XLABELS = {"M": "Number of BS antennas $M$", "q": "Jamming power $q_t = q_d$ [dB]"}


def rcparams():
    plt.rcParams.update({
        "font.size": 9,
        "axes.labelsize": 9,
        "legend.fontsize": 7,
        "axes.grid": True,
        "grid.alpha": 0.3,
        "grid.linestyle": "--",
        "lines.linewidth": 1.2,
        "lines.markersize": 4,
        "savefig.dpi": 200,
        "savefig.bbox": "tight",
    })


def plot_sweep(result, path: str, title: str | None = None) -> str:
    """Simulated rates with error bars, closed-form rates dashed in the same colour."""
    rcparams()
    fig, ax = plt.subplots(figsize=(5, 3.6))
    axis = result.rows[0].axis_name if result.rows else "M"
    for kind in dict.fromkeys(r.filter for r in result.rows):
        rows = [r for r in result.rows if r.filter == kind]
        x = [r.axis_value for r in rows]
        line = ax.errorbar(x, [r.rate_sim for r in rows], yerr=[r.rate_sim_stderr for r in rows],
                           marker=MARKERS.get(kind, "o"), capsize=2,
                           label=f"{LABELS.get(kind, kind)} (Simul.)")
        cf = [(r.axis_value, r.rate_closed_form) for r in rows if r.rate_closed_form is not None]
        if cf:
            ax.plot(*zip(*cf), ls="--", color=line[0].get_color(),
                    label=f"{LABELS.get(kind, kind)} (Anal.)")
    ax.set_xlabel(XLABELS.get(axis, axis))
    ax.set_ylabel("Achievable rate [bits/symbol]")
    if title:
        ax.set_title(title)
    ax.legend()
    fig.savefig(path)
    plt.close(fig)
    return path
