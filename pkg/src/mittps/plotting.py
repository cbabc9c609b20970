"""Figures written next to the CSV/JSON outputs of ``simulate`` and ``sweep``."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "legend.fontsize": 8,
    "legend.frameon": False,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "figure.figsize": (4.5, 3.2),
    "savefig.dpi": 150,
    "savefig.bbox": "tight",
}


def _save(fig, path) -> None:
    # no Software tag: PNGs stay byte-identical across matplotlib patch releases
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)


def plot_sweep(rows, path) -> None:
    """Analytic and Monte Carlo bias against the share of each violating stratum."""
    x = np.array([r.pi_violation for r in rows])
    analytic = np.array([r.analytic_bias for r in rows])
    mc = np.array([r.mc_bias for r in rows])
    err = np.array([4 * r.mc_se if r.mc_se is not None else 0.0 for r in rows])
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.axhline(0.0, color="0.7", lw=0.8)
        ax.plot(x, analytic, "-", color="k", lw=1.2, label="analytic bias")
        ax.errorbar(x, mc, yerr=err, fmt="o", ms=4, color="C3", capsize=2, label="MC bias ± 4 MC SE")
        ax.set_xlabel("share of intervention initiators = share of control initiators")
        ax.set_ylabel("bias of mITT for always-initiator effect")
        ax.legend()
        _save(fig, path)


def plot_mc_distribution(summary, path, bins: int = 50) -> None:
    """Histogram of replicate mITT estimates with the target and the limit marked.

    ``summary`` must come from ``run_mc(..., keep_estimates=True)``.
    """
    if summary.estimates is None:
        raise ValueError("summary carries no replicate estimates; rerun with keep_estimates=True")
    est = summary.estimates[~np.isnan(summary.estimates)]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.hist(est, bins=bins, color="0.75", edgecolor="white", lw=0.3)
        ax.axvline(summary.oracle, color="k", lw=1.2, label="always-initiator effect")
        if not np.isclose(summary.analytic_limit, summary.oracle):
            ax.axvline(summary.analytic_limit, color="C3", ls="--", lw=1.2, label="mITT large-sample limit")
        ax.axvline(summary.mean_estimate, color="C0", ls=":", lw=1.2, label="MC mean")
        ax.set_xlabel("mITT estimate")
        ax.set_ylabel("replications")
        ax.legend()
        _save(fig, path)
