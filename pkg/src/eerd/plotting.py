"""Deterministic SVG figures of a trajectory."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# fixed element ids and no timestamp so repeated renders are byte-identical
matplotlib.rcParams["svg.hashsalt"] = "eerd"
_SVG_METADATA = {"Date": None, "Creator": "eerd"}


def _save(fig, path):
    fig.savefig(path, format="svg", metadata=_SVG_METADATA)
    plt.close(fig)


def plot_decay(cols: dict, rate: float, path, title: str = ""):
    """Semilog relative entropy with the predicted envelope ``H0 exp(-rate t)``.

    ``cols`` maps trajectory column names to arrays (as read back from the
    CSV output).  Only positive values can be shown on the log axis.
    """
    t, H = np.asarray(cols["t"]), np.asarray(cols["H"])
    env = H[0] * np.exp(-rate * t)
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    pos = H > 0
    ax.semilogy(t[pos], H[pos], label="measured H(t)")
    if H[0] > 0:
        ax.semilogy(t, env, "--", label=f"envelope H0 exp(-t/(C1 C2)), rate {rate:.3g}")
    live = np.asarray(cols["dt"]) > 0
    if np.any(live) and np.any(~live[1:]):
        # frozen tail spans many decades of t; zoom on the dynamic part
        ax.set_xscale("symlog", linthresh=max(float(t[live].max()), 1e-12))
    ax.set_xlabel("t")
    ax.set_ylabel("relative entropy")
    ax.set_title(title or "Relative entropy decay")
    ax.legend(loc="best", fontsize="small")
    fig.tight_layout()
    _save(fig, path)


def plot_conservation(cols: dict, path, title: str = ""):
    """Relative energy drift and absolute charge drift against time."""
    t = np.asarray(cols["t"])
    E, Q = np.asarray(cols["E"]), np.asarray(cols["Q"])
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6.4, 5.0), sharex=True)
    ax1.plot(t, (E - E[0]) / E[0])
    ax1.set_ylabel("(E - E0) / E0")
    ax2.plot(t, Q - Q[0])
    ax2.set_ylabel("Q - Q0")
    ax2.set_xlabel("t")
    live = np.asarray(cols["dt"]) > 0
    if np.any(live) and np.any(~live[1:]):
        ax2.set_xscale("symlog", linthresh=max(float(t[live].max()), 1e-12))
    ax1.set_title(title or "Conserved quantities")
    fig.tight_layout()
    _save(fig, path)
