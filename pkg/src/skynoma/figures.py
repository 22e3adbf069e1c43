"""Figure rendering for the CLI report paths.

Every function takes already-computed results and writes one PNG next to the
delimited output; nothing here recomputes metrics. The Agg backend is forced
because these run headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .harness import moving_metrics  # noqa: E402

_MBPS = 1e6


def training_figure(records, path, window: int = 100) -> str:
    """Per-episode rate, fairness and reward with moving averages."""
    episodes = [r.episode for r in records]
    rate = np.array([r.mean_rate_bps for r in records]) / _MBPS
    jain = np.array([r.mean_jain for r in records])
    reward = np.array([r.mean_reward for r in records])
    avg_rate, avg_jain = moving_metrics(records, window=window)

    fig, (ax_r, ax_j, ax_w) = plt.subplots(3, 1, figsize=(7, 9), sharex=True)
    ax_r.plot(episodes, rate, lw=0.6, alpha=0.45, label="episode mean")
    ax_r.plot(episodes, np.asarray(avg_rate) / _MBPS, lw=1.6,
              label="moving average (%d)" % window)
    ax_r.set_ylabel("mean rate (Mbps)")
    ax_r.legend(loc="lower right", fontsize=8)

    ax_j.plot(episodes, jain, lw=0.6, alpha=0.45)
    ax_j.plot(episodes, avg_jain, lw=1.6)
    ax_j.set_ylabel("Jain fairness")
    ax_j.set_ylim(0.0, 1.05)

    ax_w.plot(episodes, reward, lw=0.8, color="tab:green")
    ax_w.set_ylabel("mean reward")
    ax_w.set_xlabel("episode")

    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def sweep_figure(points, path) -> str:
    """Final throughput and satisfaction against the rate-floor ratio."""
    ratios = [p.rmin_over_w for p in points]
    rates = np.array([p.r_e_tot_bps for p in points]) / _MBPS
    sat = [p.final_satisfaction for p in points]

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(ratios, rates, marker="o", color="tab:blue")
    ax.set_xlabel("rate floor / bandwidth (bps/Hz)")
    ax.set_ylabel("final episode rate (Mbps)", color="tab:blue")
    ax.tick_params(axis="y", labelcolor="tab:blue")

    ax2 = ax.twinx()
    ax2.plot(ratios, sat, marker="s", ls="--", color="tab:red")
    ax2.set_ylabel("final satisfaction", color="tab:red")
    ax2.set_ylim(-0.05, 1.05)
    ax2.tick_params(axis="y", labelcolor="tab:red")

    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def layouts_figure(result, path) -> str:
    """Distribution of the per-layout rate ratio between the two agents."""
    ratios = result.ratios()
    lo, hi = float(ratios.min()), float(ratios.max())
    # a degenerate range (e.g. identical checkpoints) breaks automatic binning
    if hi - lo < 1e-9 * max(1.0, abs(hi)):
        bins = np.linspace(lo - 1.0, hi + 1.0, 21)
    else:
        bins = 20

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist(ratios, bins=bins, color="tab:blue", alpha=0.8)
    ax.axvline(100.0, color="k", lw=1.0, ls="--")
    ax.axvline(float(np.mean(ratios)), color="tab:red", lw=1.4,
               label="mean %.1f%%" % float(np.mean(ratios)))
    ax.set_xlabel("agent A rate as % of agent B")
    ax.set_ylabel("layouts")
    ax.set_title("A wins %.0f%% of layouts" % (100.0 * result.win_fraction))
    ax.legend(loc="upper right", fontsize=8)

    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
