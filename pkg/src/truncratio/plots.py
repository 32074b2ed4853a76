"""Figure rendering for trace outputs.

Figures are written to files next to the CSV they visualize; nothing is
ever shown interactively, so the Agg backend is forced before pyplot is
imported.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def render_ascent_figure(trace, path, log_marginals=None) -> None:
    """Scale schedule and (when available) log-marginal progress of a run."""
    records = trace.iterations
    iters = [r.index for r in records]
    panels = 2 if log_marginals is not None else 1
    fig, axes = plt.subplots(panels, 1, figsize=(7, 3 * panels), sharex=True,
                             squeeze=False)
    row = 0
    if log_marginals is not None:
        ax = axes[row][0]
        ax.plot(iters, log_marginals, color="tab:blue", lw=1.2)
        accepted = [r.index for r in records if r.accepted]
        accepted_vals = [log_marginals[i] for i, r in enumerate(records) if r.accepted]
        ax.plot(accepted, accepted_vals, "o", ms=3, color="tab:green", label="accepted")
        ax.set_ylabel("log marginal likelihood")
        ax.legend(loc="lower right", fontsize=8)
        row += 1
    ax = axes[row][0]
    ax.semilogy(iters, [r.scale for r in records], color="tab:orange", lw=1.2)
    ax.set_ylabel("proposal scale")
    ax.set_xlabel("iteration")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_em_figure(log_marginals, path) -> None:
    """Log-marginal likelihood against EM iteration."""
    fig, ax = plt.subplots(figsize=(7, 3.2))
    ax.plot(range(len(log_marginals)), log_marginals, marker=".", ms=4,
            color="tab:blue", lw=1.2)
    ax.set_xlabel("iteration")
    ax.set_ylabel("log marginal likelihood")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
