"""Figures for search reports."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def rank_history_figure(report, path) -> str:
    """Rank of the evaluation matrix against the number of argument tuples,
    with the stable rank and the monomial count marked."""
    xs = [h[0] for h in report.rank_history]
    ys = [h[1] for h in report.rank_history]
    fig, ax = plt.subplots(figsize=(6.0, 3.8))
    ax.step(xs, ys, where="post", color="tab:blue", lw=1.5, label="rank")
    ax.axhline(report.stable_rank, color="tab:blue", ls=":", lw=1)
    ax.axhline(report.monomial_count, color="0.5", ls="--", lw=1, label="monomials")
    ax.set_xlabel("argument tuples")
    ax.set_ylabel("rank")
    ax.set_title(f"{report.opset} degree {report.degree}: rank {report.stable_rank}, "
                 f"nullspace {report.nullspace_dim}")
    ax.set_ylim(0, report.monomial_count * 1.05)
    ax.legend(loc="lower right", frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return str(path)
