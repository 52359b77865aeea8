"""Figure rendering for the command-line report path (optional, opt-in)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .fock import OutcomeDistribution


def plot_delta_distribution(
    dist: OutcomeDistribution, path: str, title: str, threshold: int | None = None
) -> None:
    """Count-difference distribution as a stem-style bar chart."""
    deltas = dist.support()
    probs = [dist.get(d) for d in deltas]
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    ax.bar(deltas, probs, width=1.6, color="#30608c")
    if threshold is not None:
        for x in (-threshold, threshold):
            ax.axvline(x, color="#b34040", linestyle="--", linewidth=1.0)
    ax.set_xlabel("count difference")
    ax.set_ylabel("probability")
    ax.set_title(title)
    ax.grid(alpha=0.25)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_transmitted_distribution(
    dist: OutcomeDistribution, path: str, title: str
) -> None:
    """Transmitted (S_t, Delta_t) probabilities.

    A single populated line plots as a curve over Delta_t; several lines
    plot as a colored scatter in the (Delta_t, S_t) plane.
    """
    lines = sorted({s_t for s_t, _ in dist.support()})
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    if len(lines) == 1:
        points = sorted((delta_t, dist.get((lines[0], delta_t)))
                        for _, delta_t in dist.support())
        ax.plot([p[0] for p in points], [p[1] for p in points],
                color="#30608c", linewidth=1.2)
        ax.set_xlabel("transmitted count difference")
        ax.set_ylabel("probability")
    else:
        xs = [delta_t for _, delta_t in dist.support()]
        ys = [s_t for s_t, _ in dist.support()]
        cs = [dist.get(label) for label in dist.support()]
        sc = ax.scatter(xs, ys, c=cs, s=14, cmap="viridis")
        fig.colorbar(sc, ax=ax, label="probability")
        ax.set_xlabel("transmitted count difference")
        ax.set_ylabel("transmitted photon total")
    ax.set_title(title)
    ax.grid(alpha=0.25)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_purity_sweep(
    xs: list[float],
    curves: dict[str, list[float]],
    xlabel: str,
    path: str,
    title: str,
) -> None:
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    for label, ys in curves.items():
        ax.plot(xs, ys, marker="o", markersize=3.5, linewidth=1.2, label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("purity")
    ax.set_ylim(0.0, 1.05)
    ax.legend()
    ax.set_title(title)
    ax.grid(alpha=0.25)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
