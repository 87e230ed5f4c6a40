"""Figures written next to CLI reports (matplotlib, Agg backend)."""

from __future__ import annotations

from collections import Counter
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .core import Hypergraph, degree  # noqa: E402


def _save(fig, path) -> Path:
    path = Path(path)
    fig.tight_layout()
    # no timestamps in the file so reruns produce identical bytes
    fig.savefig(path, metadata={"Software": None} if path.suffix == ".png" else {"Date": None})
    plt.close(fig)
    return path


def degree_histogram(H: Hypergraph, path) -> Path:
    degs = Counter(degree(H, (v,)) for v in range(H.n)) if H.k > 1 else Counter()
    fig, ax = plt.subplots(figsize=(5, 3.5))
    xs = sorted(degs)
    ax.bar(xs, [degs[x] for x in xs], color="tab:blue")
    ax.set_xlabel("vertex degree")
    ax.set_ylabel("vertices")
    ax.set_title(f"degrees, n={H.n}, k={H.k}, m={H.m}")
    return _save(fig, path)


def good_pair_heatmap(matrix, threshold, path) -> Path:
    M = np.asarray(matrix, dtype=float)
    fig, ax = plt.subplots(figsize=(5, 4.5))
    im = ax.imshow(M, cmap="viridis", origin="upper")
    fig.colorbar(im, ax=ax, label="good common sets")
    bad = np.argwhere((M < float(threshold)) & ~np.eye(len(M), dtype=bool))
    if len(bad):
        ax.scatter(bad[:, 1], bad[:, 0], marker="x", s=12, color="white")
    ax.set_xlabel("v")
    ax.set_ylabel("u")
    ax.set_title(f"good pairs (x: below {float(threshold):.3g})")
    return _save(fig, path)


def robust_bars(counts: dict, threshold: int, path) -> Path:
    vecs = sorted(counts)
    fig, ax = plt.subplots(figsize=(max(4, 0.6 * len(vecs) + 2), 3.5))
    colours = ["tab:green" if counts[v] >= threshold else "tab:grey" for v in vecs]
    ax.bar(range(len(vecs)), [counts[v] for v in vecs], color=colours)
    ax.axhline(threshold, color="tab:red", lw=1, ls="--")
    ax.set_xticks(range(len(vecs)))
    ax.set_xticklabels([str(tuple(v)) for v in vecs], rotation=45, ha="right")
    ax.set_ylabel("copies")
    ax.set_title("copies per index vector")
    return _save(fig, path)


def slack_trajectory(trajectory, path, exact=None) -> Path:
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(range(1, len(trajectory) + 1), [float(x) for x in trajectory], marker=".")
    if exact is not None:
        ax.axhline(float(exact), color="tab:red", ls="--", lw=1, label="exact minimum")
        ax.legend()
    ax.set_xlabel("sample")
    ax.set_ylabel("best slack so far")
    return _save(fig, path)
