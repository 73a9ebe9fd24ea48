"""Small matplotlib renderings of CLI results (Agg backend, PNG files).

PNG metadata is stripped of the software/date fields so reruns write the
same bytes.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

_META = {"Software": None}


def _save(fig, directory, name):
    os.makedirs(directory, exist_ok=True)
    path = os.path.join(directory, name)
    fig.tight_layout()
    fig.savefig(path, dpi=100, metadata=_META)
    plt.close(fig)
    return path


def bars(directory, name, labels, values, title, ylabel, ref=None, ref_label=None):
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.bar([str(x) for x in labels], [float(v) for v in values], color="#4c72b0")
    if ref is not None:
        ax.plot([str(x) for x in labels], [float(v) for v in ref], "o", color="#c44e52",
                label=ref_label)
        ax.legend()
    ax.set_title(title)
    ax.set_ylabel(ylabel)
    ax.set_xlabel("class")
    return _save(fig, directory, name)


def heatmap(directory, name, rows, cols, matrix, title):
    fig, ax = plt.subplots(figsize=(1.2 + 0.9 * len(cols), 1 + 0.35 * len(rows)))
    im = ax.imshow([[float(v) for v in r] for r in matrix], aspect="auto", cmap="viridis")
    ax.set_xticks(range(len(cols)), [str(c) for c in cols], rotation=45, ha="right")
    ax.set_yticks(range(len(rows)), [str(r) for r in rows])
    ax.set_ylabel("class")
    ax.set_title(title)
    fig.colorbar(im, ax=ax)
    return _save(fig, directory, name)


def paired_profile(directory, name, big, small, title):
    """Sorted profiles of two groups drawn against each other."""
    fig, ax = plt.subplots(figsize=(4.5, 4.5))
    a, b = sorted(big), sorted(small)
    n = min(len(a), len(b))
    ax.loglog(a[:n], b[:n], "o", color="#4c72b0")
    lo, hi = min(a[:n] + b[:n]), max(a[:n] + b[:n])
    ax.plot([lo, hi], [lo, hi], "--", color="grey")
    ax.set_xlabel("coset side")
    ax.set_ylabel("fixed-point side")
    ax.set_title(title)
    return _save(fig, directory, name)


def histogram(directory, name, values, title, xlabel):
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.hist(values, bins=min(30, max(1, len(set(values)))), color="#4c72b0")
    ax.set_title(title)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("count")
    return _save(fig, directory, name)
