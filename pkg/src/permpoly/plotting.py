"""Figures for the report commands.  Rendering only; no computation happens here."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.ticker import MaxNLocator  # noqa: E402


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_tables(results, path):
    """Hits s/(q-1) against k, one marker per hit, one colour per characteristic."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.6))
    by_p: dict[int, list] = {}
    for res in results:
        by_p.setdefault(res.p, []).append(res)
    for p, rows in sorted(by_p.items()):
        ks, xs = [], []
        for res in rows:
            q = res.p**res.k
            for s in res.hits:
                ks.append(res.k)
                xs.append(s / (q - 1))
        ax1.scatter(ks, xs, s=18, label=f"p={p}")
        ax2.plot([r.k for r in rows], [len(r.hits) for r in rows], marker="o", label=f"p={p}")
    ax1.set_xlabel("k")
    ax1.set_ylabel("s / (q-1)")
    ax1.set_title("exponents s with L permuting T")
    ax2.set_xlabel("k")
    ax2.set_ylabel("number of hits")
    ax2.set_title("hits per field")
    ax2.yaxis.set_major_locator(MaxNLocator(integer=True))
    for ax in (ax1, ax2):
        ax.legend(fontsize=8)
        ax.grid(alpha=0.3)
    return _save(fig, path)


def plot_family_sweeps(reports, path):
    """Stacked bars per family: agreeing permutations, agreeing non-permutations, mismatches."""
    names = [r.family for r in reports]
    agree_true = [sum(1 for x in r.records if x["agree"] and x["oracle"]) for r in reports]
    agree_false = [sum(1 for x in r.records if x["agree"] and not x["oracle"]) for r in reports]
    bad = [len(r.mismatches) for r in reports]
    fig, ax = plt.subplots(figsize=(max(6, 0.55 * len(names) + 2), 4))
    pos = range(len(names))
    ax.bar(pos, agree_true, color="tab:green", label="permutes (agrees)")
    ax.bar(pos, agree_false, bottom=agree_true, color="tab:gray", label="not a permutation (agrees)")
    ax.bar(pos, bad, bottom=[a + b for a, b in zip(agree_true, agree_false)], color="tab:red",
           label="mismatch")
    ax.set_xticks(list(pos))
    ax.set_xticklabels(names, rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("parameter tuples")
    ax.legend(fontsize=8)
    ax.grid(axis="y", alpha=0.3)
    return _save(fig, path)
