"""Matplotlib figures written next to the CLI's tabular output."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

__all__ = ["plot_wcurve", "plot_rd_curves", "plot_matrices"]

# Without this, savefig stamps the matplotlib version into the PNG.
_METADATA = {"Software": None}


def _save(fig, path):
    fig.savefig(path, dpi=120, metadata=_METADATA)
    plt.close(fig)


def plot_wcurve(p, w, path, displays=()):
    """w against normalised hypotenuse p; ``displays`` is (label, p, w) triples."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(p, w, color="k", lw=1.5)
    for label, dp, dw in displays:
        ax.plot(dp, dw, "o", ms=5)
        ax.annotate(label, (dp, dw), textcoords="offset points", xytext=(6, 4), fontsize=8)
    ax.set_xlabel("normalised hypotenuse p")
    ax.set_ylabel("display resolution parameter w")
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1.02)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    _save(fig, path)


def plot_rd_curves(curves, path, title=None):
    """Rate against PSNR and SSIM for each matrix choice.

    ``curves`` maps a label to a list of dicts with ``rate``, ``psnr`` and ``ssim``.
    """
    fig, (ax_psnr, ax_ssim) = plt.subplots(1, 2, figsize=(10, 4))
    for label, points in curves.items():
        rate = [pt["rate"] for pt in points]
        ax_psnr.plot(rate, [pt["psnr"] for pt in points], "o-", label=label)
        ax_ssim.plot(rate, [pt["ssim"] for pt in points], "o-", label=label)
    ax_psnr.set_ylabel("PSNR (dB)")
    ax_ssim.set_ylabel("SSIM")
    for ax in (ax_psnr, ax_ssim):
        ax.set_xlabel("rate proxy (bits)")
        ax.grid(alpha=0.3)
        ax.legend(fontsize=8)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    _save(fig, path)


def plot_matrices(matrices, path):
    """Heat maps of a few matrices side by side, entries printed in each cell."""
    matrices = list(matrices)
    fig, axes = plt.subplots(1, len(matrices), figsize=(4 * len(matrices), 4), squeeze=False)
    vmax = max(int(np.max(m.values)) for _, m in matrices)
    for ax, (label, qm) in zip(axes[0], matrices):
        ax.imshow(qm.values, cmap="viridis", vmin=16, vmax=vmax)
        if qm.size <= 8:
            for (i, j), v in np.ndenumerate(qm.values):
                ax.text(j, i, str(v), ha="center", va="center", fontsize=7, color="w")
        ax.set_title(label, fontsize=9)
        ax.set_xticks([])
        ax.set_yticks([])
    fig.tight_layout()
    _save(fig, path)
