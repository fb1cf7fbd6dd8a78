"""Blockwise intra coding loop: DCT, QM-weighted quantization, reconstruction."""

from __future__ import annotations

import numpy as np

from aqm.qm import round_half_away
from aqm.simulate.images import ImagePlane
from aqm.simulate.metrics import RdPoint, psnr
from aqm.simulate.quant import QuantConfig, dequantize, quantize
from aqm.simulate.transform import forward_dct, inverse_dct

__all__ = ["LEVEL_SHIFT", "to_blocks", "from_blocks", "level_rate", "code_levels", "code_image"]

LEVEL_SHIFT = 128.0


def to_blocks(samples: np.ndarray, n: int) -> np.ndarray:
    """Edge-pad to a multiple of ``n`` and split into a (rows, cols, n, n) stack."""
    h, w = samples.shape
    padded = np.pad(samples, ((0, -h % n), (0, -w % n)), mode="edge")
    by, bx = padded.shape[0] // n, padded.shape[1] // n
    return padded.reshape(by, n, bx, n).swapaxes(1, 2)


def from_blocks(blocks: np.ndarray, height: int, width: int) -> np.ndarray:
    by, bx, n, _ = blocks.shape
    return blocks.swapaxes(1, 2).reshape(by * n, bx * n)[:height, :width]


def level_rate(levels) -> int:
    """Entropy proxy: ceil(log2(1 + |level|)) + 1 bits per nonzero level.

    ``ceil(log2(1 + m))`` is the bit length of ``m``, which ``frexp`` returns
    exactly; the total is an integer sum so block order cannot change it.
    """
    mags = np.abs(np.asarray(levels, dtype=np.int64))
    nonzero = mags[mags > 0]
    _, bits = np.frexp(nonzero.astype(np.float64))
    return int(np.sum(bits.astype(np.int64) + 1))


def code_levels(img: ImagePlane, config: QuantConfig) -> np.ndarray:
    """Quantized levels for every block, shaped (rows, cols, n, n)."""
    n = config.block_size
    blocks = to_blocks(img.samples.astype(np.float64) - LEVEL_SHIFT, n)
    return quantize(forward_dct(blocks), config)


def code_image(img: ImagePlane, config: QuantConfig) -> tuple[ImagePlane, RdPoint]:
    """Code ``img`` with ``config`` and return the reconstruction and its RD point."""
    levels = code_levels(img, config)
    recon = inverse_dct(dequantize(levels, config)) + LEVEL_SHIFT
    recon = from_blocks(recon, img.height, img.width)
    recon = np.clip(round_half_away(recon), 0, 255).astype(np.uint8)
    out = ImagePlane(recon, img.component)
    return out, RdPoint(rate=level_rate(levels), quality=psnr(img, out))
