"""Orthonormal 2D DCT-II on square blocks."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

__all__ = ["BLOCK_SIZES", "dct_matrix", "forward_dct", "inverse_dct"]

BLOCK_SIZES = (4, 8, 16, 32)


@lru_cache(maxsize=None)
def dct_matrix(n: int) -> np.ndarray:
    """Orthonormal DCT-II basis; row k holds the k-th cosine."""
    if n not in BLOCK_SIZES:
        raise ValueError(f"unsupported block size {n}; expected one of {BLOCK_SIZES}")
    k = np.arange(n)[:, None]
    x = np.arange(n)[None, :]
    basis = np.cos(np.pi * (2 * x + 1) * k / (2 * n)) * np.sqrt(2.0 / n)
    basis[0] /= np.sqrt(2.0)
    basis.setflags(write=False)
    return basis


def _check(block) -> tuple[np.ndarray, np.ndarray]:
    block = np.asarray(block, dtype=np.float64)
    if block.ndim < 2 or block.shape[-1] != block.shape[-2]:
        raise ValueError(f"expected square blocks in the last two axes, got {block.shape}")
    return block, dct_matrix(block.shape[-1])


def forward_dct(block) -> np.ndarray:
    """Coefficients of one n×n block, or of a stack of blocks shaped (..., n, n)."""
    block, c = _check(block)
    return c @ block @ c.T


def inverse_dct(coeffs) -> np.ndarray:
    coeffs, c = _check(coeffs)
    return c.T @ coeffs @ c
