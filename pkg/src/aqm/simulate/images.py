"""Image planes, PGM / planar YUV 4:2:0 input, and synthetic test content."""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np
from PIL import Image

__all__ = [
    "ImagePlane",
    "read_pgm",
    "write_pgm",
    "read_yuv420",
    "synthetic_texture",
]


@dataclass(frozen=True)
class ImagePlane:
    """A single 8-bit component plane, rows first."""

    samples: np.ndarray = field(repr=False)
    component: str = "luma"

    def __post_init__(self):
        samples = np.asarray(self.samples)
        if samples.ndim != 2 or samples.shape[0] == 0 or samples.shape[1] == 0:
            raise ValueError(f"image plane must be a non-empty 2D array, got {samples.shape}")
        if samples.dtype != np.uint8:
            if np.any(samples < 0) or np.any(samples > 255) or np.any(np.mod(samples, 1) != 0):
                raise ValueError("samples must be integers in [0, 255]")
            samples = samples.astype(np.uint8)
        if self.component not in ("luma", "chroma"):
            raise ValueError(f"component must be 'luma' or 'chroma', got {self.component!r}")
        samples = samples.copy()
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    @property
    def width(self) -> int:
        return self.samples.shape[1]

    @property
    def height(self) -> int:
        return self.samples.shape[0]


def read_pgm(path) -> ImagePlane:
    """Read a binary (P5) 8-bit PGM file."""
    with open(path, "rb") as fh:
        if fh.read(2) != b"P5":
            raise ValueError(f"{path}: not a binary PGM (P5) file")
    with Image.open(path) as img:
        if img.mode != "L":
            raise ValueError(f"{path}: expected an 8-bit greyscale PGM, got mode {img.mode}")
        return ImagePlane(np.array(img, dtype=np.uint8))


def write_pgm(path, plane: ImagePlane) -> None:
    Image.fromarray(plane.samples, mode="L").save(path, format="PPM")


def read_yuv420(path, width: int, height: int, frame: int = 0) -> tuple[ImagePlane, ImagePlane, ImagePlane]:
    """Read one frame of 8-bit planar YUV 4:2:0 (I420) as (Y, U, V) planes."""
    if width <= 0 or height <= 0 or width % 2 or height % 2:
        raise ValueError(f"YUV 4:2:0 dimensions must be positive and even, got {width}x{height}")
    luma = width * height
    chroma = (width // 2) * (height // 2)
    frame_bytes = luma + 2 * chroma
    size = os.path.getsize(path)
    if size == 0 or size % frame_bytes:
        raise ValueError(
            f"{path}: size {size} is not a whole number of {width}x{height} 4:2:0 frames"
        )
    if not 0 <= frame < size // frame_bytes:
        raise ValueError(f"{path}: frame {frame} out of range (file has {size // frame_bytes})")
    raw = np.fromfile(path, dtype=np.uint8, count=frame_bytes, offset=frame * frame_bytes)
    y = raw[:luma].reshape(height, width)
    u = raw[luma : luma + chroma].reshape(height // 2, width // 2)
    v = raw[luma + chroma :].reshape(height // 2, width // 2)
    return ImagePlane(y), ImagePlane(u, "chroma"), ImagePlane(v, "chroma")


def synthetic_texture(size: int = 256, seed: int = 0) -> ImagePlane:
    """Deterministic test plane rich in medium and high spatial frequencies.

    A sum of randomly oriented gratings (periods 2.5 to 8 pixels) over a slow
    gradient, plus mild noise, clipped to 8 bits.
    """
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:size, 0:size].astype(np.float64)
    img = 128.0 + 20.0 * np.sin(2 * np.pi * (xx + yy) / size)
    for _ in range(12):
        period = rng.uniform(2.5, 8.0)
        angle = rng.uniform(0.0, np.pi)
        phase = rng.uniform(0.0, 2 * np.pi)
        amp = rng.uniform(6.0, 14.0)
        img += amp * np.sin(2 * np.pi * (xx * np.cos(angle) + yy * np.sin(angle)) / period + phase)
    img += rng.normal(0.0, 4.0, size=img.shape)
    return ImagePlane(np.clip(np.rint(img), 0, 255).astype(np.uint8))
