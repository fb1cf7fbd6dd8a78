"""Desk-scale codec harness for comparing quantization matrices."""

from aqm.simulate.codec import code_image, level_rate
from aqm.simulate.images import ImagePlane, read_pgm, read_yuv420, synthetic_texture, write_pgm
from aqm.simulate.metrics import QualityReport, RdPoint, bd_rate, psnr, ssim
from aqm.simulate.quant import QuantConfig, dequantize, flat_matrix, qstep, quantize
from aqm.simulate.transform import forward_dct, inverse_dct

__all__ = [
    "ImagePlane",
    "QualityReport",
    "QuantConfig",
    "RdPoint",
    "bd_rate",
    "code_image",
    "dequantize",
    "flat_matrix",
    "forward_dct",
    "inverse_dct",
    "level_rate",
    "psnr",
    "qstep",
    "quantize",
    "read_pgm",
    "read_yuv420",
    "ssim",
    "synthetic_texture",
    "write_pgm",
]
