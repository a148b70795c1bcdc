"""Neural self-recovery watermarking: embed an image into itself, recover it
after tampering, and localize what was touched.

Images cross this API as float32 numpy arrays, channels last, values in [0,1].
"""

import torch as _torch  # noqa: F401  (loads the shared libraries the extension links)

from ._selfrec_cpp import (  # noqa: F401
    ConfigError,
    IoError,
    Pipeline,
    ShapeError,
    auc,
    bce,
    binarize_mask,
    composite,
    degrade,
    f1,
    generate_mask,
    haar_forward,
    haar_inverse,
    high_frequency_ratio,
    iou,
    jpeg,
    permutation,
    psnr,
    shuffle,
    spectrum_image,
    splice,
    ssim,
    tv_loss,
    unshuffle,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "IoError",
    "Pipeline",
    "ShapeError",
    "auc",
    "bce",
    "binarize_mask",
    "composite",
    "degrade",
    "f1",
    "generate_mask",
    "haar_forward",
    "haar_inverse",
    "high_frequency_ratio",
    "iou",
    "jpeg",
    "permutation",
    "psnr",
    "shuffle",
    "spectrum_image",
    "splice",
    "ssim",
    "tv_loss",
    "unshuffle",
]
