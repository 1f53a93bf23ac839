"""Separable bicubic resampling (Keys cubic convolution, a = -0.5).

Conventions, pinned for bit-reproducibility:
  * output pixel i samples input coordinate (i + 0.5) / ratio - 0.5, where
    ratio = out_len / in_len (so for an integer x4 downsample the center is
    (i + 0.5) * 4 - 0.5);
  * when an axis shrinks, the kernel is dilated by 1/ratio (antialiasing);
    upscaling never antialiases;
  * source indices outside the image are clamped (edge replication) and the
    tap weights are renormalized to sum 1 per output pixel.
"""

from __future__ import annotations

import math

import numpy as np

from .core import PlanarImage, clamp01

KEYS_A = -0.5
SUPPORT = 4.0  # total width of the Keys kernel


def keys_cubic(x: np.ndarray) -> np.ndarray:
    """The Keys piecewise cubic with a = -0.5 (element-wise)."""
    ax = np.abs(np.asarray(x, dtype=np.float64))
    ax2 = ax * ax
    ax3 = ax2 * ax
    inner = 1.5 * ax3 - 2.5 * ax2 + 1.0
    outer = -0.5 * ax3 + 2.5 * ax2 - 4.0 * ax + 2.0
    return np.where(ax <= 1.0, inner, np.where(ax <= 2.0, outer, 0.0))


def axis_contributions(in_len: int, out_len: int, antialias: bool = True):
    """Tap indices and normalized weights for one axis.

    Returns (indices, weights) of shape (out_len, taps); indices are clamped
    into [0, in_len).
    """
    if in_len < 1 or out_len < 1:
        raise ValueError(f"invalid axis lengths in={in_len} out={out_len}")
    ratio = out_len / in_len
    if antialias and ratio < 1.0:
        width = SUPPORT / ratio
        def h(x):
            return ratio * keys_cubic(ratio * x)
    else:
        width = SUPPORT
        h = keys_cubic
    centers = (np.arange(out_len, dtype=np.float64) + 0.5) / ratio - 0.5
    left = np.floor(centers - width / 2.0).astype(np.int64)
    taps = int(math.ceil(width)) + 2
    indices = left[:, None] + np.arange(taps, dtype=np.int64)[None, :]
    weights = h(centers[:, None] - indices)
    weights = weights / weights.sum(axis=1, keepdims=True)
    indices = np.clip(indices, 0, in_len - 1)
    return indices, weights


def _resize_plane(plane: np.ndarray, out_h: int, out_w: int, antialias: bool) -> np.ndarray:
    rows_idx, rows_w = axis_contributions(plane.shape[0], out_h, antialias)
    cols_idx, cols_w = axis_contributions(plane.shape[1], out_w, antialias)
    tmp = np.einsum("ot,otw->ow", rows_w, plane[rows_idx, :])
    return np.einsum("wt,hwt->hw", cols_w, tmp[:, cols_idx])


def resize_bicubic(image: PlanarImage, out_height: int, out_width: int, antialias: bool = True) -> PlanarImage:
    """Resize every channel independently; output is clamped to [0, 1]."""
    if out_height < 1 or out_width < 1:
        raise ValueError(f"output dimensions must be >= 1, got {out_height}x{out_width}")
    planes = np.stack(
        [_resize_plane(image.samples[c], out_height, out_width, antialias) for c in range(image.channels)]
    )
    return PlanarImage.from_planes(clamp01(planes))


def downsample_bicubic(image: PlanarImage, scale: int) -> PlanarImage:
    """Antialiased bicubic downsampling; output dims are floor(in / scale)."""
    if scale < 1:
        raise ValueError(f"scale must be >= 1, got {scale}")
    out_h = image.height // scale
    out_w = image.width // scale
    if out_h < 1 or out_w < 1:
        raise ValueError(
            f"image {image.width}x{image.height} is smaller than the scale factor {scale}"
        )
    return resize_bicubic(image, out_h, out_w, antialias=True)


def upsample_bicubic(image: PlanarImage, scale: int) -> PlanarImage:
    """Bicubic x-scale upsampling (no antialiasing on upscale)."""
    if scale < 1:
        raise ValueError(f"scale must be >= 1, got {scale}")
    return resize_bicubic(image, image.height * scale, image.width * scale, antialias=False)
