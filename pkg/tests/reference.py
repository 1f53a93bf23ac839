"""Independent reference implementations used as test oracles.

These deliberately avoid the package's vectorized code paths: scalar loops,
dense matrices, direct formula evaluation.  They encode the documented
conventions (reflect-101 borders with row-major tap accumulation for
convolution; Keys a=-0.5 with center mapping (i+0.5)/ratio-0.5, edge
clamping and per-pixel weight normalization for resampling).
"""

import math

import numpy as np


def reflect101(index: int, length: int) -> int:
    """Mirror an out-of-range index without repeating the edge sample."""
    while index < 0 or index >= length:
        if index < 0:
            index = -index
        if index >= length:
            index = 2 * length - 2 - index
    return index


def reference_convolve(planes: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Direct O(n^2 k^2) correlation, taps accumulated in row-major order."""
    c, h, w = planes.shape
    size = weights.shape[0]
    pad = size // 2
    out = np.zeros_like(planes)
    for ch in range(c):
        for y in range(h):
            for x in range(w):
                acc = 0.0
                for dy in range(size):
                    for dx in range(size):
                        sy = reflect101(y + dy - pad, h)
                        sx = reflect101(x + dx - pad, w)
                        acc = acc + weights[dy, dx] * planes[ch, sy, sx]
                out[ch, y, x] = min(max(acc, 0.0), 1.0)
    return out


def keys_cubic_scalar(x: float) -> float:
    ax = abs(x)
    if ax <= 1.0:
        return 1.5 * ax**3 - 2.5 * ax**2 + 1.0
    if ax <= 2.0:
        return -0.5 * ax**3 + 2.5 * ax**2 - 4.0 * ax + 2.0
    return 0.0


def resize_matrix(in_len: int, out_len: int, antialias: bool) -> np.ndarray:
    """Dense (out_len, in_len) resampling matrix built tap by tap."""
    ratio = out_len / in_len
    if antialias and ratio < 1.0:
        width = 4.0 / ratio
        def h(x):
            return ratio * keys_cubic_scalar(ratio * x)
    else:
        width = 4.0
        h = keys_cubic_scalar
    taps = int(math.ceil(width)) + 2
    matrix = np.zeros((out_len, in_len))
    for i in range(out_len):
        center = (i + 0.5) / ratio - 0.5
        left = math.floor(center - width / 2.0)
        for t in range(left, left + taps):
            j = min(max(t, 0), in_len - 1)
            matrix[i, j] += h(center - t)
        matrix[i, :] /= matrix[i, :].sum()
    return matrix


def reference_resize(planes: np.ndarray, out_h: int, out_w: int, antialias: bool = True) -> np.ndarray:
    """Dense weighted-sum resampler: rows matrix @ plane @ cols matrix^T, clamped."""
    rows = resize_matrix(planes.shape[1], out_h, antialias)
    cols = resize_matrix(planes.shape[2], out_w, antialias)
    out = np.stack([rows @ plane @ cols.T for plane in planes])
    return np.clip(out, 0.0, 1.0)


def reference_ssim_window(a: np.ndarray, b: np.ndarray, sigma: float = 1.5,
                          k1: float = 0.01, k2: float = 0.03, dynamic_range: float = 1.0) -> float:
    """SSIM of a single window, evaluated with explicit scalar sums."""
    size = a.shape[0]
    half = size // 2
    weights = np.empty((size, size))
    for y in range(size):
        for x in range(size):
            r2 = (y - half) ** 2 + (x - half) ** 2
            weights[y, x] = math.exp(-r2 / (2.0 * sigma * sigma))
    weights /= weights.sum()
    mu_a = float((weights * a).sum())
    mu_b = float((weights * b).sum())
    var_a = float((weights * a * a).sum()) - mu_a * mu_a
    var_b = float((weights * b * b).sum()) - mu_b * mu_b
    cov = float((weights * a * b).sum()) - mu_a * mu_b
    c1 = (k1 * dynamic_range) ** 2
    c2 = (k2 * dynamic_range) ** 2
    return ((2 * mu_a * mu_b + c1) * (2 * cov + c2)) / (
        (mu_a**2 + mu_b**2 + c1) * (var_a + var_b + c2)
    )
