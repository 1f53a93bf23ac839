"""Blur kernel synthesis.

Four profiles over a shared Mahalanobis radius q(v) = 0.5 * v^T Sigma^-1 v
with Sigma = R(theta) diag(sx^2, sy^2) R(theta)^T, sampled pointwise at
integer offsets from the kernel center and normalized to sum 1:

    isotropic / anisotropic Gaussian   exp(-q)
    generalized Gaussian               exp(-q^beta)
    plateau                            1 / (1 + q^beta)
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import BlurParams

DEFAULT_KERNEL_SIZE = 21

ISOTROPIC_GAUSSIAN = "isotropic_gaussian"
ANISOTROPIC_GAUSSIAN = "anisotropic_gaussian"
GENERALIZED_GAUSSIAN = "generalized_gaussian"
PLATEAU = "plateau"

KERNEL_TYPES = (ISOTROPIC_GAUSSIAN, ANISOTROPIC_GAUSSIAN, GENERALIZED_GAUSSIAN, PLATEAU)


@dataclass(frozen=True, eq=False)
class BlurKernel:
    """Normalized 2-D convolution weights plus the generating parameters."""

    size: int
    weights: np.ndarray
    kernel_type: str
    sigma_x: float
    sigma_y: float
    rotation_radians: float
    shape_beta: Optional[float]

    def params(self) -> BlurParams:
        return BlurParams(
            kernel_type=self.kernel_type,
            sigma_x=self.sigma_x,
            sigma_y=self.sigma_y,
            rotation_radians=self.rotation_radians,
            shape_beta=self.shape_beta,
            size=self.size,
        )


def _check_size(size: int) -> None:
    if size < 3 or size % 2 == 0:
        raise ValueError(f"kernel size must be an odd integer >= 3, got {size}")


def _check_sigmas(sigma_x: float, sigma_y: float) -> None:
    if sigma_x <= 0 or sigma_y <= 0:
        raise ValueError(f"sigmas must be > 0, got ({sigma_x}, {sigma_y})")


def _mahalanobis_half_sq(size: int, sigma_x: float, sigma_y: float, theta: float) -> np.ndarray:
    """0.5 * v^T Sigma^-1 v on the integer offset grid."""
    offsets = np.arange(size, dtype=np.float64) - size // 2
    x, y = np.meshgrid(offsets, offsets)  # x: column offset, y: row offset
    c, s = np.cos(theta), np.sin(theta)
    d1, d2 = 1.0 / sigma_x**2, 1.0 / sigma_y**2
    a11 = c * c * d1 + s * s * d2
    a22 = s * s * d1 + c * c * d2
    a12 = c * s * (d1 - d2)
    return 0.5 * (a11 * x * x + 2.0 * a12 * x * y + a22 * y * y)


def _normalize(weights: np.ndarray) -> np.ndarray:
    total = weights.sum()
    if total <= 0 or not np.isfinite(total):
        raise ValueError("kernel weights do not sum to a positive finite value")
    return weights / total


def make_isotropic_gaussian(sigma: float, size: int = DEFAULT_KERNEL_SIZE) -> BlurKernel:
    """exp(-(x^2 + y^2) / (2 sigma^2)) at integer offsets, normalized."""
    _check_sigmas(sigma, sigma)
    _check_size(size)
    offsets = np.arange(size, dtype=np.float64) - size // 2
    x, y = np.meshgrid(offsets, offsets)
    weights = np.exp(-(x * x + y * y) / (2.0 * sigma * sigma))
    return BlurKernel(size, _normalize(weights), ISOTROPIC_GAUSSIAN, sigma, sigma, 0.0, None)


def make_anisotropic_gaussian(
    sigma_x: float, sigma_y: float, theta: float, size: int = DEFAULT_KERNEL_SIZE
) -> BlurKernel:
    _check_sigmas(sigma_x, sigma_y)
    _check_size(size)
    weights = np.exp(-_mahalanobis_half_sq(size, sigma_x, sigma_y, theta))
    return BlurKernel(size, _normalize(weights), ANISOTROPIC_GAUSSIAN, sigma_x, sigma_y, theta, None)


def make_generalized_gaussian(
    sigma_x: float, sigma_y: float, theta: float, beta: float, size: int = DEFAULT_KERNEL_SIZE
) -> BlurKernel:
    """exp(-q^beta); beta = 1 recovers the plain Gaussian, beta > 1 flattens it."""
    if beta <= 0:
        raise ValueError(f"beta must be > 0, got {beta}")
    _check_sigmas(sigma_x, sigma_y)
    _check_size(size)
    q = _mahalanobis_half_sq(size, sigma_x, sigma_y, theta)
    weights = np.exp(-np.power(q, beta))
    return BlurKernel(size, _normalize(weights), GENERALIZED_GAUSSIAN, sigma_x, sigma_y, theta, beta)


def make_plateau(
    sigma_x: float, sigma_y: float, theta: float, beta: float, size: int = DEFAULT_KERNEL_SIZE
) -> BlurKernel:
    """1 / (1 + q^beta); large beta approaches an elliptical indicator."""
    if beta <= 0:
        raise ValueError(f"beta must be > 0, got {beta}")
    _check_sigmas(sigma_x, sigma_y)
    _check_size(size)
    q = _mahalanobis_half_sq(size, sigma_x, sigma_y, theta)
    weights = 1.0 / (1.0 + np.power(q, beta))
    return BlurKernel(size, _normalize(weights), PLATEAU, sigma_x, sigma_y, theta, beta)


def make_kernel(params: BlurParams) -> BlurKernel:
    """Rebuild a kernel from recorded recipe parameters."""
    if params.kernel_type == ISOTROPIC_GAUSSIAN:
        return make_isotropic_gaussian(params.sigma_x, params.size)
    if params.kernel_type == ANISOTROPIC_GAUSSIAN:
        return make_anisotropic_gaussian(params.sigma_x, params.sigma_y, params.rotation_radians, params.size)
    if params.kernel_type == GENERALIZED_GAUSSIAN:
        return make_generalized_gaussian(
            params.sigma_x, params.sigma_y, params.rotation_radians, params.shape_beta, params.size
        )
    if params.kernel_type == PLATEAU:
        return make_plateau(
            params.sigma_x, params.sigma_y, params.rotation_radians, params.shape_beta, params.size
        )
    raise ValueError(f"unknown kernel type {params.kernel_type!r}")


def discrete_variance(kernel: BlurKernel) -> float:
    """Sum of w * r^2 over the support (strictly increasing in sigma)."""
    offsets = np.arange(kernel.size, dtype=np.float64) - kernel.size // 2
    x, y = np.meshgrid(offsets, offsets)
    return float(np.sum(kernel.weights * (x * x + y * y)))


def dump_kernel(kernel: BlurKernel) -> str:
    """Weight matrix as plain-text rows, 9 significant digits per value."""
    lines = [" ".join(f"{w:.9g}" for w in row) for row in kernel.weights]
    return "\n".join(lines) + "\n"


def parse_kernel_dump(text: str) -> np.ndarray:
    """Parse the dump format back into a weight matrix."""
    rows = [
        [float(tok) for tok in line.split()]
        for line in text.strip().splitlines()
        if line.strip()
    ]
    matrix = np.asarray(rows, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError(f"kernel dump is not a square matrix: shape {matrix.shape}")
    return matrix
