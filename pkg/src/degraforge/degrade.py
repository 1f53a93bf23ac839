"""Degradation stages and the classical / practical / gated pipelines.

The pipeline composes blur -> downsample -> noise -> jpeg.  Blur, noise and
jpeg each sit behind a Bernoulli gate; downsampling is never gated, so the
output is always `scale` times smaller.  Everything random is drawn from
streams derived per (master_seed, image_key, stage), which makes whole-batch
output a pure function of (config, seed, sources) regardless of worker
count or processing order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Union

import numpy as np

from .core import (
    GATED_STAGE_NAMES,
    STAGE_NOISE,
    STAGE_SAMPLER,
    BlurParams,
    NoiseParams,
    PlanarImage,
    SampledRecipe,
    SeedTrace,
    StreamKey,
    bt601_luma,
    clamp01,
    derive_stream,
    float_to_uint8,
    uint8_to_float,
)
from .kernels import (
    ANISOTROPIC_GAUSSIAN,
    DEFAULT_KERNEL_SIZE,
    GENERALIZED_GAUSSIAN,
    ISOTROPIC_GAUSSIAN,
    PLATEAU,
    BlurKernel,
    make_kernel,
)
from .resample import downsample_bicubic

GAUSSIAN_GREY = "gaussian_grey"
GAUSSIAN_COLOR = "gaussian_color"
POISSON_GREY = "poisson_grey"
POISSON_COLOR = "poisson_color"
NOISE_TYPES = (GAUSSIAN_GREY, GAUSSIAN_COLOR, POISSON_GREY, POISSON_COLOR)

MODES = ("classical", "practical", "gated")

DEFAULT_STAGE_ORDER = ("blur", "downsample", "noise", "jpeg")

# Hard-model blur taxonomy: iso/aniso variants of each profile family.
HARD_BLUR_VARIANTS = (
    "isotropic",
    "anisotropic",
    "generalized_isotropic",
    "generalized_anisotropic",
    "plateau_isotropic",
    "plateau_anisotropic",
)

# Sigma below this is indistinguishable from the identity kernel; guards
# configs that allow a blur range starting at 0.
MIN_SIGMA = 1e-6


@dataclass(frozen=True)
class NoiseSpec:
    """Parameters of one noise stage application."""

    noise_type: str
    sigma_255: Optional[float] = None
    poisson_lambda: Optional[float] = None

    def __post_init__(self):
        if self.noise_type not in NOISE_TYPES:
            raise ValueError(f"noise_type must be one of {NOISE_TYPES}, got {self.noise_type!r}")
        if self.is_gaussian:
            if self.sigma_255 is None or self.sigma_255 <= 0:
                raise ValueError(f"gaussian noise requires sigma_255 > 0, got {self.sigma_255}")
        else:
            if self.poisson_lambda is None or self.poisson_lambda <= 0:
                raise ValueError(f"poisson noise requires lambda > 0, got {self.poisson_lambda}")

    @property
    def is_gaussian(self) -> bool:
        return self.noise_type in (GAUSSIAN_GREY, GAUSSIAN_COLOR)

    @property
    def color_mode(self) -> str:
        return "grey" if self.noise_type in (GAUSSIAN_GREY, POISSON_GREY) else "color"

    def to_params(self) -> NoiseParams:
        return NoiseParams(
            noise_type="gaussian" if self.is_gaussian else "poisson",
            color_mode=self.color_mode,
            sigma_255=self.sigma_255,
            poisson_lambda=self.poisson_lambda,
        )

    @classmethod
    def from_params(cls, params: NoiseParams) -> "NoiseSpec":
        name = f"{params.noise_type}_{params.color_mode}"
        return cls(noise_type=name, sigma_255=params.sigma_255, poisson_lambda=params.poisson_lambda)


@dataclass(frozen=True)
class Blur:
    kernel: BlurKernel


@dataclass(frozen=True)
class Downsample:
    scale: int


@dataclass(frozen=True)
class Noise:
    spec: NoiseSpec


@dataclass(frozen=True)
class Jpeg:
    quality: int


DegradationStep = Union[Blur, Downsample, Noise, Jpeg]


@dataclass(frozen=True)
class GateSpec:
    """Stage order plus per-stage gate probabilities.

    Downsample appears exactly once and is never gated; only blur, noise
    and jpeg carry probabilities.
    """

    stages: tuple = DEFAULT_STAGE_ORDER
    probabilities: Mapping[str, float] = field(
        default_factory=lambda: {"blur": 0.5, "noise": 0.5, "jpeg": 0.5}
    )

    def __post_init__(self):
        if tuple(self.stages) != DEFAULT_STAGE_ORDER:
            raise ValueError(
                f"supported stage order is {DEFAULT_STAGE_ORDER}, got {tuple(self.stages)}"
            )
        for name in GATED_STAGE_NAMES:
            p = self.probabilities.get(name)
            if p is None or not 0.0 <= p <= 1.0:
                raise ValueError(f"gate probability for {name} must be in [0, 1], got {p}")

    @classmethod
    def uniform(cls, p: float) -> "GateSpec":
        return cls(probabilities={name: p for name in GATED_STAGE_NAMES})


@dataclass(frozen=True)
class PipelineConfig:
    """Declarative description of a degradation run.

    Defaults reproduce the light model: isotropic Gaussian blur in
    [0.1, 3.0], additive Gaussian noise in [1, 30] on the 0-255 scale,
    JPEG quality in [40, 95], x4 bicubic downsampling, every gate at 0.5.
    ``hard_model`` widens blur to the six-variant taxonomy and noise to
    grey/color Gaussian and Poisson.
    """

    mode: str = "gated"
    scale: int = 4
    blur_sigma: tuple = (0.1, 3.0)
    noise_sigma: tuple = (1.0, 30.0)
    jpeg_quality: tuple = (40, 95)
    kernel_size: int = DEFAULT_KERNEL_SIZE
    noise_type: str = GAUSSIAN_GREY
    hard_model: bool = False
    generalized_beta: tuple = (0.5, 4.0)
    plateau_beta: tuple = (1.0, 2.0)
    poisson_lambda: tuple = (50.0, 10000.0)
    gates: GateSpec = field(default_factory=GateSpec)
    master_seed: int = 0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.scale < 1:
            raise ValueError(f"scale must be >= 1, got {self.scale}")
        if self.noise_type not in NOISE_TYPES:
            raise ValueError(f"noise_type must be one of {NOISE_TYPES}, got {self.noise_type!r}")
        for name in ("blur_sigma", "noise_sigma", "jpeg_quality", "generalized_beta", "plateau_beta", "poisson_lambda"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ValueError(f"{name} range has lower bound {lo} > upper bound {hi}")

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "scale": self.scale,
            "blur_sigma": list(self.blur_sigma),
            "noise_sigma": list(self.noise_sigma),
            "jpeg_quality": list(self.jpeg_quality),
            "kernel_size": self.kernel_size,
            "noise_type": self.noise_type,
            "hard_model": self.hard_model,
            "generalized_beta": list(self.generalized_beta),
            "plateau_beta": list(self.plateau_beta),
            "poisson_lambda": list(self.poisson_lambda),
            "gate_probabilities": dict(self.gates.probabilities),
            "master_seed": self.master_seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        known = {f for f in cls.__dataclass_fields__} | {"gate_probabilities"}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        kwargs = {}
        for name in (
            "mode", "scale", "kernel_size", "noise_type", "hard_model", "master_seed",
        ):
            if name in data:
                kwargs[name] = data[name]
        for name in ("blur_sigma", "noise_sigma", "jpeg_quality", "generalized_beta", "plateau_beta", "poisson_lambda"):
            if name in data:
                lo, hi = data[name]
                kwargs[name] = (lo, hi)
        gp = data.get("gate_probabilities")
        if gp is not None:
            if isinstance(gp, (int, float)):
                kwargs["gates"] = GateSpec.uniform(float(gp))
            else:
                probs = {name: 0.5 for name in GATED_STAGE_NAMES}
                probs.update({k: float(v) for k, v in gp.items()})
                kwargs["gates"] = GateSpec(probabilities=probs)
        return cls(**kwargs)


# ---------------------------------------------------------------------------
# Base degradation operations
# ---------------------------------------------------------------------------

def convolve(image: PlanarImage, kernel: BlurKernel) -> PlanarImage:
    """2-D convolution with reflect-101 borders, each channel independently.

    All supported kernels are centrally symmetric, so correlation indexing
    is used.  Taps accumulate in row-major kernel order; that fixed order is
    part of the determinism contract.
    """
    size = kernel.size
    if size > 2 * min(image.width, image.height) + 1:
        raise ValueError(
            f"kernel size {size} unsupported for image {image.width}x{image.height}"
        )
    pad = size // 2
    h, w = image.height, image.width
    out = np.empty_like(image.samples)
    for c in range(image.channels):
        padded = np.pad(image.samples[c], pad, mode="reflect")
        acc = np.zeros((h, w), dtype=np.float64)
        for dy in range(size):
            for dx in range(size):
                acc += kernel.weights[dy, dx] * padded[dy:dy + h, dx:dx + w]
        out[c] = acc
    return PlanarImage.from_planes(clamp01(out))


def add_gaussian_noise(image: PlanarImage, spec: NoiseSpec, rng: np.random.Generator) -> PlanarImage:
    """Additive N(0, (sigma_255/255)^2); grey mode shares one field across channels."""
    if not spec.is_gaussian:
        raise ValueError(f"expected a gaussian NoiseSpec, got {spec.noise_type!r}")
    sigma = spec.sigma_255 / 255.0
    if spec.color_mode == "grey":
        f = rng.normal(0.0, sigma, size=(image.height, image.width))
        noisy = image.samples + f[None, :, :]
    else:
        noisy = image.samples + rng.normal(0.0, sigma, size=image.samples.shape)
    return PlanarImage.from_planes(clamp01(noisy))


def add_poisson_noise(image: PlanarImage, spec: NoiseSpec, rng: np.random.Generator) -> PlanarImage:
    """Shot noise y = Poisson(x * lambda) / lambda.

    Grey mode realizes the field on the BT.601 luma and adds the same
    deviation to every channel; color mode draws per channel.
    """
    if spec.is_gaussian:
        raise ValueError(f"expected a poisson NoiseSpec, got {spec.noise_type!r}")
    lam = spec.poisson_lambda
    if spec.color_mode == "grey" and image.channels == 3:
        luma = bt601_luma(image.samples)
        f = rng.poisson(luma * lam) / lam - luma
        noisy = image.samples + f[None, :, :]
    else:
        noisy = rng.poisson(image.samples * lam) / lam
    return PlanarImage.from_planes(clamp01(noisy))


def jpeg_compress(image: PlanarImage, quality: int) -> PlanarImage:
    """Round-trip through a baseline JPEG codec at the given quality.

    8-bit, BT.601 YCbCr, 4:2:0 chroma subsampling, IJG quality scaling
    (libjpeg via OpenCV).  The internal 8-bit quantization is part of the
    degradation by design.
    """
    import cv2

    if not 1 <= int(quality) <= 100:
        raise ValueError(f"jpeg quality must be in [1, 100], got {quality}")
    params = [int(cv2.IMWRITE_JPEG_QUALITY), int(quality)]
    if hasattr(cv2, "IMWRITE_JPEG_SAMPLING_FACTOR"):
        params += [int(cv2.IMWRITE_JPEG_SAMPLING_FACTOR), int(cv2.IMWRITE_JPEG_SAMPLING_FACTOR_420)]
    if image.channels == 1:
        u8 = float_to_uint8(image.samples[0])
        ok, buf = cv2.imencode(".jpg", u8, params)
        if not ok:
            raise RuntimeError("jpeg encoding failed")
        decoded = cv2.imdecode(buf, cv2.IMREAD_GRAYSCALE)
        return PlanarImage.from_planes(uint8_to_float(decoded))
    u8 = float_to_uint8(np.moveaxis(image.samples, 0, 2))  # (h, w, rgb)
    ok, buf = cv2.imencode(".jpg", u8[:, :, ::-1], params)  # cv2 wants BGR
    if not ok:
        raise RuntimeError("jpeg encoding failed")
    decoded = cv2.imdecode(buf, cv2.IMREAD_COLOR)
    return PlanarImage.from_interleaved(uint8_to_float(decoded[:, :, ::-1]))


def apply_step(step: DegradationStep, image: PlanarImage, rng: Optional[np.random.Generator] = None) -> PlanarImage:
    if isinstance(step, Blur):
        return convolve(image, step.kernel)
    if isinstance(step, Downsample):
        return downsample_bicubic(image, step.scale)
    if isinstance(step, Noise):
        if rng is None:
            raise ValueError("noise step requires a generator")
        if step.spec.is_gaussian:
            return add_gaussian_noise(image, step.spec, rng)
        return add_poisson_noise(image, step.spec, rng)
    if isinstance(step, Jpeg):
        return jpeg_compress(image, step.quality)
    raise TypeError(f"not a degradation step: {step!r}")


def apply_gate(
    step: DegradationStep, g: int, image: PlanarImage, rng: Optional[np.random.Generator] = None
) -> PlanarImage:
    """Gate controller: g=1 applies the step, g=0 passes the image through untouched."""
    if g not in (0, 1):
        raise ValueError(f"gate must be 0 or 1, got {g}")
    if g == 0:
        return image
    return apply_step(step, image, rng)


# ---------------------------------------------------------------------------
# Recipe sampling and execution
# ---------------------------------------------------------------------------

def _draw_blur_params(config: PipelineConfig, rng: np.random.Generator) -> BlurParams:
    lo, hi = config.blur_sigma
    size = config.kernel_size
    if not config.hard_model:
        sigma = max(rng.uniform(lo, hi), MIN_SIGMA)
        return BlurParams(ISOTROPIC_GAUSSIAN, sigma, sigma, 0.0, None, size)
    variant = HARD_BLUR_VARIANTS[int(rng.integers(0, len(HARD_BLUR_VARIANTS)))]
    if variant.endswith("anisotropic"):
        sigma_x = max(rng.uniform(lo, hi), MIN_SIGMA)
        sigma_y = max(rng.uniform(lo, hi), MIN_SIGMA)
        theta = rng.uniform(0.0, math.pi)
    else:
        sigma_x = sigma_y = max(rng.uniform(lo, hi), MIN_SIGMA)
        theta = 0.0
    if variant.startswith("generalized"):
        beta = rng.uniform(*config.generalized_beta)
        return BlurParams(GENERALIZED_GAUSSIAN, sigma_x, sigma_y, theta, beta, size)
    if variant.startswith("plateau"):
        beta = rng.uniform(*config.plateau_beta)
        return BlurParams(PLATEAU, sigma_x, sigma_y, theta, beta, size)
    if variant == "anisotropic":
        return BlurParams(ANISOTROPIC_GAUSSIAN, sigma_x, sigma_y, theta, None, size)
    return BlurParams(ISOTROPIC_GAUSSIAN, sigma_x, sigma_x, 0.0, None, size)


def _draw_noise_params(config: PipelineConfig, rng: np.random.Generator) -> NoiseParams:
    if config.hard_model:
        noise_type = NOISE_TYPES[int(rng.integers(0, len(NOISE_TYPES)))]
    else:
        noise_type = config.noise_type
    if noise_type in (GAUSSIAN_GREY, GAUSSIAN_COLOR):
        sigma = rng.uniform(*config.noise_sigma)
        spec = NoiseSpec(noise_type, sigma_255=sigma)
    else:
        lo, hi = config.poisson_lambda
        lam = math.exp(rng.uniform(math.log(lo), math.log(hi)))  # scale parameter
        spec = NoiseSpec(noise_type, poisson_lambda=lam)
    return spec.to_params()


def sample_recipe(config: PipelineConfig, key: StreamKey) -> SampledRecipe:
    """Resolve gates and stage parameters for one image.

    All draws come from the sampler stream of (key.master_seed,
    key.image_key); the draw order is fixed: gate bits in stage order, then
    parameters of each open gate in stage order.
    """
    rng = derive_stream(StreamKey(key.master_seed, key.image_key, STAGE_SAMPLER))
    gates = {}
    for name in GATED_STAGE_NAMES:
        if config.mode == "practical":
            gates[name] = 1
        elif config.mode == "classical" and name != "blur":
            gates[name] = 0
        else:
            gates[name] = int(rng.random() < config.gates.probabilities[name])

    blur = _draw_blur_params(config, rng) if gates["blur"] else None
    noise = _draw_noise_params(config, rng) if gates["noise"] else None
    jpeg = None
    if gates["jpeg"]:
        lo, hi = config.jpeg_quality
        jpeg = int(rng.integers(int(lo), int(hi) + 1))

    return SampledRecipe(
        image_key=key.image_key,
        gate_outcomes=tuple(gates[name] for name in GATED_STAGE_NAMES),
        blur=blur,
        noise=noise,
        jpeg=jpeg,
        scale=config.scale,
        seed_trace=SeedTrace(master_seed=key.master_seed, image_key=key.image_key),
    )


def run_recipe(image: PlanarImage, recipe: SampledRecipe) -> PlanarImage:
    """Apply a resolved recipe: blur -> downsample -> noise -> jpeg.

    Deterministic: the noise field is re-derived from the recipe's
    seed_trace, so replays are bit-exact.
    """
    out = image
    if recipe.blur is not None:
        out = convolve(out, make_kernel(recipe.blur))
    out = downsample_bicubic(out, recipe.scale)
    if recipe.noise is not None:
        spec = NoiseSpec.from_params(recipe.noise)
        rng = derive_stream(
            StreamKey(recipe.seed_trace.master_seed, recipe.seed_trace.image_key, STAGE_NOISE)
        )
        if spec.is_gaussian:
            out = add_gaussian_noise(out, spec, rng)
        else:
            out = add_poisson_noise(out, spec, rng)
    if recipe.jpeg is not None:
        out = jpeg_compress(out, recipe.jpeg)
    return out


def run_gated(image: PlanarImage, config: PipelineConfig, key: StreamKey):
    """Sample a recipe for ``key`` and run it; returns (lr_image, recipe)."""
    recipe = sample_recipe(config, key)
    return run_recipe(image, recipe), recipe
