"""Shared domain types: pixel rasters, derived RNG streams, and recipe records.

Everything downstream (kernel synthesis, degradation stages, benchmark
generation) trades in these types.  All of them are immutable values, safe
to share across worker processes; randomness never lives in an object, it
is always re-derived from a :class:`StreamKey`.
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Optional

import numpy as np

MAX_SEED = 2**64 - 1

# Fixed stage ordinals.  Streams derived for distinct ordinals are
# statistically independent, so gate sampling, noise realization and crop
# placement never interact even for the same (seed, image) pair.
STAGE_SAMPLER = 0
STAGE_BLUR = 1
STAGE_DOWNSAMPLE = 2
STAGE_NOISE = 3
STAGE_JPEG = 4
STAGE_CROP = 5

GATED_STAGE_NAMES = ("blur", "noise", "jpeg")


class DegraforgeError(Exception):
    """Base class for errors raised by this package."""


def clamp01(samples: np.ndarray) -> np.ndarray:
    """Clamp an array of samples to [0, 1] (idempotent)."""
    return np.clip(samples, 0.0, 1.0)


def float_to_uint8(samples: np.ndarray) -> np.ndarray:
    """[0,1] float -> uint8 with round-half-away-from-zero of 255*x."""
    return np.floor(clamp01(samples) * 255.0 + 0.5).astype(np.uint8)


def uint8_to_float(samples: np.ndarray) -> np.ndarray:
    """uint8 -> [0,1] float64 (k / 255)."""
    return samples.astype(np.float64) / 255.0


def bt601_luma(planes: np.ndarray) -> np.ndarray:
    """Full-range BT.601 luma of a (channels, h, w) plane stack."""
    if planes.shape[0] == 1:
        return planes[0]
    r, g, b = planes[0], planes[1], planes[2]
    return 0.299 * r + 0.587 * g + 0.114 * b


@dataclass(frozen=True, eq=False)
class PlanarImage:
    """Floating-point raster in [0,1], planar (channel, row, column) layout.

    ``samples`` is a read-only float64 array of shape (channels, height,
    width); flattening it yields the planar row-major sample vector.
    """

    width: int
    height: int
    channels: int
    samples: np.ndarray

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"image dimensions must be >= 1, got {self.width}x{self.height}")
        if self.channels not in (1, 3):
            raise ValueError(f"channels must be 1 or 3, got {self.channels}")
        expected = (self.channels, self.height, self.width)
        if self.samples.shape != expected:
            raise ValueError(f"samples shape {self.samples.shape} != {expected}")

    @classmethod
    def from_planes(cls, planes: np.ndarray) -> "PlanarImage":
        """Build from a (channels, h, w) or (h, w) float array (copied)."""
        arr = np.asarray(planes, dtype=np.float64)
        if arr.ndim == 2:
            arr = arr[None, :, :]
        if arr.ndim != 3:
            raise ValueError(f"expected 2-D or 3-D array, got ndim={arr.ndim}")
        arr = np.ascontiguousarray(arr).copy()
        arr.setflags(write=False)
        c, h, w = arr.shape
        return cls(width=w, height=h, channels=c, samples=arr)

    @classmethod
    def from_interleaved(cls, pixels: np.ndarray) -> "PlanarImage":
        """Build from an interleaved (h, w, c) or (h, w) array."""
        arr = np.asarray(pixels, dtype=np.float64)
        if arr.ndim == 2:
            return cls.from_planes(arr)
        if arr.ndim != 3:
            raise ValueError(f"expected 2-D or 3-D array, got ndim={arr.ndim}")
        return cls.from_planes(np.moveaxis(arr, 2, 0))

    @classmethod
    def full(cls, height: int, width: int, value: float, channels: int = 3) -> "PlanarImage":
        return cls.from_planes(np.full((channels, height, width), value, dtype=np.float64))

    def to_interleaved(self) -> np.ndarray:
        """Return an interleaved (h, w, c) float64 copy."""
        return np.moveaxis(self.samples, 0, 2).copy()

    def plane(self, index: int) -> np.ndarray:
        return self.samples[index]

    def clamped(self) -> "PlanarImage":
        return PlanarImage.from_planes(clamp01(self.samples))

    def luma(self) -> np.ndarray:
        return bt601_luma(self.samples)


@dataclass(frozen=True)
class StreamKey:
    """Addresses one independent random stream.

    The derived generator is a pure function of (master_seed, image_key,
    stage_index): processing order, batching and thread count cannot change
    any draw.
    """

    master_seed: int
    image_key: str
    stage_index: int

    def __post_init__(self):
        if not 0 <= self.master_seed <= MAX_SEED:
            raise ValueError(f"master_seed must fit in 64 bits, got {self.master_seed}")
        if self.stage_index < 0:
            raise ValueError(f"stage_index must be >= 0, got {self.stage_index}")


def derive_stream(key: StreamKey) -> np.random.Generator:
    """Derive the counter-based generator addressed by ``key``.

    The 128-bit Philox key is a BLAKE2b digest of the (length-framed)
    StreamKey fields, so distinct keys give independent streams and the
    mapping is stable across platforms and processes.
    """
    h = hashlib.blake2b(digest_size=16)
    h.update(struct.pack("<Q", key.master_seed))
    encoded = key.image_key.encode("utf-8")
    h.update(struct.pack("<Q", len(encoded)))
    h.update(encoded)
    h.update(struct.pack("<Q", key.stage_index))
    philox_key = int.from_bytes(h.digest(), "little")
    return np.random.Generator(np.random.Philox(key=philox_key))


@dataclass(frozen=True)
class SeedTrace:
    """The StreamKey components recorded in a recipe for exact replay."""

    master_seed: int
    image_key: str


@dataclass(frozen=True)
class BlurParams:
    """Realized blur-stage parameters (enough to rebuild the kernel)."""

    kernel_type: str
    sigma_x: float
    sigma_y: float
    rotation_radians: float
    shape_beta: Optional[float]
    size: int


@dataclass(frozen=True)
class NoiseParams:
    """Realized noise-stage parameters."""

    noise_type: str  # "gaussian" | "poisson"
    color_mode: str  # "grey" | "color"
    sigma_255: Optional[float] = None
    poisson_lambda: Optional[float] = None


@dataclass(frozen=True)
class SampledRecipe:
    """The concrete degradation applied to one image.

    ``gate_outcomes`` holds the realized gate bits in pipeline order
    (blur, noise, jpeg); a stage's parameter block is present iff its gate
    is 1.  Downsampling has no gate and is always present via ``scale``.
    Replaying a recipe on the same source reproduces the output bit-exactly
    because noise fields are re-derived from ``seed_trace``.
    """

    image_key: str
    gate_outcomes: tuple
    blur: Optional[BlurParams]
    noise: Optional[NoiseParams]
    jpeg: Optional[int]
    scale: int
    seed_trace: SeedTrace

    def __post_init__(self):
        if len(self.gate_outcomes) != len(GATED_STAGE_NAMES):
            raise ValueError(f"expected {len(GATED_STAGE_NAMES)} gate bits, got {self.gate_outcomes}")
        if any(g not in (0, 1) for g in self.gate_outcomes):
            raise ValueError(f"gate outcomes must be bits, got {self.gate_outcomes}")
        blocks = (self.blur, self.noise, self.jpeg)
        for name, gate, block in zip(GATED_STAGE_NAMES, self.gate_outcomes, blocks):
            if gate == 1 and block is None:
                raise ValueError(f"gate for {name} is open but its parameter block is missing")
            if gate == 0 and block is not None:
                raise ValueError(f"gate for {name} is closed but a parameter block is present")
        if self.scale < 1:
            raise ValueError(f"scale must be >= 1, got {self.scale}")
        if self.jpeg is not None and not 1 <= self.jpeg <= 100:
            raise ValueError(f"jpeg quality must be in [1, 100], got {self.jpeg}")

    def to_dict(self) -> dict:
        blur = None
        if self.blur is not None:
            blur = {
                "kernel_type": self.blur.kernel_type,
                "sigma_x": self.blur.sigma_x,
                "sigma_y": self.blur.sigma_y,
                "rotation_radians": self.blur.rotation_radians,
                "shape_beta": self.blur.shape_beta,
                "size": self.blur.size,
            }
        noise = None
        if self.noise is not None:
            noise = {"noise_type": self.noise.noise_type, "color_mode": self.noise.color_mode}
            if self.noise.noise_type == "gaussian":
                noise["sigma_255"] = self.noise.sigma_255
            else:
                noise["poisson_lambda"] = self.noise.poisson_lambda
        return {
            "image_key": self.image_key,
            "gate_outcomes": list(self.gate_outcomes),
            "blur": blur,
            "noise": noise,
            "jpeg": self.jpeg,
            "scale": self.scale,
            "seed_trace": {
                "master_seed": self.seed_trace.master_seed,
                "image_key": self.seed_trace.image_key,
            },
        }

    @classmethod
    def from_dict(cls, record: dict) -> "SampledRecipe":
        blur = None
        if record.get("blur") is not None:
            b = record["blur"]
            blur = BlurParams(
                kernel_type=b["kernel_type"],
                sigma_x=float(b["sigma_x"]),
                sigma_y=float(b["sigma_y"]),
                rotation_radians=float(b["rotation_radians"]),
                shape_beta=None if b.get("shape_beta") is None else float(b["shape_beta"]),
                size=int(b["size"]),
            )
        noise = None
        if record.get("noise") is not None:
            n = record["noise"]
            noise = NoiseParams(
                noise_type=n["noise_type"],
                color_mode=n["color_mode"],
                sigma_255=None if n.get("sigma_255") is None else float(n["sigma_255"]),
                poisson_lambda=None if n.get("poisson_lambda") is None else float(n["poisson_lambda"]),
            )
        trace = record["seed_trace"]
        return cls(
            image_key=record["image_key"],
            gate_outcomes=tuple(int(g) for g in record["gate_outcomes"]),
            blur=blur,
            noise=noise,
            jpeg=None if record.get("jpeg") is None else int(record["jpeg"]),
            scale=int(record["scale"]),
            seed_trace=SeedTrace(master_seed=int(trace["master_seed"]), image_key=trace["image_key"]),
        )

    def to_json_line(self) -> str:
        # json emits shortest round-trip reprs for floats, i.e. at least the
        # 9 significant digits the manifest contract requires.
        return json.dumps(self.to_dict(), ensure_ascii=False, separators=(", ", ": "))


def write_manifest(path, records: Iterable[dict]) -> None:
    """Write manifest records (recipe or per-file error dicts) as JSON lines."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, ensure_ascii=False, separators=(", ", ": ")))
            fh.write("\n")


def read_manifest(path) -> Iterator[dict]:
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield json.loads(line)
