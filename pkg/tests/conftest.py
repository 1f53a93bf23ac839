"""Shared fixtures: seeded random rasters and a small synthetic photo corpus."""

import numpy as np
import pytest

from degraforge import PlanarImage, encode_png


def random_image(rng: np.random.Generator, height: int, width: int, channels: int = 3) -> PlanarImage:
    return PlanarImage.from_planes(rng.random((channels, height, width)))


def toy_photo(rng: np.random.Generator, height: int = 96, width: int = 96) -> PlanarImage:
    """Natural-ish content: luma detail (gradients, gratings, edges) under smooth chroma."""
    y, x = np.mgrid[0:height, 0:width].astype(np.float64)
    luma = 0.5 + 0.22 * np.sin(2 * np.pi * x / width) * np.cos(2 * np.pi * y / height)
    fx, fy = rng.uniform(2, 10, size=2)
    phase = rng.uniform(0, 2 * np.pi)
    luma += 0.18 * np.sin(2 * np.pi * (fx * x / width + fy * y / height) + phase)
    luma += 0.12 * ((x // rng.integers(8, 24) + y // rng.integers(8, 24)) % 2)
    planes = []
    for _ in range(3):
        px, py = rng.uniform(0.4, 1.5, size=2)
        tint = 0.85 + 0.15 * np.sin(2 * np.pi * (px * x / width + py * y / height) + rng.uniform(0, 2 * np.pi))
        planes.append(luma * tint)
    return PlanarImage.from_planes(np.clip(np.stack(planes), 0.0, 1.0))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def photo(rng) -> PlanarImage:
    return toy_photo(rng)


def write_corpus(directory, count: int, height: int = 64, width: int = 64, seed: int = 99):
    """Write a deterministic toy corpus of PNGs; returns the file names."""
    rng = np.random.default_rng(seed)
    names = []
    for i in range(count):
        name = f"img{i:03d}.png"
        encode_png(toy_photo(rng, height, width), directory / name)
        names.append(name)
    return names


@pytest.fixture
def corpus_dir(tmp_path):
    directory = tmp_path / "hr"
    directory.mkdir()
    write_corpus(directory, 6)
    return directory
