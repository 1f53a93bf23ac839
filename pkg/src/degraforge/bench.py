"""Fixed evaluation sets: Practical8 and the classical 5-case set.

Each case pins constant stage parameters (never ranges); generating a
benchmark materializes one LR directory per case plus a JSON-lines manifest
of the exact recipes.  Noise realizations are seeded per (master_seed,
case/image), so regenerating a benchmark is byte-stable.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence

from .core import BlurParams, SampledRecipe, SeedTrace, write_manifest
from .degrade import GAUSSIAN_GREY, NoiseSpec, run_recipe
from .io import ImageIOError, decode_image, encode_png, list_images
from .kernels import DEFAULT_KERNEL_SIZE, ISOTROPIC_GAUSSIAN
from .parallel import run_tasks

PRACTICAL8_BLUR_SIGMA = 2.0
PRACTICAL8_NOISE_SIGMA = 20.0
PRACTICAL8_JPEG_QUALITY = 60

CLASSICAL5_BLUR_SIGMAS = (0.6, 1.2, 1.8, 2.4)


class BenchmarkError(Exception):
    """Fatal benchmark-generation failure (e.g. empty input directory)."""


def case_name(blur_sigma: Optional[float], noise_sigma: Optional[float], jpeg_quality: Optional[int]) -> str:
    """Canonical stage-concatenation name, "bic" when no stage applies."""
    parts = []
    if blur_sigma is not None:
        text = f"{blur_sigma:g}"
        parts.append("b" + (text if "." in text else text + ".0"))
    if noise_sigma is not None:
        parts.append(f"n{noise_sigma:g}")
    if jpeg_quality is not None:
        parts.append(f"j{jpeg_quality:d}")
    return "".join(parts) if parts else "bic"


@dataclass(frozen=True)
class BenchCase:
    """One evaluation corner: fixed blur sigma / noise sigma / JPEG quality."""

    name: str
    blur_sigma: Optional[float]
    noise_sigma: Optional[float]
    jpeg_quality: Optional[int]
    scale: int

    @classmethod
    def build(cls, blur_sigma, noise_sigma, jpeg_quality, scale) -> "BenchCase":
        return cls(case_name(blur_sigma, noise_sigma, jpeg_quality), blur_sigma, noise_sigma, jpeg_quality, scale)

    @property
    def gate_vector(self) -> tuple:
        return (
            int(self.blur_sigma is not None),
            int(self.noise_sigma is not None),
            int(self.jpeg_quality is not None),
        )

    def to_recipe(self, image_key: str, master_seed: int, kernel_size: int = DEFAULT_KERNEL_SIZE) -> SampledRecipe:
        blur = None
        if self.blur_sigma is not None:
            blur = BlurParams(ISOTROPIC_GAUSSIAN, self.blur_sigma, self.blur_sigma, 0.0, None, kernel_size)
        noise = None
        if self.noise_sigma is not None:
            noise = NoiseSpec(GAUSSIAN_GREY, sigma_255=self.noise_sigma).to_params()
        return SampledRecipe(
            image_key=image_key,
            gate_outcomes=self.gate_vector,
            blur=blur,
            noise=noise,
            jpeg=self.jpeg_quality,
            scale=self.scale,
            seed_trace=SeedTrace(master_seed=master_seed, image_key=image_key),
        )


def practical8_cases(scale: int = 4) -> List[BenchCase]:
    """The eight corner cases {bic, b2.0, n20, j60, b2.0n20, b2.0j60, n20j60, b2.0n20j60}.

    Covers every gate vector in {0,1}^3 exactly once, with blur sigma 2.0,
    noise sigma 20 and JPEG quality 60 wherever the stage is on.
    """
    if scale < 1:
        raise ValueError(f"scale must be >= 1, got {scale}")
    b, n, j = PRACTICAL8_BLUR_SIGMA, PRACTICAL8_NOISE_SIGMA, PRACTICAL8_JPEG_QUALITY
    combos = [
        (None, None, None),
        (b, None, None),
        (None, n, None),
        (None, None, j),
        (b, n, None),
        (b, None, j),
        (None, n, j),
        (b, n, j),
    ]
    return [BenchCase.build(bs, ns, jq, scale) for bs, ns, jq in combos]


def classical5_cases(scale: int = 4) -> List[BenchCase]:
    """Bicubic plus blur-only cases at sigma {0.6, 1.2, 1.8, 2.4}."""
    if scale < 1:
        raise ValueError(f"scale must be >= 1, got {scale}")
    cases = [BenchCase.build(None, None, None, scale)]
    cases += [BenchCase.build(s, None, None, scale) for s in CLASSICAL5_BLUR_SIGMAS]
    return cases


@dataclass(frozen=True)
class _CaseTask:
    hr_path: str
    out_path: str
    rel: str
    case: BenchCase
    master_seed: int
    kernel_size: int


def _run_case_task(task: _CaseTask) -> dict:
    image_key = f"{task.case.name}/{task.rel}"
    try:
        hr = decode_image(task.hr_path)
        recipe = task.case.to_recipe(image_key, task.master_seed, task.kernel_size)
        lr = run_recipe(hr, recipe)
        encode_png(lr, task.out_path)
        return recipe.to_dict()
    except (ImageIOError, ValueError) as exc:
        return {"image_key": image_key, "error": str(exc)}


def generate_benchmark(
    hr_dir,
    out_dir,
    cases: Sequence[BenchCase],
    master_seed: int = 0,
    kernel_size: int = DEFAULT_KERNEL_SIZE,
    workers: Optional[int] = None,
) -> List[dict]:
    """Write out_dir/<case>/<stem>.png for every (case, HR image) pair.

    Returns the manifest records (also written to out_dir/manifest.jsonl in
    deterministic sorted order).  Per-file failures become error records and
    processing continues; an empty hr_dir is fatal.
    """
    hr_dir, out_dir = Path(hr_dir), Path(out_dir)
    rels = list_images(hr_dir)
    if not rels:
        raise BenchmarkError(f"{hr_dir}: no input images found")
    tasks = []
    for case in cases:
        for rel in rels:
            stem = Path(rel).stem
            tasks.append(
                _CaseTask(
                    hr_path=str(hr_dir / rel),
                    out_path=str(out_dir / case.name / f"{stem}.png"),
                    rel=rel,
                    case=case,
                    master_seed=master_seed,
                    kernel_size=kernel_size,
                )
            )
    records = run_tasks(_run_case_task, tasks, workers)
    records.sort(key=lambda r: r["image_key"])
    write_manifest(out_dir / "manifest.jsonl", records)
    return records
