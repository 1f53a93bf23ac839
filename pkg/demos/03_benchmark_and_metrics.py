"""End-to-end benchmark run on a toy corpus.

Materializes the Practical8 cases, restores each LR with the bicubic
baseline (x4 upsampling), and evaluates PSNR/SSIM per case -- the same
chain the CLI drives with `degraforge practical8 / upsample / eval`.
"""

import tempfile
from pathlib import Path

import numpy as np

from degraforge import (
    PlanarImage,
    decode_image,
    encode_png,
    evaluate_pairs,
    practical8_cases,
    read_manifest,
    upsample_bicubic,
)
from degraforge.bench import generate_benchmark
from degraforge.metrics import MetricOptions


def toy_corpus(root: Path, count=4, size=96):
    rng = np.random.default_rng(42)
    y, x = np.mgrid[0:size, 0:size].astype(float)
    for i in range(count):
        luma = 0.5 + 0.25 * np.sin(2 * np.pi * (x * rng.uniform(1, 6) + y * rng.uniform(1, 6)) / size)
        luma += 0.1 * ((x // rng.integers(8, 20) + y // rng.integers(8, 20)) % 2)
        tint = [0.85 + 0.15 * np.sin(2 * np.pi * (x * p + y * q) / size)
                for p, q in rng.uniform(0.3, 1.5, size=(3, 2))]
        img = PlanarImage.from_planes(np.clip(np.stack([luma * t for t in tint]), 0, 1))
        encode_png(img, root / f"toy{i}.png")


with tempfile.TemporaryDirectory() as td:
    work = Path(td)
    hr_dir = work / "hr"
    toy_corpus(hr_dir)

    cases = practical8_cases(scale=4)
    print("cases:", " ".join(c.name for c in cases))
    lr_root = work / "practical8"
    records = generate_benchmark(hr_dir, lr_root, cases, master_seed=0)
    print(f"generated {len(records)} LR images + manifest "
          f"({sum(1 for _ in read_manifest(lr_root / 'manifest.jsonl'))} lines)")

    up_root = work / "bicubic_restored"
    for case in cases:
        for lr_png in sorted((lr_root / case.name).glob("*.png")):
            restored = upsample_bicubic(decode_image(lr_png), 4)
            encode_png(restored, up_root / case.name / lr_png.name)

    table = evaluate_pairs(up_root, hr_dir, [c.name for c in cases], MetricOptions(border_crop=4))
    print()
    print(table.to_markdown(label="Bicubic"))
    print("CSV form:\n" + table.to_csv())
