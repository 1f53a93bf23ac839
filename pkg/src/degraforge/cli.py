"""Command-line interface: synth | practical8 | eval | gap | upsample | kernel.

Exit codes: 0 on success, 1 when any per-file task failed (or tables could
not be compared), 2 on usage/config errors.  The tuple (config file, master
seed, source images) fully determines every output byte; worker count never
leaks into results.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import __version__
from .bench import BenchmarkError, classical5_cases, generate_benchmark, practical8_cases
from .core import (
    STAGE_CROP,
    PlanarImage,
    StreamKey,
    derive_stream,
    write_manifest,
)
from .degrade import PipelineConfig, run_gated
from .gap import GapError, compute_gap, load_psnr_table, render_gap_csv, render_gap_markdown
from .io import ImageIOError, decode_image, encode_png, list_images
from .kernels import (
    KERNEL_TYPES,
    dump_kernel,
    make_anisotropic_gaussian,
    make_generalized_gaussian,
    make_isotropic_gaussian,
    make_plateau,
)
from .metrics import COLOR_SPACES, MetricOptions, RGB_MEAN, evaluate_pairs
from .parallel import run_tasks
from .resample import upsample_bicubic


# ---------------------------------------------------------------------------
# Batch task workers (top-level: they must pickle into worker processes)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _SynthTask:
    hr_path: str
    rel: str
    lr_path: str
    hr_patch_path: Optional[str]
    config: dict
    crop: Optional[int]


def _run_synth_task(task: _SynthTask) -> dict:
    try:
        config = PipelineConfig.from_dict(task.config)
        image = decode_image(task.hr_path)
        record_extra = {}
        if task.crop is not None:
            n = task.crop
            if image.height < n or image.width < n:
                raise ImageIOError(
                    f"{task.hr_path}: image {image.width}x{image.height} smaller than crop {n}"
                )
            rng = derive_stream(StreamKey(config.master_seed, task.rel, STAGE_CROP))
            y0 = int(rng.integers(0, image.height - n + 1))
            x0 = int(rng.integers(0, image.width - n + 1))
            image = PlanarImage.from_planes(image.samples[:, y0:y0 + n, x0:x0 + n])
            encode_png(image, task.hr_patch_path)
            record_extra["crop"] = {"x": x0, "y": y0, "size": n}
        lr, recipe = run_gated(image, config, StreamKey(config.master_seed, task.rel, 0))
        encode_png(lr, task.lr_path)
        record = recipe.to_dict()
        record.update(record_extra)
        return record
    except (ImageIOError, ValueError) as exc:
        return {"image_key": task.rel, "error": str(exc)}


@dataclass(frozen=True)
class _UpsampleTask:
    lr_path: str
    rel: str
    out_path: str
    scale: int


def _run_upsample_task(task: _UpsampleTask) -> dict:
    try:
        image = decode_image(task.lr_path)
        encode_png(upsample_bicubic(image, task.scale), task.out_path)
        return {"image_key": task.rel}
    except (ImageIOError, ValueError) as exc:
        return {"image_key": task.rel, "error": str(exc)}


def _report_failures(records, command: str) -> int:
    failures = [r for r in records if "error" in r]
    for r in failures:
        print(f"{command}: {r['image_key']}: {r['error']}", file=sys.stderr)
    if failures:
        print(f"{command}: {len(failures)} file(s) failed", file=sys.stderr)
        return 1
    return 0


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _load_config(args) -> PipelineConfig:
    if args.config:
        data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        config = PipelineConfig.from_dict(data)
    else:
        config = PipelineConfig()
    if args.seed is not None:
        config = PipelineConfig.from_dict({**config.to_dict(), "master_seed": args.seed})
    return config


def _cmd_synth(args) -> int:
    try:
        config = _load_config(args)
    except (OSError, ValueError) as exc:
        print(f"synth: bad config: {exc}", file=sys.stderr)
        return 2
    if args.crop is not None and args.crop % config.scale != 0:
        print(f"synth: --crop {args.crop} is not divisible by scale {config.scale}", file=sys.stderr)
        return 2
    hr_dir, out_dir = Path(args.hr_dir), Path(args.out_dir)
    try:
        rels = list_images(hr_dir)
    except ImageIOError as exc:
        print(f"synth: {exc}", file=sys.stderr)
        return 2
    if not rels:
        print(f"synth: {hr_dir}: no input images found", file=sys.stderr)
        return 1
    config_dict = config.to_dict()
    tasks = []
    for rel in rels:
        stem_rel = str(Path(rel).with_suffix(".png"))
        if args.crop is not None:
            lr_path = out_dir / "lr" / stem_rel
            hr_patch = str(out_dir / "hr" / stem_rel)
        else:
            lr_path = out_dir / stem_rel
            hr_patch = None
        tasks.append(_SynthTask(str(hr_dir / rel), rel, str(lr_path), hr_patch, config_dict, args.crop))
    records = run_tasks(_run_synth_task, tasks, args.workers)
    write_manifest(out_dir / "manifest.jsonl", records)
    print(f"synth: {len(records)} image(s) -> {out_dir} (seed {config.master_seed}, mode {config.mode})")
    return _report_failures(records, "synth")


def _cmd_practical8(args) -> int:
    cases = classical5_cases(args.scale) if args.classical5 else practical8_cases(args.scale)
    print("cases: " + " ".join(c.name for c in cases))
    try:
        records = generate_benchmark(
            args.hr_dir,
            args.out_dir,
            cases,
            master_seed=args.seed,
            kernel_size=args.kernel_size,
            workers=args.workers,
        )
    except (BenchmarkError, ImageIOError) as exc:
        print(f"practical8: {exc}", file=sys.stderr)
        return 1
    print(f"practical8: wrote {len(records)} manifest line(s) to {args.out_dir}")
    return _report_failures(records, "practical8")


def _cmd_eval(args) -> int:
    if args.cases:
        cases = [c.strip() for c in args.cases.split(",") if c.strip()]
    else:
        sr_dir = Path(args.sr_dir)
        cases = sorted(p.name for p in sr_dir.iterdir() if p.is_dir()) if sr_dir.is_dir() else []
        cases = cases or None
    options = MetricOptions(border_crop=args.crop, color_space=args.color_space)
    try:
        table = evaluate_pairs(args.sr_dir, args.hr_dir, cases, options, modcrop_scale=args.modcrop)
    except Exception as exc:
        print(f"eval: {exc}", file=sys.stderr)
        return 1
    table.write_csv(f"{args.out}.csv")
    Path(f"{args.out}.md").write_text(table.to_markdown(args.label), encoding="utf-8")
    print(table.to_markdown(args.label))
    for case, stem, reason in table.missing:
        print(f"eval: {case}/{stem}: {reason}", file=sys.stderr)
    if table.missing:
        print(f"eval: {len(table.missing)} pair(s) not evaluated", file=sys.stderr)
        return 1
    return 0


def _cmd_gap(args) -> int:
    try:
        method = load_psnr_table(args.method_csv)
        upper = load_psnr_table(args.upper_csv)
        gap = compute_gap(method, upper)
    except (GapError, OSError, ValueError) as exc:
        print(f"gap: {exc}", file=sys.stderr)
        return 1
    Path(f"{args.out}.csv").write_text(render_gap_csv(gap), encoding="utf-8")
    Path(f"{args.out}.md").write_text(render_gap_markdown(gap), encoding="utf-8")
    print(render_gap_markdown(gap))
    return 0


def _cmd_upsample(args) -> int:
    lr_dir, out_dir = Path(args.lr_dir), Path(args.out_dir)
    try:
        rels = list_images(lr_dir)
    except ImageIOError as exc:
        print(f"upsample: {exc}", file=sys.stderr)
        return 2
    if not rels:
        print(f"upsample: {lr_dir}: no input images found", file=sys.stderr)
        return 1
    tasks = [
        _UpsampleTask(str(lr_dir / rel), rel, str(out_dir / Path(rel).with_suffix(".png")), args.scale)
        for rel in rels
    ]
    records = run_tasks(_run_upsample_task, tasks, args.workers)
    print(f"upsample: {len(records)} image(s) x{args.scale} -> {out_dir}")
    return _report_failures(records, "upsample")


def _cmd_kernel(args) -> int:
    try:
        if args.type == "isotropic_gaussian":
            kernel = make_isotropic_gaussian(args.sigma_x, args.size)
        elif args.type == "anisotropic_gaussian":
            kernel = make_anisotropic_gaussian(args.sigma_x, args.sigma_y, args.theta, args.size)
        elif args.type == "generalized_gaussian":
            kernel = make_generalized_gaussian(args.sigma_x, args.sigma_y, args.theta, args.beta, args.size)
        else:
            kernel = make_plateau(args.sigma_x, args.sigma_y, args.theta, args.beta, args.size)
    except (TypeError, ValueError) as exc:
        print(f"kernel: {exc}", file=sys.stderr)
        return 2
    text = dump_kernel(kernel)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="degraforge",
        description="Deterministic gated image-degradation synthesis and evaluation",
    )
    parser.add_argument("--version", action="version", version=f"degraforge {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="degrade a directory of HR images with the configured pipeline")
    p.add_argument("hr_dir")
    p.add_argument("out_dir")
    p.add_argument("--config", help="pipeline config JSON (defaults to the light gated model)")
    p.add_argument("--seed", type=int, default=None, help="override the config master_seed")
    p.add_argument("--workers", type=int, default=None, help="0 = auto; falls back to $DEGRAFORGE_WORKERS")
    p.add_argument("--crop", type=int, default=None, help="emit aligned HR/LR patch pairs of this HR size")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("practical8", help="materialize the Practical8 (or classical 5-case) benchmark")
    p.add_argument("hr_dir")
    p.add_argument("out_dir")
    p.add_argument("--scale", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--kernel-size", type=int, default=21)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--classical5", action="store_true", help="use {bic, b0.6, b1.2, b1.8, b2.4} instead")
    p.set_defaults(func=_cmd_practical8)

    p = sub.add_parser("eval", help="PSNR/SSIM tables for SR outputs against HR references")
    p.add_argument("sr_dir")
    p.add_argument("hr_dir")
    p.add_argument("--cases", help="comma-separated case subdirectories (default: autodetect)")
    p.add_argument("--color-space", choices=COLOR_SPACES, default=RGB_MEAN)
    p.add_argument("--crop", type=int, default=4, help="border pixels to ignore (default: the x4 scale)")
    p.add_argument("--modcrop", type=int, default=None, help="crop HR to a multiple of this scale first")
    p.add_argument("--label", default="method", help="row label for the Markdown table")
    p.add_argument("--out", default="metrics", help="output prefix for .csv/.md")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("gap", help="per-case deltas between a method table and an upper-bound table")
    p.add_argument("method_csv")
    p.add_argument("upper_csv")
    p.add_argument("--out", default="gap", help="output prefix for .csv/.md")
    p.set_defaults(func=_cmd_gap)

    p = sub.add_parser("upsample", help="bicubic-upsample LR images (the Bicubic baseline restorer)")
    p.add_argument("lr_dir")
    p.add_argument("out_dir")
    p.add_argument("--scale", type=int, default=4)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=_cmd_upsample)

    p = sub.add_parser("kernel", help="print a blur kernel as plain-text rows")
    p.add_argument("--type", choices=KERNEL_TYPES, default="isotropic_gaussian")
    p.add_argument("--sigma-x", type=float, required=True)
    p.add_argument("--sigma-y", type=float, default=None)
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--size", type=int, default=21)
    p.add_argument("--out", help="write to a file instead of stdout")
    p.set_defaults(func=_cmd_kernel)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "sigma_y", None) is None and hasattr(args, "sigma_x"):
        args.sigma_y = args.sigma_x
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
