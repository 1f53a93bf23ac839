"""Full-reference quality metrics (PSNR, SSIM) with explicit conventions.

PSNR defaults to mean-over-RGB MSE after cropping a border of `scale`
pixels; a BT.601 luma mode is available.  SSIM is the standard single-scale
index (11x11 Gaussian window, sigma 1.5, K1=0.01, K2=0.03, L=1) computed on
the luma channel over the valid window region.
"""

from __future__ import annotations

import csv
import io as _io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .core import DegraforgeError, PlanarImage, bt601_luma
from .io import READ_EXTENSIONS, decode_image

RGB_MEAN = "rgb_mean"
LUMA_Y = "luma_y"
COLOR_SPACES = (RGB_MEAN, LUMA_Y)

FLAT_CASE = "all"  # pseudo-case used when comparing flat directories


class MetricError(DegraforgeError):
    """Raised on invalid metric inputs (dimension mismatch, bad options)."""


@dataclass(frozen=True)
class MetricOptions:
    border_crop: int = 4
    color_space: str = RGB_MEAN
    ssim_window: int = 11
    ssim_sigma: float = 1.5
    k1: float = 0.01
    k2: float = 0.03
    dynamic_range: float = 1.0

    def __post_init__(self):
        if self.border_crop < 0:
            raise ValueError(f"border_crop must be >= 0, got {self.border_crop}")
        if self.color_space not in COLOR_SPACES:
            raise ValueError(f"color_space must be one of {COLOR_SPACES}, got {self.color_space!r}")
        if self.ssim_window < 3 or self.ssim_window % 2 == 0:
            raise ValueError(f"ssim_window must be an odd integer >= 3, got {self.ssim_window}")

    @classmethod
    def for_scale(cls, scale: int, **kwargs) -> "MetricOptions":
        """The default convention: border crop equal to the SR scale factor."""
        return cls(border_crop=scale, **kwargs)


def _check_pair(a: PlanarImage, b: PlanarImage, options: MetricOptions) -> None:
    if (a.width, a.height, a.channels) != (b.width, b.height, b.channels):
        raise MetricError(
            f"image dimensions differ: {a.width}x{a.height}x{a.channels}"
            f" vs {b.width}x{b.height}x{b.channels}"
        )
    if options.border_crop * 2 >= min(a.width, a.height):
        raise MetricError(
            f"border_crop {options.border_crop} too large for {a.width}x{a.height}"
        )


def _crop(planes: np.ndarray, border: int) -> np.ndarray:
    if border == 0:
        return planes
    return planes[..., border:-border, border:-border]


def psnr(a: PlanarImage, b: PlanarImage, options: MetricOptions = MetricOptions()) -> float:
    """Peak signal-to-noise ratio in dB; math.inf when the crops are identical."""
    _check_pair(a, b, options)
    pa = _crop(a.samples, options.border_crop)
    pb = _crop(b.samples, options.border_crop)
    if options.color_space == LUMA_Y:
        pa, pb = bt601_luma(pa), bt601_luma(pb)
    mse = float(np.mean((pa - pb) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(options.dynamic_range**2 / mse)


def _gaussian_window(size: int, sigma: float) -> np.ndarray:
    offsets = np.arange(size, dtype=np.float64) - size // 2
    w = np.exp(-(offsets**2) / (2.0 * sigma * sigma))
    return w / w.sum()


def _valid_filter(plane: np.ndarray, window: np.ndarray) -> np.ndarray:
    """Separable valid-mode correlation with a normalized 1-D window."""
    k = window.size
    tmp = sliding_window_view(plane, k, axis=1) @ window
    return sliding_window_view(tmp, k, axis=0) @ window


def ssim(a: PlanarImage, b: PlanarImage, options: MetricOptions = MetricOptions()) -> float:
    """Mean single-scale SSIM over the valid window positions of the luma plane."""
    _check_pair(a, b, options)
    pa = bt601_luma(_crop(a.samples, options.border_crop))
    pb = bt601_luma(_crop(b.samples, options.border_crop))
    win = options.ssim_window
    if min(pa.shape) < win:
        raise MetricError(f"cropped image {pa.shape} is smaller than the {win}x{win} SSIM window")
    w = _gaussian_window(win, options.ssim_sigma)
    c1 = (options.k1 * options.dynamic_range) ** 2
    c2 = (options.k2 * options.dynamic_range) ** 2
    mu_a = _valid_filter(pa, w)
    mu_b = _valid_filter(pb, w)
    var_a = _valid_filter(pa * pa, w) - mu_a * mu_a
    var_b = _valid_filter(pb * pb, w) - mu_b * mu_b
    cov = _valid_filter(pa * pb, w) - mu_a * mu_b
    ssim_map = ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) / (
        (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2)
    )
    return float(np.mean(ssim_map))


# ---------------------------------------------------------------------------
# Directory evaluation and tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CaseMetrics:
    case: str
    n_images: int
    psnr_mean: float
    ssim_mean: Optional[float]
    per_image: tuple = ()  # (stem, psnr, ssim) triples


@dataclass(frozen=True)
class MetricTable:
    """Per-case aggregates plus the overall average (mean of case means)."""

    cases: tuple
    missing: tuple = ()  # (case, stem, reason) triples

    def case_names(self) -> List[str]:
        return [c.case for c in self.cases]

    def get(self, case: str) -> CaseMetrics:
        for c in self.cases:
            if c.case == case:
                return c
        raise KeyError(case)

    @property
    def average_psnr(self) -> float:
        return float(np.mean([c.psnr_mean for c in self.cases]))

    @property
    def average_ssim(self) -> Optional[float]:
        values = [c.ssim_mean for c in self.cases]
        if any(v is None for v in values):
            return None
        return float(np.mean(values))

    def to_csv(self) -> str:
        out = _io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["case", "n_images", "psnr_mean", "ssim_mean"])
        for c in self.cases:
            writer.writerow([c.case, c.n_images, repr(float(c.psnr_mean)),
                             "" if c.ssim_mean is None else repr(float(c.ssim_mean))])
        return out.getvalue()

    def write_csv(self, path) -> None:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(self.to_csv(), encoding="utf-8")

    @classmethod
    def from_csv(cls, text: str) -> "MetricTable":
        rows = list(csv.reader(_io.StringIO(text)))
        if not rows:
            raise MetricError("empty metrics CSV")
        header = [h.strip() for h in rows[0]]
        try:
            case_col = header.index("case")
            psnr_col = header.index("psnr_mean")
        except ValueError as exc:
            raise MetricError(f"metrics CSV needs 'case' and 'psnr_mean' columns, got {header}") from exc
        n_col = header.index("n_images") if "n_images" in header else None
        ssim_col = header.index("ssim_mean") if "ssim_mean" in header else None
        cases = []
        for row in rows[1:]:
            if not row or not row[case_col].strip():
                continue
            ssim_mean = None
            if ssim_col is not None and len(row) > ssim_col and row[ssim_col].strip():
                ssim_mean = float(row[ssim_col])
            n_images = 0
            if n_col is not None and len(row) > n_col and row[n_col].strip():
                n_images = int(row[n_col])
            cases.append(CaseMetrics(row[case_col].strip(), n_images, float(row[psnr_col]), ssim_mean))
        if not cases:
            raise MetricError("metrics CSV contains no case rows")
        return cls(cases=tuple(cases))

    @classmethod
    def read_csv(cls, path) -> "MetricTable":
        return cls.from_csv(Path(path).read_text(encoding="utf-8"))

    def to_markdown(self, label: str = "method") -> str:
        """One table row per metric, cases as columns (paper-table layout)."""
        names = self.case_names()
        head = "| Method | " + " | ".join(names) + " | Average |"
        rule = "|" + "---|" * (len(names) + 2)
        fmt = lambda v: "inf" if math.isinf(v) else f"{v:.2f}"
        psnr_row = f"| {label} (PSNR) | " + " | ".join(fmt(c.psnr_mean) for c in self.cases)
        psnr_row += f" | {fmt(self.average_psnr)} |"
        lines = [head, rule, psnr_row]
        if all(c.ssim_mean is not None for c in self.cases):
            sfmt = lambda v: f"{v:.4f}"
            ssim_row = f"| {label} (SSIM) | " + " | ".join(sfmt(c.ssim_mean) for c in self.cases)
            ssim_row += f" | {sfmt(self.average_ssim)} |"
            lines.append(ssim_row)
        return "\n".join(lines) + "\n"


def _files_by_stem(directory: Path) -> dict:
    found = {}
    if not directory.is_dir():
        return found
    for p in sorted(directory.iterdir()):
        if p.is_file() and p.suffix.lower() in READ_EXTENSIONS:
            found.setdefault(p.stem, p)
    return found


def modcrop(image: PlanarImage, scale: int) -> PlanarImage:
    """Top-left crop to dimensions divisible by scale (standard SR practice)."""
    h = image.height - image.height % scale
    w = image.width - image.width % scale
    if h == image.height and w == image.width:
        return image
    return PlanarImage.from_planes(image.samples[:, :h, :w])


def evaluate_pairs(
    sr_dir,
    hr_dir,
    cases: Optional[Sequence[str]] = None,
    options: MetricOptions = MetricOptions(),
    modcrop_scale: Optional[int] = None,
) -> MetricTable:
    """PSNR/SSIM for every (SR, HR) file pair, matched by filename stem.

    With ``cases``, SR files live in sr_dir/<case>/; without, sr_dir is
    compared flat against hr_dir under the pseudo-case "all".  Pairs whose
    counterpart is missing (or that fail to evaluate) are recorded and
    excluded from the means.  ``modcrop_scale`` crops each HR image to
    dimensions divisible by the scale before comparison, matching how SR
    benchmarks handle non-divisible originals.
    """
    sr_dir, hr_dir = Path(sr_dir), Path(hr_dir)
    hr_files = _files_by_stem(hr_dir)
    if not hr_files:
        raise MetricError(f"{hr_dir}: no reference images found")
    case_dirs = [(c, sr_dir / c) for c in cases] if cases else [(FLAT_CASE, sr_dir)]
    results = []
    missing = []
    for case, cdir in case_dirs:
        sr_files = _files_by_stem(cdir)
        per_image = []
        for stem in sorted(set(hr_files) | set(sr_files)):
            if stem not in sr_files:
                missing.append((case, stem, "no SR file"))
                continue
            if stem not in hr_files:
                missing.append((case, stem, "no HR file"))
                continue
            try:
                sr = decode_image(sr_files[stem])
                hr = decode_image(hr_files[stem])
                if modcrop_scale is not None:
                    hr = modcrop(hr, modcrop_scale)
                per_image.append((stem, psnr(sr, hr, options), ssim(sr, hr, options)))
            except DegraforgeError as exc:
                missing.append((case, stem, str(exc)))
        if per_image:
            psnr_mean = float(np.mean([p for _, p, _ in per_image]))
            ssim_mean = float(np.mean([s for _, _, s in per_image]))
        else:
            psnr_mean, ssim_mean = math.nan, None
        results.append(CaseMetrics(case, len(per_image), psnr_mean, ssim_mean, tuple(per_image)))
    return MetricTable(cases=tuple(results), missing=tuple(missing))
