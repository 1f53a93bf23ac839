"""degraforge: deterministic gated image degradation for blind-SR benchmarking.

Generates low-resolution datasets under classical, practical and gated
degradation regimes, materializes the Practical8 / classical-5 evaluation
sets, and computes the PSNR/SSIM tables and upper-bound gap analyses used
to evaluate blind super-resolution methods.
"""

__version__ = "0.1.0"

from .bench import BenchCase, classical5_cases, generate_benchmark, practical8_cases
from .core import (
    BlurParams,
    NoiseParams,
    PlanarImage,
    SampledRecipe,
    SeedTrace,
    StreamKey,
    clamp01,
    derive_stream,
    read_manifest,
    write_manifest,
)
from .degrade import (
    GateSpec,
    NoiseSpec,
    PipelineConfig,
    add_gaussian_noise,
    add_poisson_noise,
    apply_gate,
    convolve,
    jpeg_compress,
    run_gated,
    run_recipe,
    sample_recipe,
)
from .gap import GapTable, compute_gap, render_gap_csv, render_gap_markdown
from .io import decode_image, encode_png, list_images, save_npy
from .kernels import (
    BlurKernel,
    discrete_variance,
    dump_kernel,
    make_anisotropic_gaussian,
    make_generalized_gaussian,
    make_isotropic_gaussian,
    make_kernel,
    make_plateau,
    parse_kernel_dump,
)
from .metrics import MetricOptions, MetricTable, evaluate_pairs, modcrop, psnr, ssim
from .resample import downsample_bicubic, resize_bicubic, upsample_bicubic
