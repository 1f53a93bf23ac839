"""How the downsampling convention moves the bicubic baseline.

This library pins antialiased Keys a=-0.5 resampling (the MATLAB-style
convention).  Deep-learning pipelines often downsample with NON-antialiased
bicubic (torch F.interpolate / cv2.INTER_CUBIC), which aliases: there,
pre-blurring can RAISE the bicubic baseline's PSNR because the blur acts as
the missing antialias filter.  With a proper antialiased downsample,
pre-blur always costs PSNR.  When comparing numbers across codebases, check
this convention first.
"""

import numpy as np

from degraforge import PlanarImage, convolve, make_isotropic_gaussian, psnr, upsample_bicubic
from degraforge.metrics import MetricOptions
from degraforge.resample import resize_bicubic


def textured_image(seed=0, size=256):
    rng = np.random.default_rng(seed)
    y, x = np.mgrid[0:size, 0:size].astype(float)
    plane = 0.5 * np.ones((size, size))
    for _ in range(12):  # dense oriented texture, BSD-like busyness
        fx, fy = rng.uniform(5, 60, size=2)
        plane += rng.uniform(0.02, 0.08) * np.sin(2 * np.pi * (fx * x + fy * y) / size + rng.uniform(0, 7))
    return PlanarImage.from_planes(np.clip(np.stack([plane] * 3), 0, 1))


hr = textured_image()
options = MetricOptions(border_crop=4)

print(f"{'downsample':24s} {'bic':>7s} {'b2.0':>7s} {'blur effect':>12s}")
for label, antialias in [("antialiased (this lib)", True), ("non-antialiased", False)]:
    values = {}
    for case, sigma in [("bic", None), ("b2.0", 2.0)]:
        x = convolve(hr, make_isotropic_gaussian(sigma, 21)) if sigma else hr
        lr = resize_bicubic(x, hr.height // 4, hr.width // 4, antialias=antialias)
        values[case] = psnr(upsample_bicubic(lr, 4), hr, options)
    effect = values["b2.0"] - values["bic"]
    print(f"{label:24s} {values['bic']:7.2f} {values['b2.0']:7.2f} {effect:+12.2f}")
