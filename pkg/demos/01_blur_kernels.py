"""Tour of the four blur-kernel families.

Builds one kernel of each type, prints their footprints and a few summary
statistics, and dumps the isotropic kernel in the plain-text exchange
format.  Outputs land in demos/output/.
"""

from pathlib import Path

import numpy as np

from degraforge import (
    discrete_variance,
    dump_kernel,
    make_anisotropic_gaussian,
    make_generalized_gaussian,
    make_isotropic_gaussian,
    make_plateau,
)

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)


def describe(label, kernel):
    w = kernel.weights
    print(f"{label:28s} sum={w.sum():.9f}  center={w[kernel.size // 2, kernel.size // 2]:.5f}  "
          f"variance={discrete_variance(kernel):7.3f}")


print("kernel gallery (21x21 support)\n")
iso = make_isotropic_gaussian(2.0, 21)
describe("isotropic sigma=2.0", iso)
describe("anisotropic 2.5/0.8 th=0.6", make_anisotropic_gaussian(2.5, 0.8, 0.6, 21))
describe("generalized beta=4 (flat)", make_generalized_gaussian(2.0, 2.0, 0.0, 4.0, 21))
describe("plateau beta=2", make_plateau(2.0, 2.0, 0.0, 2.0, 21))

# sigma sweep: the discrete variance grows monotonically, which is what makes
# blur strength a well-ordered degradation axis
print("\nsigma -> variance sweep (isotropic):")
for sigma in np.linspace(0.5, 3.0, 6):
    v = discrete_variance(make_isotropic_gaussian(float(sigma), 21))
    print(f"  sigma={sigma:4.1f}  variance={v:7.3f}")

dump_path = OUT / "isotropic_sigma2.txt"
dump_path.write_text(dump_kernel(iso))
print(f"\nwrote {dump_path} ({iso.size} rows of {iso.size} weights)")
