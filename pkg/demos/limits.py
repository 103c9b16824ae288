"""Two closed-form limits reached through mollification.

A pure semicircular part (``a = 1``) and the Cauchy-type density
``k(t) = 1/(pi |t|)`` both fall outside the smooth setting.  Replacing
``k`` by the mollified ``k_n`` and letting ``n`` grow recovers the
semicircle law and the standard Cauchy law.

    python3 demos/limits.py
"""

import os

import numpy as np

from freesd import build_density, load_config, sigma_distance
from freesd.density import cdf

HERE = os.path.dirname(os.path.abspath(__file__))


def density(cfg, n):
    ctx, shift = cfg.density_setup(n)
    return build_density(ctx, shift=shift)


semi = load_config(os.path.join(HERE, "configs", "semicircle.json"))
grid = np.linspace(-1.8, 1.8, 361)
exact = np.sqrt(4 - grid**2) / (2 * np.pi)
for n in (16, 64):
    c = density(semi, n)
    err = np.max(np.abs(np.interp(grid, c.xi, c.f) - exact))
    print(f"semicircle  n={n:3d}  mass={c.mass:.6f}  sup error on |xi|<=1.8: {err:.2e}")

cauchy = load_config(os.path.join(HERE, "configs", "cauchy.json"))
grid = np.linspace(-3, 3, 301)
exact = 1 / (np.pi * (1 + grid**2))
for n in cauchy.n_list():
    c = density(cauchy, n)
    xi, F = cdf(c)
    med = np.interp(0.5 * F[-1], F, xi)
    err = np.max(np.abs(np.interp(grid + med, c.xi, c.f) - exact))
    sig = sigma_distance(cauchy.mollified(n))
    print(f"cauchy      n={n:3d}  mass={c.mass:.6f}  sup error on |xi|<=3: {err:.2e}  sigma_distance={sig:.4f}")
