"""Deterministic low-discrepancy sampling used for sup-estimation and checks.

All samplers are seed-free and reproducible: the same call always returns the
same points (fixed unscrambled Sobol sequence).
"""

import numpy as np
from scipy.stats import qmc
from scipy.special import ndtri

# Default sample size for "sup over a ball" estimates.
SUP_SAMPLE_COUNT = 2**14
# Multiplicative head-room applied to sampled (non-closed-form) sup estimates.
SUP_INFLATION = 1.05


def sobol_unit(dim, count):
    """First `count` unscrambled Sobol points in [0,1)^dim (all-zeros point skipped)."""
    eng = qmc.Sobol(d=dim, scramble=False)
    eng.fast_forward(1)
    return eng.random(count)


def ball_points(dim, count, radius=1.0):
    """Deterministic low-discrepancy points filling the ball |x| <= radius in R^dim.

    Directions come from inverse-normal-transformed Sobol coordinates, radii from
    an extra Sobol coordinate with the volume-uniform power map.
    """
    u = sobol_unit(dim + 1, count)
    # clip away 0/1 endpoints before the normal inverse CDF
    g = ndtri(np.clip(u[:, :dim], 1e-12, 1.0 - 1e-12))
    norms = np.linalg.norm(g, axis=1)
    degenerate = norms < 1e-12
    if np.any(degenerate):
        g[degenerate] = 0.0
        g[degenerate, 0] = 1.0
        norms = np.linalg.norm(g, axis=1)
    rad = radius * np.clip(u[:, dim], 0.0, 1.0) ** (1.0 / dim)
    return g * (rad / norms)[:, None]


def sphere_points(dim, count, radius=1.0):
    """Deterministic points on the sphere |x| = radius in R^dim."""
    g = ndtri(np.clip(sobol_unit(dim, count), 1e-12, 1.0 - 1e-12))
    norms = np.linalg.norm(g, axis=1)
    degenerate = norms < 1e-12
    if np.any(degenerate):
        g[degenerate] = 0.0
        g[degenerate, 0] = 1.0
        norms = np.linalg.norm(g, axis=1)
    return g * (radius / norms)[:, None]
