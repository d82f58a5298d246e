"""Elementary symmetric polynomials of eigenvalue vectors and the cones Gamma_k.

A spectrum is any 1-d array-like of finite reals.  sigma_j is computed with the
incremental product recurrence

    e_j(l_1..l_m) = e_j(l_1..l_{m-1}) + l_m * e_{j-1}(l_1..l_{m-1}),

which is O(n*j) and numerically benign at the small dense sizes this package
targets (n <= 16).
"""

import math
import warnings

import numpy as np

from .errors import DomainError, InadmissibleSpectrumError

# Relative tolerance for closed-cone membership; scaled by (1 + |lam|_inf)^j.
CONE_TOL = 1e-10


def _as_spectrum(lam):
    arr = np.asarray(lam, dtype=float)
    if arr.ndim != 1 or arr.size < 1:
        raise DomainError(f"spectrum must be a non-empty 1-d vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError("spectrum entries must be finite")
    return arr


def _check_level(k, n):
    if not 1 <= k <= n:
        raise DomainError(f"cone level k={k} outside 1..{n}")


def sigma_all(lam, jmax=None):
    """All elementary symmetric values (sigma_0, ..., sigma_jmax) of a spectrum."""
    lam = _as_spectrum(lam)
    n = lam.size
    jmax = n if jmax is None else jmax
    e = np.zeros(jmax + 1)
    e[0] = 1.0
    for m in range(n):
        top = min(m + 1, jmax)
        e[1 : top + 1] += lam[m] * e[0:top]
    return e


def sigma_all_batch(lams, jmax):
    """Row-wise sigma_0..sigma_jmax for a stack of spectra of shape (N, n)."""
    lams = np.asarray(lams, dtype=float)
    count, n = lams.shape
    e = np.zeros((count, jmax + 1))
    e[:, 0] = 1.0
    for m in range(n):
        top = min(m + 1, jmax)
        e[:, 1 : top + 1] += lams[:, m, None] * e[:, 0:top]
    return e


def sigma(j, lam):
    """j-th elementary symmetric function of the spectrum (sigma_0 = 1)."""
    lam = _as_spectrum(lam)
    if not 0 <= j <= lam.size:
        raise DomainError(f"sigma index j={j} outside 0..{lam.size}")
    return float(sigma_all(lam, j)[j])


def in_cone(k, lam, mode="strict"):
    """Whether the spectrum lies in Gamma_k (strict) or its closure (closed).

    Closed mode allows sigma_j >= -CONE_TOL * (1 + |lam|_inf)^j so that
    exactly-boundary spectra survive floating-point round-off.
    """
    lam = _as_spectrum(lam)
    _check_level(k, lam.size)
    e = sigma_all(lam, k)
    if mode == "strict":
        return bool(np.all(e[1 : k + 1] > 0.0))
    if mode == "closed":
        scale = 1.0 + float(np.max(np.abs(lam)))
        bounds = -CONE_TOL * scale ** np.arange(1, k + 1)
        return bool(np.all(e[1 : k + 1] >= bounds))
    raise DomainError(f"unknown cone mode {mode!r}")


def in_cone_batch(k, lams, mode="closed"):
    """Vectorized cone membership for a stack of spectra of shape (N, n)."""
    lams = np.asarray(lams, dtype=float)
    _check_level(k, lams.shape[1])
    e = sigma_all_batch(lams, k)
    if mode == "strict":
        return np.all(e[:, 1 : k + 1] > 0.0, axis=1)
    scale = 1.0 + np.max(np.abs(lams), axis=1)
    bounds = -CONE_TOL * scale[:, None] ** np.arange(1, k + 1)
    return np.all(e[:, 1 : k + 1] >= bounds, axis=1)


def sigma_root(k, lam):
    """sigma_k(lam)^(1/k); requires lam in the closed cone Gamma_k.

    Homogeneous of degree one.  Raises InadmissibleSpectrumError outside the
    closed cone (distinct from DomainError for bad indices).
    """
    lam = _as_spectrum(lam)
    _check_level(k, lam.size)
    if not in_cone(k, lam, "closed"):
        raise InadmissibleSpectrumError(f"spectrum {lam.tolist()} is not in the closed cone Gamma_{k}")
    sk = sigma(k, lam)
    return max(sk, 0.0) ** (1.0 / k)


def sigma_gradient(k, lam):
    """Gradient of sigma_k: component j is sigma_{k-1} of the spectrum with entry j removed."""
    lam = _as_spectrum(lam)
    n = lam.size
    _check_level(k, n)
    grad = np.empty(n)
    for j in range(n):
        grad[j] = sigma_all(np.delete(lam, j), k - 1)[k - 1]
    return grad


def maclaurin_constants(n):
    """Normalization constants c_j = binomial(n,j)^(-1/j), j = 1..n."""
    return np.array([math.comb(n, j) ** (-1.0 / j) for j in range(1, n + 1)])


def maclaurin_chain(lam):
    """The chain (c_j * sigma_j^(1/j))_{j=1..n}, non-increasing on the closed cone Gamma_n.

    Outside the closed positive cone the values are still returned (with signed
    roots) but the monotonicity guarantee is void; a warning flags that case.
    """
    lam = _as_spectrum(lam)
    n = lam.size
    e = sigma_all(lam)
    scale = 1.0 + float(np.max(np.abs(lam)))
    if np.any(e[1:] < -CONE_TOL * scale ** np.arange(1, n + 1)):
        warnings.warn("spectrum outside closed Gamma_n: Maclaurin chain not guaranteed monotone", stacklevel=2)
    cs = maclaurin_constants(n)
    out = np.empty(n)
    for j in range(1, n + 1):
        s = e[j]
        out[j - 1] = cs[j - 1] * math.copysign(abs(s) ** (1.0 / j), s)
    return out


def cone_comparison_constant(n, k):
    """max{1, c_1/c_{k-1}, ..., c_1/c_2} with the Maclaurin normalization.

    The set of ratios is empty for k = 2; the constant is then 1, which is what
    the plain terms of the sigma_k(A + tI) expansion require.
    """
    _check_level(k, n)
    cs = maclaurin_constants(n)
    ratios = [cs[0] / cs[j - 1] for j in range(2, k)]
    return max([1.0] + ratios)
