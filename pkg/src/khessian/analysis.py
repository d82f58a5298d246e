"""Profiles along coordinate axes, growth-exponent fits, and kink detection.

The distinguished direction of the barrier family is the first z' coordinate
(the singular factor |z'|^(2 alpha) lives there): along its real axis the
solved function is trapped between M r^2 |t|^(2a) and 2 M |t|^(2a).  On the
z_1 real axis both envelopes vanish, so profiles there are flat; the axis is
therefore a parameter (real coordinate index), with 0 = x_1 as the default.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, FitError, InsufficientDataError
from .grids import GridFunction


@dataclass
class AxisProfile:
    """Samples t -> u(t e_axis) along one real coordinate axis through 0."""

    t: np.ndarray
    values: np.ndarray
    origin_value: float
    axis: int
    source: str  # "grid" or "callable"
    spacing: float = None  # grid spacing when source == "grid"
    k: int = None
    r: float = None
    big_m: float = None
    alpha: float = None

    def with_params(self, params):
        """Attach barrier metadata (cone level, radius, scaling) for sandwich checks."""
        self.k, self.r, self.big_m, self.alpha = params.k, params.r, params.big_m, params.alpha
        return self


def axis_profile(source, count=64, t_max=None, axis=0, params=None):
    """Profile of a grid function or a value callable along a real axis.

    Grid sources use exact node values on the axis (no interpolation) and need
    at least 8 usable samples; callables are sampled at 2*count+1 symmetric
    points.  `params` (PogorelovParams) attaches the sandwich metadata.
    """
    if isinstance(source, GridFunction):
        grid = source.grid
        if not 0 <= axis < grid.dim:
            raise DomainError(f"axis {axis} outside 0..{grid.dim - 1}")
        t_max = grid.r if t_max is None else float(t_max)
        kmax = int(np.floor(t_max / grid.h + 1e-9))
        ts, vals = [], []
        for m in range(-kmax, kmax + 1):
            pt = np.zeros(grid.dim, dtype=np.int64)
            pt[axis] = m
            nid = grid.node_id(pt)
            if nid >= 0:
                ts.append(m * grid.h)
                vals.append(source.values[nid])
        if len(ts) < 8:
            raise InsufficientDataError(f"only {len(ts)} axis samples available (need >= 8)")
        origin = grid.node_id(np.zeros(grid.dim, dtype=np.int64))
        if origin < 0:
            raise InsufficientDataError("grid does not contain the origin")
        prof = AxisProfile(t=np.array(ts), values=np.array(vals),
                           origin_value=float(source.values[origin]), axis=axis,
                           source="grid", spacing=grid.h)
    else:
        if t_max is None:
            raise DomainError("t_max is required for callable sources")
        if count < 4:
            raise InsufficientDataError(f"count={count} gives fewer than 8 usable samples")
        dim = 2 * source.n if hasattr(source, "n") else None
        if dim is None:
            raise DomainError("callable sources must expose their dimension via .n")
        ts = np.linspace(-t_max, t_max, 2 * count + 1)
        vals = np.empty(ts.size)
        for i, t in enumerate(ts):
            z = np.zeros(dim)
            z[axis] = t
            vals[i] = _value_of(source, z)
        prof = AxisProfile(t=ts, values=vals, origin_value=float(vals[count]),
                           axis=axis, source="callable")
    if params is not None:
        prof.with_params(params)
    return prof


def _value_of(source, z):
    from .calculus import Jet

    if hasattr(source, "value"):
        return float(source.value(z))
    out = source(z)
    return float(out.u) if isinstance(out, Jet) else float(out)


@dataclass
class HolderFit:
    """Log-log growth fit of a profile over a window away from the origin."""

    exponent_hat: float
    ci_halfwidth: float
    window: tuple
    n_samples: int
    passed_sandwich: bool = None


def holder_fit(profile, t_min=None, t_max=None, lower_slack=0.0, upper_slack=0.0):
    """Least-squares slope of log(u(t) - u(0)) against log|t| over a window.

    The default window is [2h, r/4] for grid profiles (r falling back to
    max|t|).  All increments on the window must be positive (FitError
    otherwise).  When barrier metadata is attached, `passed_sandwich` records
    whether the profile lies in [M r^2 |t|^(2a) - lower_slack,
    2 M |t|^(2a) + upper_slack] on the window.
    """
    span = profile.r if profile.r is not None else float(np.max(np.abs(profile.t)))
    if t_min is None:
        t_min = 2.0 * profile.spacing if profile.spacing else span / 100.0
    if t_max is None:
        t_max = span / 4.0
    if not 0.0 < t_min <= t_max:
        raise DomainError(f"bad fit window [{t_min}, {t_max}]")
    mask = (np.abs(profile.t) >= t_min - 1e-12) & (np.abs(profile.t) <= t_max + 1e-12)
    ts = profile.t[mask]
    vs = profile.values[mask] - profile.origin_value
    if ts.size < 2:
        raise InsufficientDataError(f"window [{t_min}, {t_max}] holds {ts.size} samples (need >= 2)")
    if np.any(vs <= 0.0):
        raise FitError("profile increments must be positive on the fit window")
    x = np.log(np.abs(ts))
    y = np.log(vs)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    dof = ts.size - 2
    if dof > 0:
        se = np.sqrt(np.sum(resid**2) / dof / np.sum((x - np.mean(x)) ** 2))
    else:
        se = 0.0
    passed = None
    if profile.big_m is not None:
        lo = profile.big_m * profile.r**2 * np.abs(ts) ** (2 * profile.alpha)
        hi = 2.0 * profile.big_m * np.abs(ts) ** (2 * profile.alpha)
        full = profile.values[mask]
        passed = bool(np.all(full >= lo - lower_slack) and np.all(full <= hi + upper_slack))
    return HolderFit(exponent_hat=float(slope), ci_halfwidth=float(1.96 * se),
                     window=(float(t_min), float(t_max)), n_samples=int(ts.size),
                     passed_sandwich=passed)


@dataclass
class KinkReport:
    right_slope: float
    left_slope: float
    gap: float
    t_right: float
    t_left: float


def kink_detector(profile):
    """One-sided difference quotients at the smallest |t| on each side of 0.

    gap = right_slope - left_slope: ~2c for a c|t| crease, O(window) for C^2
    profiles.  Requires samples on both sides of the origin.
    """
    pos = profile.t > 1e-15
    neg = profile.t < -1e-15
    if not (np.any(pos) and np.any(neg)):
        raise InsufficientDataError("kink detection needs samples on both sides of 0")
    i_r = np.flatnonzero(pos)[np.argmin(profile.t[pos])]
    i_l = np.flatnonzero(neg)[np.argmax(profile.t[neg])]
    t_r = float(profile.t[i_r])
    t_l = float(-profile.t[i_l])
    right = (profile.values[i_r] - profile.origin_value) / t_r
    left = (profile.origin_value - profile.values[i_l]) / t_l
    return KinkReport(right_slope=float(right), left_slope=float(left),
                      gap=float(right - left), t_right=t_r, t_left=t_l)
