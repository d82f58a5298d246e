"""Point evaluation of the complex k-Hessian operator and its regularization.

    F(z, u, Du, H)      = -sigma_k(H)^(1/k) + f(z, u, Du)
    F_eps(z, u, Du, H)  = -sigma_k(H + eps*trace(H)*I)^(1/k) + f(z, u, Du)

Both evaluators return None (the "inadmissible" flag) when the relevant matrix
spectrum leaves the closed cone: a classical candidate that is not k-p.s.h. at
the point cannot be tested as a sub-solution there, and is vacuously acceptable
on the super-solution side.  Inadmissibility is deliberately not an error; the
solver and the sign checker branch on it.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import sampling
from .calculus import hermitian_eigenvalues, hermitian_part
from .errors import CertificationError, DomainError, PreconditionError
from .symmetric import in_cone, sigma_all

_FD_STEP = 1e-5  # derivative-estimation step for custom right-hand sides


@dataclass(frozen=True)
class RhsSpec:
    """A right-hand side f(z, u, p) with certified structural constants.

    Catalogued kinds carry exact constants by construction; custom callables
    get empirical, clearly non-rigorous certificates from deterministic
    sampling (see :func:`certify_rhs`).

    Attributes
    ----------
    c0 : float
        Lower bound for f on its certified domain (positivity requires c0 > 0).
    deriv_bound : float
        Bound for |d_z f|, |f_u|, |f_p|.
    monotone_u : bool
        Whether f is non-decreasing in u (comparison-principle hypothesis).
    rigorous : bool
        False when the constants come from sampling rather than construction.
    """

    kind: str
    params: tuple = ()
    func: object = None
    n: int = None
    u_range: tuple = (-1.0, 1.0)
    c0: float = 0.0
    deriv_bound: float = 0.0
    monotone_u: bool = True
    rigorous: bool = True

    @classmethod
    def constant(cls, c):
        c = float(c)
        return cls(kind="constant", params=(c,), c0=c, deriv_bound=0.0)

    @classmethod
    def affine(cls, a, b, u_range=(-1.0, 1.0)):
        """f = a + b*u with b >= 0, certified on the stated u interval.

        A positive global infimum over all of R does not exist for b > 0, so
        the certificate is exact on `u_range` only: c0 = a + b*min(u_range).
        """
        a, b = float(a), float(b)
        if b < 0:
            raise DomainError("affine rhs requires b >= 0 (monotone catalog)")
        lo, hi = map(float, u_range)
        if not lo < hi:
            raise DomainError("u_range must be an increasing interval")
        return cls(kind="affine_u", params=(a, b), u_range=(lo, hi), c0=a + b * lo, deriv_bound=b)

    @classmethod
    def bounded_monotone(cls, a, b):
        """f = a + b*(1/2 + arctan(u)/pi) with a > 0, b >= 0; c0 = a, |f_u| <= b/pi."""
        a, b = float(a), float(b)
        if b < 0:
            raise DomainError("bounded_monotone rhs requires b >= 0")
        return cls(kind="bounded_monotone", params=(a, b), c0=a, deriv_bound=b / math.pi)

    @classmethod
    def custom(cls, func, n, u_radius=2.0, p_radius=4.0, count=2048):
        """Wrap a callable f(z, u, p); constants estimated by deterministic sampling."""
        c0, bound, monotone = _sample_certificate(func, n, u_radius, p_radius, count)
        return cls(kind="custom", func=func, n=n, u_range=(-u_radius, u_radius),
                   c0=c0, deriv_bound=bound, monotone_u=monotone, rigorous=False)

    @property
    def is_catalog(self):
        return self.kind != "custom"

    def value(self, z, u, p):
        """Evaluate f; u may be a scalar or an array (z, p broadcast alongside)."""
        u = np.asarray(u, dtype=float)
        if self.kind == "constant":
            return np.broadcast_to(self.params[0], u.shape).copy() if u.ndim else float(self.params[0])
        if self.kind == "affine_u":
            a, b = self.params
            return a + b * u
        if self.kind == "bounded_monotone":
            a, b = self.params
            return a + b * (0.5 + np.arctan(u) / math.pi)
        return self._custom_value(z, u, p)

    def _custom_value(self, z, u, p):
        u = np.asarray(u, dtype=float)
        if u.ndim == 0:
            return float(self.func(np.asarray(z, dtype=float), float(u), np.asarray(p, dtype=float)))
        z = np.asarray(z, dtype=float)
        p = np.asarray(p, dtype=float)
        return np.array([float(self.func(z[i], float(u[i]), p[i])) for i in range(u.size)])

    def d_u(self, z, u, p):
        """Exact f_u for catalog kinds; central differences for custom."""
        u = np.asarray(u, dtype=float)
        if self.kind == "constant":
            return np.zeros(u.shape) if u.ndim else 0.0
        if self.kind == "affine_u":
            return np.full(u.shape, self.params[1]) if u.ndim else self.params[1]
        if self.kind == "bounded_monotone":
            return self.params[1] / (math.pi * (1.0 + u * u))
        up = self.value(z, u + _FD_STEP, p)
        um = self.value(z, u - _FD_STEP, p)
        return (up - um) / (2 * _FD_STEP)

    def d_p(self, z, u, p):
        """Gradient of f in p; identically zero for the catalog."""
        p = np.asarray(p, dtype=float)
        if self.kind != "custom":
            return np.zeros(p.shape)
        single = p.ndim == 1
        pts = p[None] if single else p
        zs = np.asarray(z, dtype=float)
        zs = zs[None] if single else zs
        us = np.atleast_1d(np.asarray(u, dtype=float))
        out = np.zeros_like(pts)
        for a in range(pts.shape[1]):
            dp = np.zeros(pts.shape[1])
            dp[a] = _FD_STEP
            for i in range(pts.shape[0]):
                out[i, a] = (self.func(zs[i], us[i], pts[i] + dp) - self.func(zs[i], us[i], pts[i] - dp)) / (2 * _FD_STEP)
        return out[0] if single else out

    def sup_zp(self, u, z_radius=1.0, p_radius=1.0, count=2048):
        """sup over (z, p) in B_{z_radius} x B_{p_radius} of f(z, u, p), u fixed.

        Exact for the catalog (f is then independent of z and p); sampled with
        5% head-room for custom callables.
        """
        if self.is_catalog:
            return float(self.value(None, u, None))
        if self.n is None:
            raise DomainError("custom rhs needs its dimension n to sample sups")
        zs = sampling.ball_points(2 * self.n, count, z_radius)
        ps = sampling.ball_points(2 * self.n, count, p_radius)
        vals = self.value(zs, np.full(count, float(u)), ps)
        return float(np.max(vals)) * sampling.SUP_INFLATION

    def describe(self):
        return {"kind": self.kind, "params": list(self.params), "c0": self.c0,
                "deriv_bound": self.deriv_bound, "monotone_u": self.monotone_u,
                "rigorous": self.rigorous}


def _sample_certificate(func, n, u_radius, p_radius, count):
    zs = sampling.ball_points(2 * n, count, 1.0)
    ps = sampling.ball_points(2 * n, count, p_radius)
    us = np.linspace(-u_radius, u_radius, 9)
    vmin, dmax, fumin = np.inf, 0.0, np.inf
    for u in us:
        for i in range(0, count, max(1, count // 256)):
            z, p = zs[i], ps[i]
            v = float(func(z, u, p))
            vmin = min(vmin, v)
            fu = (func(z, u + _FD_STEP, p) - func(z, u - _FD_STEP, p)) / (2 * _FD_STEP)
            fumin = min(fumin, fu)
            dmax = max(dmax, abs(fu))
            for a in range(2 * n):
                dz = np.zeros(2 * n)
                dz[a] = _FD_STEP
                dmax = max(dmax, abs(func(z + dz, u, p) - func(z - dz, u, p)) / (2 * _FD_STEP))
                dmax = max(dmax, abs(func(z, u, p + dz) - func(z, u, p - dz)) / (2 * _FD_STEP))
    return vmin, dmax * sampling.SUP_INFLATION, bool(fumin >= -1e-8)


@dataclass(frozen=True)
class CertificationReport:
    kind: str
    c0: float
    deriv_bound: float
    monotone_u: bool
    rigorous: bool


def certify_rhs(f):
    """Validate the structural hypotheses of a right-hand side.

    Returns the (c0, C, monotone) certificate; raises CertificationError when
    positivity fails (c0 <= 0) or the monotonicity hypothesis does not hold.
    """
    if f.c0 <= 0:
        raise CertificationError(f"rhs {f.kind} fails positivity: inf f = {f.c0} <= 0")
    if not f.monotone_u:
        raise CertificationError(f"rhs {f.kind} is not monotone in u")
    return CertificationReport(kind=f.kind, c0=f.c0, deriv_bound=f.deriv_bound,
                               monotone_u=f.monotone_u, rigorous=f.rigorous)


def sigma_root_shifted(k, lam, shift=0.0):
    """sigma_k^(1/k) of a spectrum shifted by a multiple of the all-ones vector.

    Returns None when the shifted spectrum is outside the closed cone Gamma_k.
    """
    shifted = np.asarray(lam, dtype=float) + shift
    if not in_cone(k, shifted, "closed"):
        return None
    return max(float(sigma_all(shifted, k)[k]), 0.0) ** (1.0 / k)


def eval_F(k, f, jet):
    """F at a jet, or None when the complex Hessian is not in closed Gamma_k."""
    lam = hermitian_eigenvalues(jet.hc)
    root = sigma_root_shifted(k, lam)
    if root is None:
        return None
    return -root + float(f.value(jet.z, jet.u, jet.du))


def eval_F_eps(k, eps, f, jet):
    """F_eps at a jet; admissibility is tested on H + eps*trace(H)*I."""
    if eps < 0:
        raise DomainError(f"eps must be >= 0, got {eps}")
    lam = hermitian_eigenvalues(jet.hc)
    root = sigma_root_shifted(k, lam, eps * float(np.sum(lam)))
    if root is None:
        return None
    return -root + float(f.value(jet.z, jet.u, jet.du))


def ellipticity_constants(k, n, eps):
    """(lambda_eps, Lambda_eps) = (eps, 1+eps) * binomial(n,k)^(1/k).

    The upper constant uses the gradient-sum identity: the sum over j of the
    partials of sigma_k^(1/k) at the identity equals binomial(n,k)^(1/k)
    because n*binomial(n-1,k-1) = k*binomial(n,k).
    """
    if not 1 <= k <= n:
        raise DomainError(f"need 1 <= k <= n, got k={k}, n={n}")
    if eps <= 0:
        raise DomainError(f"eps must be > 0, got {eps}")
    base = math.comb(n, k) ** (1.0 / k)
    return eps * base, (1.0 + eps) * base


@dataclass(frozen=True)
class EllipticityReport:
    lhs: float
    mid: float
    rhs: float
    passed: bool


def check_ellipticity(k, eps, m, nn):
    """Check lambda_eps*tr(N) <= F_eps(M) - F_eps(M+N) <= Lambda_eps*tr(N).

    Preconditions (distinct error kinds): N must be Hermitian positive
    definite, and M + eps*trace(M)*I must have spectrum in the open cone.
    """
    m = hermitian_part(m)
    nn = hermitian_part(nn)
    n = m.shape[0]
    eig_n = hermitian_eigenvalues(nn)
    if eig_n[0] <= 0:
        raise PreconditionError("N is not positive definite")
    lam_m = hermitian_eigenvalues(m)
    shift = eps * float(np.sum(lam_m))
    if not in_cone(k, lam_m + shift, "strict"):
        raise PreconditionError("M + eps*trace(M)*I is not in the open cone Gamma_k")
    lam_eps, big_lam_eps = ellipticity_constants(k, n, eps)
    tr_n = float(np.sum(eig_n))
    root_m = sigma_root_shifted(k, lam_m, shift)
    lam_sum = hermitian_eigenvalues(m + nn)
    root_mn = sigma_root_shifted(k, lam_sum, eps * float(np.sum(lam_sum)))
    mid = root_mn - root_m
    lhs, rhs = lam_eps * tr_n, big_lam_eps * tr_n
    tol = 1e-9 * (1.0 + abs(rhs))
    return EllipticityReport(lhs=lhs, mid=mid, rhs=rhs, passed=bool(lhs - tol <= mid <= rhs + tol))


@dataclass
class SignCheckResult:
    """Verdict of a classical sub/super-solution sign check with witnesses."""

    side: str
    passed: bool
    count: int
    worst: float = None  # most violating F value among admissible points
    witnesses: list = field(default_factory=list)  # up to 10 failing (z, F) pairs

    def __bool__(self):
        return self.passed


def classical_sign_check(k, f, candidate, sample, side, eps=0.0, tol=1e-9):
    """Test the classical sub/super-solution sign of a C^2 candidate at points.

    `candidate` maps a point z in R^{2n} to its exact Jet.  Sub side requires
    admissibility and F <= tol at every point; super side accepts inadmissible
    points outright and requires F >= -tol elsewhere.  eps > 0 switches to the
    regularized operator.
    """
    if side not in ("sub", "super"):
        raise DomainError(f"side must be 'sub' or 'super', got {side!r}")
    witnesses = []
    worst = None
    for z in np.asarray(sample, dtype=float):
        jet = candidate(z)
        val = eval_F_eps(k, eps, f, jet) if eps > 0 else eval_F(k, f, jet)
        if side == "sub":
            ok = val is not None and val <= tol
        else:
            ok = val is None or val >= -tol
        if val is not None:
            if worst is None:
                worst = val
            worst = max(worst, val) if side == "sub" else min(worst, val)
        if not ok and len(witnesses) < 10:
            witnesses.append((z.copy(), val))
    return SignCheckResult(side=side, passed=not witnesses, count=len(sample),
                           worst=worst, witnesses=witnesses)
