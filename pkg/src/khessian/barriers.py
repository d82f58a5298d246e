"""The explicit barrier family and its constants.

With the coordinate splitting z = (z_1, z', z''), z' = (z_2..z_k),
z'' = (z_{k+1}..z_n), the family is

    w_eps(z)   = (r^2 + |z_1|^2) (eps^2 + |z'|^2)^alpha,    alpha = 1 - 1/k,
    psi_eps    = M w_eps,
    phi_eps    = 2 M (eps^2 + |z'|^2)^alpha,

together with the lower barrier u_lambda = phi + lambda (|z|^2 - r^2) and the
constants M(r), lambda*, eps0, r0 that make the sign lemmas work.

The closed-form determinant implemented here is

    sigma_k(ddbar w_eps) = alpha^k (r^2+|z_1|^2)^(k-2)
        * [ r^2 (eps^2/alpha + |z'|^2) + (eps^2/alpha) |z_1|^2 ] / (eps^2 + |z'|^2),

whose last numerator term carries |z_1|^2: that is what the determinant of the
assembled Hessian block actually equals (the eigenvalue/assembly oracle in the
test-suite pins it down), e.g. k=2, r=1, eps=1, z_1=2, z_2=1 gives 1.375.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import sampling
from .calculus import Jet, hermitian_eigenvalues, hermitian_part
from .errors import DomainError, InfeasibleRhsError, PreconditionError, SingularityError
from .symmetric import cone_comparison_constant, sigma_all

SUP_COUNT = sampling.SUP_SAMPLE_COUNT


@dataclass(frozen=True)
class PogorelovParams:
    """Parameters of the barrier family; alpha = 1 - 1/k is derived."""

    n: int
    k: int
    r: float
    eps: float
    big_m: float

    def __post_init__(self):
        if self.k < 2:
            raise DomainError(f"barrier family needs k >= 2, got k={self.k}")
        if self.n < self.k:
            raise DomainError(f"splitting needs n >= k, got n={self.n}, k={self.k}")
        if not 0.0 < self.r < 1.0:
            raise DomainError(f"radius must be in (0,1), got {self.r}")
        if self.eps < 0.0:
            raise DomainError(f"eps must be >= 0, got {self.eps}")
        if self.big_m <= 0.0:
            raise DomainError(f"scaling constant M must be > 0, got {self.big_m}")

    @property
    def alpha(self):
        return 1.0 - 1.0 / self.k

    @classmethod
    def standard(cls, n, k, r, eps):
        """Family with the gradient-normalizing scaling M = choose_M(r, k)."""
        return cls(n=n, k=k, r=float(r), eps=float(eps), big_m=choose_M(r, k))


def _to_complex(z, n):
    z = np.asarray(z, dtype=float)
    if z.shape != (2 * n,):
        raise DomainError(f"point must live in R^{2*n}, got shape {z.shape}")
    return z[:n] + 1j * z[n:]


def _split(p, z):
    """(z_1, z', z'') from a real 2n-vector, plus s = r^2+|z_1|^2 and q = eps^2+|z'|^2."""
    zc = _to_complex(z, p.n)
    z1 = zc[0]
    zp = zc[1 : p.k]
    s = p.r**2 + abs(z1) ** 2
    q = p.eps**2 + float(np.sum(np.abs(zp) ** 2))
    return z1, zp, s, q


def pogorelov_w(p, z):
    """Value, real gradient and complex Hessian of w_eps at a point.

    The Hessian is the explicit block matrix in the (z_1, z') variables padded
    with zero rows/columns for z''.  On the singular set {eps = 0, z' = 0} the
    family is only C^0, so evaluation there raises SingularityError.
    """
    z1, zp, s, q = _split(p, z)
    if q <= 0.0:
        raise SingularityError("w_eps has no jet at eps = 0, z' = 0")
    a = p.alpha
    n, k = p.n, p.k
    qa = q**a
    value = s * qa

    grad = np.zeros(2 * n)
    grad[0] = 2.0 * z1.real * qa
    grad[n] = 2.0 * z1.imag * qa
    coef = 2.0 * a * s * q ** (a - 1.0)
    grad[1:k] = coef * zp.real
    grad[n + 1 : n + k] = coef * zp.imag

    hess = np.zeros((n, n), dtype=complex)
    hess[0, 0] = qa
    # mixed z_1/z' block: w_{z_1 conj(z_l)} = alpha conj(z_1) z'_l q^(a-1)
    hess[0, 1:k] = a * np.conj(z1) * zp * q ** (a - 1.0)
    hess[1:k, 0] = np.conj(hess[0, 1:k])
    # z' block: s*a*q^(a-1) * (I + (a-1) conj(z')⊗z' / q)
    block = s * a * q ** (a - 1.0) * (np.eye(k - 1) + (a - 1.0) * np.outer(np.conj(zp), zp) / q)
    hess[1:k, 1:k] = block
    return value, grad, hermitian_part(hess)


def pogorelov_det(p, z):
    """Closed form of sigma_k(ddbar w_eps) (determinant of the (z_1,z') block)."""
    if p.eps <= 0.0:
        raise DomainError("the closed-form determinant needs eps > 0")
    z1, zp, s, q = _split(p, z)
    a = p.alpha
    t2 = float(np.sum(np.abs(zp) ** 2))
    num = p.r**2 * (p.eps**2 / a + t2) + (p.eps**2 / a) * abs(z1) ** 2
    return a**p.k * s ** (p.k - 2) * num / q


@dataclass(frozen=True)
class GammaEigs:
    lambda1: float
    multiplicity: int
    lambda2: float


def gamma_matrix(p, z):
    """The (k-1)x(k-1) Schur-complement matrix whose determinant is sigma_k(ddbar w_eps)."""
    if p.eps <= 0.0:
        raise DomainError("the Schur matrix needs eps > 0")
    z1, zp, s, q = _split(p, z)
    a = p.alpha
    coef = s * a * (a - 1.0) - (a * abs(z1)) ** 2
    return hermitian_part(a * s * np.eye(p.k - 1) + coef * np.outer(np.conj(zp), zp) / q)


def gamma_matrix_eigs(p, z):
    """Eigenvalues of the Schur matrix: lambda1 with multiplicity k-2 and lambda2.

    lambda1 = alpha (r^2 + |z_1|^2);
    lambda2 = alpha^2 [ r^2(eps^2/alpha + |z'|^2) + (eps^2/alpha)|z_1|^2 ] / (eps^2 + |z'|^2);
    and lambda1^(k-2) * lambda2 equals the closed-form determinant.
    """
    if p.eps <= 0.0:
        raise DomainError("the eigenvalue formulas need eps > 0")
    z1, zp, s, q = _split(p, z)
    a = p.alpha
    t2 = float(np.sum(np.abs(zp) ** 2))
    lam1 = a * s
    lam2 = a**2 * (p.r**2 * (p.eps**2 / a + t2) + (p.eps**2 / a) * abs(z1) ** 2) / q
    return GammaEigs(lambda1=lam1, multiplicity=p.k - 2, lambda2=lam2)


def psi_and_phi(p, z):
    """(psi_eps, phi_eps) values; guaranteed psi <= phi on the unit ball."""
    z1, zp, s, q = _split(p, z)
    qa = q**p.alpha
    return p.big_m * s * qa, 2.0 * p.big_m * qa


def choose_M(r, k):
    """The gradient-normalizing scale M = 2^(-alpha-3/2) r^(-2 alpha - 1).

    With this M, sup_{B_r} |D psi_eps| <= 1 and psi_eps <= r/sqrt(2) for eps < r.
    """
    if not 0.0 < r < 1.0:
        raise DomainError(f"radius must be in (0,1), got {r}")
    if k < 2:
        raise DomainError(f"need k >= 2, got {k}")
    a = 1.0 - 1.0 / k
    return 2.0 ** (-a - 1.5) * r ** (-2.0 * a - 1.0)


class PogorelovLower:
    """psi_eps = M w_eps as a jet-callable candidate."""

    def __init__(self, params):
        self.params = params
        self.n = params.n

    def value(self, z):
        z = np.asarray(z, dtype=float)
        if z.ndim == 2:
            return np.array([psi_and_phi(self.params, row)[0] for row in z])
        return psi_and_phi(self.params, z)[0]

    def __call__(self, z):
        val, grad, hess = pogorelov_w(self.params, z)
        m = self.params.big_m
        return Jet(z=z, u=m * val, du=m * grad, hc=m * hess)


class PogorelovUpper:
    """phi_eps = 2M (eps^2+|z'|^2)^alpha as a jet-callable candidate.

    Carries closed-form sups over balls (value, gradient, complex-Hessian
    trace) so the constant-choosing routines need no sampling for it.
    """

    def __init__(self, params):
        self.params = params
        self.n = params.n

    def value(self, z):
        z = np.asarray(z, dtype=float)
        if z.ndim == 2:
            return np.array([psi_and_phi(self.params, row)[1] for row in z])
        return psi_and_phi(self.params, z)[1]

    def __call__(self, z):
        p = self.params
        z1, zp, s, q = _split(p, z)
        if q <= 0.0:
            raise SingularityError("phi_eps has no jet at eps = 0, z' = 0")
        a, n, k, m = p.alpha, p.n, p.k, p.big_m
        value = 2.0 * m * q**a
        grad = np.zeros(2 * n)
        coef = 4.0 * m * a * q ** (a - 1.0)
        grad[1:k] = coef * zp.real
        grad[n + 1 : n + k] = coef * zp.imag
        hess = np.zeros((n, n), dtype=complex)
        hess[1:k, 1:k] = 2.0 * m * a * q ** (a - 1.0) * (
            np.eye(k - 1) + (a - 1.0) * np.outer(np.conj(zp), zp) / q
        )
        return Jet(z=np.asarray(z, dtype=float), u=value, du=grad, hc=hermitian_part(hess))

    # exact sups over B_radius (the radial profiles are monotone for alpha >= 1/2)
    def sup_value(self, radius=1.0):
        p = self.params
        return 2.0 * p.big_m * (p.eps**2 + radius**2) ** p.alpha

    def sup_gradient(self, radius=1.0):
        p = self.params
        return 4.0 * p.big_m * p.alpha * radius * (p.eps**2 + radius**2) ** (p.alpha - 1.0)

    def sup_trace(self, radius=1.0):
        p = self.params
        if p.eps <= 0.0:
            raise SingularityError("trace of ddbar phi_0 is unbounded near z' = 0")
        return 2.0 * p.big_m * p.alpha * (p.k - 1) * p.eps ** (2.0 * p.alpha - 2.0)


class QuadraticCandidate:
    """c + b.x + x^T A x / 2 as a jet-callable with safe closed-form sups."""

    def __init__(self, n, const=0.0, lin=None, quad=None):
        self.n = n
        d = 2 * n
        self.const = float(const)
        self.lin = np.zeros(d) if lin is None else np.asarray(lin, dtype=float)
        self.quad = np.zeros((d, d)) if quad is None else np.asarray(quad, dtype=float)
        if self.lin.shape != (d,) or self.quad.shape != (d, d):
            raise DomainError("linear/quadratic parts have wrong shapes")
        self.quad = 0.5 * (self.quad + self.quad.T)
        self._quad_eigs = hermitian_eigenvalues(self.quad.astype(complex))

    def value(self, z):
        z = np.asarray(z, dtype=float)
        if z.ndim == 2:
            return self.const + z @ self.lin + 0.5 * np.einsum("ij,jk,ik->i", z, self.quad, z)
        return float(self.const + self.lin @ z + 0.5 * z @ self.quad @ z)

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        return Jet(z=z, u=self.value(z), du=self.lin + self.quad @ z, d2u=self.quad)

    def sup_value(self, radius=1.0):
        return self.const + radius * float(np.linalg.norm(self.lin)) \
            + 0.5 * radius**2 * max(self._quad_eigs[-1], 0.0)

    def sup_gradient(self, radius=1.0):
        return float(np.linalg.norm(self.lin)) + radius * max(abs(self._quad_eigs[0]), abs(self._quad_eigs[-1]))

    def sup_trace(self, radius=1.0):
        return max(0.25 * float(np.trace(self.quad)), 0.0)


def affine_candidate(n, const=0.0, lin=None):
    return QuadraticCandidate(n, const=const, lin=lin)


def z1_modulus_candidate(n):
    """phi(z) = |z_1|^2: convex, sigma_k(ddbar phi) = 0 for k >= 2, trace 1."""
    quad = np.zeros((2 * n, 2 * n))
    quad[0, 0] = quad[n, n] = 2.0
    return QuadraticCandidate(n, quad=quad)


@dataclass(frozen=True)
class GradientBoundReport:
    passed: bool
    bound: float
    max_grad_sq: float
    max_ratio: float
    fd_max_err: float


def gradient_bound_check(p, count=10_000):
    """Dense-sample check of |D w_eps|^2 <= 2^(2a+3) r^(4a+2) on B_r, eps < r.

    Also validates the explicit squared-gradient formula against central
    finite differences of the value (step 1e-6, tolerance 1e-6).
    """
    if not p.eps < p.r:
        raise PreconditionError(f"gradient bound requires eps < r, got eps={p.eps}, r={p.r}")
    a = p.alpha
    bound = 2.0 ** (2 * a + 3) * p.r ** (4 * a + 2)
    pts = sampling.ball_points(2 * p.n, count, p.r)
    max_sq = 0.0
    for z in pts:
        z1, zp, s, q = _split(p, z)
        t2 = float(np.sum(np.abs(zp) ** 2))
        g2 = 4.0 * (abs(z1) ** 2 * q ** (2 * a) + a**2 * t2 * s**2 * q ** (2 * (a - 1.0)))
        max_sq = max(max_sq, g2)
    fd_err = 0.0
    step = 1e-6
    for z in pts[:: max(1, count // 64)]:
        _, grad, _ = pogorelov_w(p, z)
        for axis in range(2 * p.n):
            dz = np.zeros(2 * p.n)
            dz[axis] = step
            vp, _, _ = pogorelov_w(p, z + dz)
            vm, _, _ = pogorelov_w(p, z - dz)
            fd_err = max(fd_err, abs((vp - vm) / (2 * step) - grad[axis]))
    passed = max_sq <= bound * (1.0 + 1e-12) and fd_err <= 1e-6
    return GradientBoundReport(passed=passed, bound=bound, max_grad_sq=max_sq,
                               max_ratio=max_sq / bound, fd_max_err=fd_err)


def choose_r(f, k, r0=None, max_level=40):
    """Largest dyadic radius 2^-m meeting the strict sup-f inequality and r < r0.

    The inequality is sup_{(z,p) in B_1 x B_1} f(z, 1, p) < alpha^alpha
    2^(-alpha-3/2) / r.  When r0 is not given it defaults to 1/max(1, sup f),
    the comparison-radius bound with the barrier values capped at 1.
    """
    a = 1.0 - 1.0 / k
    if k < 2:
        raise DomainError(f"need k >= 2, got {k}")
    sup_f = f.sup_zp(1.0, z_radius=1.0, p_radius=1.0)
    if r0 is None:
        r0 = 1.0 / max(1.0, f.sup_zp(1.0, z_radius=1.0, p_radius=4.0))
    coef = a**a * 2.0 ** (-a - 1.5)
    for m in range(1, max_level + 1):
        r = 2.0**-m
        if r < r0 and sup_f < coef / r:
            return r
    raise InfeasibleRhsError(f"no admissible radius above 2^-{max_level} for sup f = {sup_f}")


def lower_barrier(phi, lam, r, z):
    """Jet data of u_lambda = phi + lam (|z|^2 - r^2) at a point."""
    if lam <= 0:
        raise DomainError(f"lambda must be > 0, got {lam}")
    jet = phi(z)
    z = np.asarray(z, dtype=float)
    rho = float(z @ z) - r**2
    n = z.size // 2
    value = jet.u + lam * rho
    grad = jet.du + 2.0 * lam * z
    hess = jet.hc + lam * np.eye(n)
    return value, grad, hess


class LowerBarrierCandidate:
    """u_lambda = phi + lam (|z|^2 - r^2) as a jet-callable."""

    def __init__(self, phi, lam, r):
        self.phi, self.lam, self.r = phi, float(lam), float(r)
        self.n = phi.n

    def value(self, z):
        z = np.asarray(z, dtype=float)
        if z.ndim == 2:
            rho = np.einsum("ij,ij->i", z, z) - self.r**2
            base = self.phi.value(z)
            return base + self.lam * rho
        return lower_barrier(self.phi, self.lam, self.r, z)[0]

    def __call__(self, z):
        value, grad, hess = lower_barrier(self.phi, self.lam, self.r, z)
        return Jet(z=np.asarray(z, dtype=float), u=value, du=grad, hc=hess)


@dataclass(frozen=True)
class BarrierConstants:
    """Constants of the sub/super-solution lemmas for a datum phi and rhs f."""

    lambda_star: float
    L: float
    E: float
    r0: float
    eps0: float = None
    c_star: float = None


def _sampled_sup(fn_values, inflate=True):
    m = float(np.max(fn_values))
    return m * sampling.SUP_INFLATION if (inflate and m > 0) else m


def choose_lambda_star(f, phi, k=None):
    """L, E, lambda* = max(1, E) and r0 = 1/lambda* for the lower barrier.

    L = sup_{B_1}|D phi|, E = sup_{(z,p) in B_1 x B_{L+2}} f(z, sup phi, p).
    Closed-form sups of the candidate are used when it provides them; otherwise
    deterministic Sobol sampling with 5% head-room.  With k given, eps0 and the
    cone comparison constant are filled in as well (they need the cone level).
    """
    if hasattr(phi, "sup_gradient"):
        L = float(phi.sup_gradient(1.0))
    else:
        pts = sampling.ball_points(2 * phi.n, SUP_COUNT, 1.0)
        L = _sampled_sup([np.linalg.norm(phi(z).du) for z in pts])
    if hasattr(phi, "sup_value"):
        sup_phi = float(phi.sup_value(1.0))
    else:
        pts = sampling.ball_points(2 * phi.n, SUP_COUNT, 1.0)
        m = float(np.max([phi(z).u for z in pts]))
        sup_phi = m + 0.05 * (1.0 + abs(m))
    E = f.sup_zp(sup_phi, z_radius=1.0, p_radius=L + 2.0)
    lambda_star = max(1.0, E)
    eps0 = c_star = None
    if k is not None:
        eps0 = choose_eps0(phi, k, f)
        c_star = cone_comparison_constant(phi.n, k)
    return BarrierConstants(lambda_star=lambda_star, L=L, E=E, r0=1.0 / lambda_star,
                            eps0=eps0, c_star=c_star)


def choose_eps0(phi, k, f, sample_count=4096):
    """The regularization threshold eps0 = min(1, c0^k / (k c* Mbar^k)).

    Requires sigma_k(ddbar phi) = 0 on B_1 (checked by sampling at 1e-10) and
    uses Mbar = sup_{B_1} trace(ddbar phi), exact when the candidate provides
    it.  Mbar = 0 yields eps0 = 1 (the degenerate branch: ddbar phi = 0).
    """
    n = phi.n
    pts = sampling.ball_points(2 * n, sample_count, 1.0)
    max_trace = 0.0
    for z in pts:
        hc = phi(z).hc
        lam = hermitian_eigenvalues(hc)
        sk = float(sigma_all(lam, k)[k])
        scale = (1.0 + float(np.max(np.abs(lam)))) ** k
        if abs(sk) > 1e-10 * scale:
            raise PreconditionError(f"sigma_{k}(ddbar phi) = {sk} != 0 at z = {z.tolist()}")
        max_trace = max(max_trace, float(np.sum(lam)))
    if hasattr(phi, "sup_trace"):
        mbar = float(phi.sup_trace(1.0))
    else:
        mbar = max_trace * sampling.SUP_INFLATION
    if mbar <= 0.0:
        return 1.0
    c0 = f.c0
    if c0 <= 0.0:
        raise PreconditionError("rhs must be certified positive before choosing eps0")
    c_star = cone_comparison_constant(n, k)
    return min(1.0, c0**k / (k * c_star * mbar**k))
