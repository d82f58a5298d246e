"""The C^n ~ R^{2n} identification: Wirtinger calculus and Hermitian eigenvalues.

Real coordinates are ordered (x_1..x_n, y_1..y_n).  With the n x 2n matrix
J = (1/2)(I_n, -i I_n) the complex gradient is J Du and the complex Hessian of
a C^2 function is J D^2u conj(J)^T, entrywise

    H[j,l] = (1/4) * ((u_{x_j x_l} + u_{y_j y_l}) + i (u_{x_j y_l} - u_{y_j x_l})).

Eigenvalues of small dense Hermitian matrices are computed by cyclic complex
Jacobi rotations (no library eigensolver): deterministic, accurate to a small
multiple of machine precision times the Frobenius norm, and trivially
batchable across many matrices at once.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError, StencilError
from .grids import node_or_raise

JACOBI_MAX_SWEEPS = 40
JACOBI_TOL = 1e-14  # target off-diagonal Frobenius norm, relative to ||h||_F


def j_matrix(n):
    """The n x 2n matrix (1/2)(I_n, -i I_n)."""
    if n < 1:
        raise DomainError(f"dimension must be >= 1, got {n}")
    eye = np.eye(n)
    return 0.5 * np.concatenate([eye, -1j * eye], axis=1)


def hermitian_part(a):
    """(a + a^H)/2 with an exactly real diagonal."""
    a = np.asarray(a, dtype=complex)
    out = 0.5 * (a + np.conj(np.swapaxes(a, -1, -2)))
    idx = np.arange(out.shape[-1])
    out[..., idx, idx] = out[..., idx, idx].real
    return out


def complex_hessian(m):
    """Complex Hessian J m conj(J)^T of a real symmetric 2n x 2n matrix m."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2:
        raise DomainError(f"expected a square even-dimension matrix, got shape {m.shape}")
    scale = 1.0 + float(np.max(np.abs(m)))
    if np.max(np.abs(m - m.T)) > 1e-10 * scale:
        raise DomainError("matrix is not symmetric")
    m = 0.5 * (m + m.T)
    n = m.shape[0] // 2
    a, b, c = m[:n, :n], m[:n, n:], m[n:, n:]
    return hermitian_part(0.25 * ((a + c) + 1j * (b - b.T)))


def wirtinger_gradient(du):
    """Complex gradient J du = ((u_{x_j} - i u_{y_j})/2)_j of a real 2n-gradient."""
    du = np.asarray(du, dtype=float)
    if du.ndim != 1 or du.size % 2:
        raise DomainError(f"expected a real 2n-vector, got shape {du.shape}")
    n = du.size // 2
    return 0.5 * (du[:n] - 1j * du[n:])


def hermitian_eigenvalues_batch(h, max_sweeps=JACOBI_MAX_SWEEPS):
    """Ascending eigenvalues of a stack of Hermitian matrices, shape (N,n,n) -> (N,n).

    Cyclic complex Jacobi; each pivot (p,q) is annihilated by the unitary
    G = D R with D = diag(1, e^{-i arg(h_pq)}) in the (p,q) plane and R the
    classical symmetric rotation with the smaller-angle root.
    """
    a = np.array(h, dtype=complex)
    if a.ndim != 3 or a.shape[-1] != a.shape[-2]:
        raise DomainError(f"expected a stack of square matrices, got shape {a.shape}")
    scale = 1.0 + np.max(np.abs(a), axis=(1, 2), initial=0.0)
    dev = np.max(np.abs(a - np.conj(np.swapaxes(a, 1, 2))), axis=(1, 2), initial=0.0)
    if np.any(dev > 1e-8 * scale):
        raise DomainError("input matrices are not Hermitian")
    a = hermitian_part(a)
    n = a.shape[-1]
    if n == 1:
        return a[:, 0, 0].real[:, None].copy()

    fro = np.sqrt(np.sum(np.abs(a) ** 2, axis=(1, 2)))
    thresh = JACOBI_TOL * fro
    eye = np.eye(n, dtype=bool)

    def off_norm(mat):
        return np.sqrt(np.sum(np.abs(mat[:, ~eye]) ** 2, axis=1))

    converged = False
    for _ in range(max_sweeps):
        if np.all(off_norm(a) <= thresh):
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[:, p, q]
                absb = np.abs(apq)
                rot = absb > 0.0
                safe = np.where(rot, absb, 1.0)
                w = np.where(rot, np.conj(apq) / safe, 1.0)
                tau = (a[:, q, q].real - a[:, p, p].real) / (2.0 * safe)
                t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                c = np.where(rot, c, 1.0)
                s = np.where(rot, s, 0.0)
                colp, colq = a[:, :, p].copy(), a[:, :, q].copy()
                a[:, :, p] = c[:, None] * colp - (s * w)[:, None] * colq
                a[:, :, q] = s[:, None] * colp + (c * w)[:, None] * colq
                rowp, rowq = a[:, p, :].copy(), a[:, q, :].copy()
                a[:, p, :] = c[:, None] * rowp - (s * np.conj(w))[:, None] * rowq
                a[:, q, :] = s[:, None] * rowp + (c * np.conj(w))[:, None] * rowq
        a = hermitian_part(a)
    else:
        converged = bool(np.all(off_norm(a) <= thresh))
    if not converged:
        bad = np.flatnonzero(off_norm(a) > thresh)
        raise ConvergenceError(
            f"Jacobi eigensolver did not converge for {bad.size} matrices after {max_sweeps} sweeps",
            diagnostics={"indices": bad.tolist(), "off_norms": off_norm(a)[bad].tolist()},
        )
    idx = np.arange(n)
    return np.sort(a[:, idx, idx].real, axis=1)


def hermitian_eigenvalues(h):
    """Ascending real eigenvalues of one Hermitian matrix (cyclic Jacobi)."""
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2:
        raise DomainError(f"expected a single matrix, got shape {h.shape}")
    return hermitian_eigenvalues_batch(h[None])[0]


def eigenvalues_fast_batch(h):
    """Batch Hermitian eigenvalues with closed forms for n <= 2, Jacobi above.

    The 2x2 closed form is exact and avoids iteration in the solver's hot loop;
    it agrees with the Jacobi route to round-off (property-tested).
    """
    h = np.asarray(h, dtype=complex)
    n = h.shape[-1]
    if n == 1:
        return h[:, 0, 0].real[:, None].copy()
    if n == 2:
        half_tr = 0.5 * (h[:, 0, 0].real + h[:, 1, 1].real)
        gap = np.sqrt((0.5 * (h[:, 0, 0].real - h[:, 1, 1].real)) ** 2 + np.abs(h[:, 0, 1]) ** 2)
        return np.stack([half_tr - gap, half_tr + gap], axis=1)
    return hermitian_eigenvalues_batch(h)


@dataclass
class Jet:
    """Point data (z, u, Du, D^2u, complex Hessian) consumed by the operators.

    `hc` is derived from `d2u` when omitted; when both are supplied they must
    agree (within 1e-12 relative) under the J-reduction.
    """

    z: np.ndarray
    u: float
    du: np.ndarray
    hc: np.ndarray = None
    d2u: np.ndarray = None

    def __post_init__(self):
        self.z = np.asarray(self.z, dtype=float)
        self.du = np.asarray(self.du, dtype=float)
        self.u = float(self.u)
        if self.z.ndim != 1 or self.z.size % 2:
            raise DomainError(f"z must be a real 2n-vector, got shape {self.z.shape}")
        if self.du.shape != self.z.shape:
            raise DomainError("du must have the same shape as z")
        n = self.z.size // 2
        if self.d2u is not None:
            self.d2u = np.asarray(self.d2u, dtype=float)
            derived = complex_hessian(self.d2u)
            if self.hc is None:
                self.hc = derived
            else:
                self.hc = hermitian_part(np.asarray(self.hc, dtype=complex))
                scale = 1.0 + float(np.max(np.abs(derived)))
                if np.max(np.abs(self.hc - derived)) > 1e-12 * scale:
                    raise DomainError("hc is inconsistent with J d2u J^H")
        elif self.hc is None:
            raise DomainError("a jet needs hc or d2u")
        else:
            self.hc = hermitian_part(np.asarray(self.hc, dtype=complex))
        if self.hc.shape != (n, n):
            raise DomainError(f"hc must be {n}x{n}, got {self.hc.shape}")

    @property
    def n(self):
        return self.z.size // 2


def finite_difference_jet(g, node, h=None):
    """Second-order central-difference jet of a grid function at an interior node.

    Mixed second derivatives use the symmetric four-point cross stencil, which
    keeps the assembled real Hessian symmetric by construction.  The node may
    be given as a node id or a lattice tuple; it must have all stencil
    neighbors (StencilError otherwise).
    """
    grid = g.grid
    if h is not None and abs(h - grid.h) > 1e-15 * grid.h:
        raise DomainError(f"requested spacing {h} does not match the grid spacing {grid.h}")
    h = grid.h
    nid = node_or_raise(grid, node)
    d = grid.dim
    m = grid.lattice[nid]
    vals = g.values

    def at(offset):
        nb = grid.ids_at(m + np.asarray(offset, dtype=np.int64))
        if nb < 0:
            raise StencilError(f"node {tuple(m)} lacks the stencil neighbor at offset {tuple(offset)}")
        return vals[nb]

    u0 = vals[nid]
    du = np.empty(d)
    d2 = np.empty((d, d))
    for a in range(d):
        e = np.zeros(d, dtype=np.int64)
        e[a] = 1
        up, um = at(e), at(-e)
        du[a] = (up - um) / (2.0 * h)
        d2[a, a] = (up - 2.0 * u0 + um) / h**2
    for a in range(d):
        for b in range(a + 1, d):
            e = np.zeros(d, dtype=np.int64)
            e[a], e[b] = 1, 1
            pp = at(e)
            e[b] = -1
            pm = at(e)
            e[a], e[b] = -1, 1
            mp = at(e)
            e[b] = -1
            mm = at(e)
            d2[a, b] = d2[b, a] = (pp - pm - mp + mm) / (4.0 * h**2)
    return Jet(z=grid.coords[nid], u=u0, du=du, d2u=d2)
