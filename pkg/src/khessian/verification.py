"""Deterministic verification suites for the closed-form identities.

Each suite returns a VerificationResult; the registry order is fixed, so CLI
output is byte-stable.  Heavy matrix batches go through the vectorized Jacobi
eigensolver; randomized checks use fixed seeds.
"""

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import sampling
from .barriers import (LowerBarrierCandidate, PogorelovLower, PogorelovParams,
                       PogorelovUpper, affine_candidate, choose_eps0,
                       choose_lambda_star, choose_M, choose_r, gamma_matrix,
                       gamma_matrix_eigs, gradient_bound_check, pogorelov_det,
                       pogorelov_w, psi_and_phi, z1_modulus_candidate)
from .calculus import (Jet, complex_hessian, finite_difference_jet,
                       hermitian_eigenvalues, hermitian_eigenvalues_batch,
                       j_matrix, wirtinger_gradient)
from .errors import CertificationError, StencilError
from .grids import GridFunction, build_grid
from .operators import (RhsSpec, certify_rhs, classical_sign_check,
                        ellipticity_constants, eval_F, eval_F_eps)
from .symmetric import (in_cone, maclaurin_chain, sigma, sigma_all_batch,
                        sigma_gradient, sigma_root)
from .analysis import AxisProfile, axis_profile, holder_fit, kink_detector


@dataclass
class VerificationResult:
    name: str
    passed: bool
    detail: str
    seconds: float


def _result(name, passed, detail, t0):
    return VerificationResult(name=name, passed=bool(passed), detail=detail,
                              seconds=time.perf_counter() - t0)


def _rel_err(got, want):
    want = np.asarray(want, dtype=float)
    return np.max(np.abs(got - want) / np.maximum(np.abs(want), 1e-300))


# ----------------------------------------------------------------- suites

def sigma_identities():
    t0 = time.perf_counter()
    checks = []
    checks.append(abs(sigma(2, (1, 2, 3)) - 11.0) < 1e-14)
    n = 7
    checks.append(abs(sigma(3, np.ones(n)) - math.comb(n, 3)) < 1e-12)
    rng = np.random.default_rng(101)
    worst = 0.0
    for _ in range(200):
        lam = rng.uniform(-2, 2, size=6)
        brute = sum(lam[i] * lam[j] * lam[k] for i, j, k in combinations(range(6), 3))
        worst = max(worst, abs(sigma(3, lam) - brute) / max(1.0, abs(brute)))
    checks.append(worst < 1e-12)
    # permutation invariance and homogeneity
    for _ in range(100):
        lam = rng.uniform(-3, 3, size=5)
        perm = rng.permutation(lam)
        checks.append(abs(sigma(3, lam) - sigma(3, perm)) < 1e-12 * (1 + abs(sigma(3, lam))))
        t = rng.uniform(0.1, 4.0)
        checks.append(abs(sigma(3, t * lam) - t**3 * sigma(3, lam)) < 1e-12 * (1 + abs(t**3 * sigma(3, lam))))
    # cone nesting on 1000 random spectra
    nested = 0
    for _ in range(1000):
        lam = rng.uniform(-1, 3, size=5)
        for k in range(1, 5):
            if in_cone(k + 1, lam, "strict") and not in_cone(k, lam, "strict"):
                nested += 1
    checks.append(nested == 0)
    checks.append(in_cone(1, (2, -1), "strict") and not in_cone(2, (2, -1), "strict"))
    # gradient against central finite differences
    worst_g = 0.0
    for _ in range(50):
        lam = rng.uniform(-1.5, 1.5, size=5)
        grad = sigma_gradient(3, lam)
        for j in range(5):
            step = np.zeros(5)
            step[j] = 1e-6
            fd = (sigma(3, lam + step) - sigma(3, lam - step)) / 2e-6
            worst_g = max(worst_g, abs(grad[j] - fd))
    checks.append(worst_g < 1e-6)
    checks.append(np.allclose(sigma_gradient(2, (1, 2, 3)), (5, 4, 3)))
    # Maclaurin chain monotone on the positive cone
    mono_bad = 0
    for _ in range(1000):
        lam = rng.uniform(0.0, 3.0, size=5)
        chain = maclaurin_chain(lam)
        if np.any(np.diff(chain) > 1e-12):
            mono_bad += 1
    checks.append(mono_bad == 0)
    checks.append(np.allclose(maclaurin_chain(np.ones(4)), 1.0))
    checks.append(_rel_err(maclaurin_chain((2, 1, 0))[:2], [1.0, math.sqrt(2.0 / 3.0)]) < 1e-12)
    # concavity of sigma_root on Gamma_k midpoints
    conc_bad = 0
    for _ in range(500):
        lam = rng.uniform(0.05, 3.0, size=5)
        mu = rng.uniform(0.05, 3.0, size=5)
        mid = sigma_root(3, 0.5 * (lam + mu))
        if mid < 0.5 * (sigma_root(3, lam) + sigma_root(3, mu)) - 1e-10:
            conc_bad += 1
    checks.append(conc_bad == 0)
    bad = len(checks) - sum(checks)
    return _result("sigma_identities", bad == 0,
                   f"{len(checks)} checks, {bad} failures; max enum err {worst:.1e}, max grad err {worst_g:.1e}", t0)


def complex_calculus_identities():
    t0 = time.perf_counter()
    checks = []
    j1 = j_matrix(1)
    checks.append(np.allclose(j1, [[0.5, -0.5j]]))
    for n in (1, 2, 4):
        jm = j_matrix(n)
        checks.append(np.allclose(jm @ np.conj(jm).T, 0.5 * np.eye(n), atol=1e-15))
    rng = np.random.default_rng(202)
    worst_tr = 0.0
    for n in (1, 2, 3):
        for _ in range(60):
            a = rng.standard_normal((2 * n, 2 * n))
            m = 0.5 * (a + a.T)
            hc = complex_hessian(m)
            jm = j_matrix(n)
            checks.append(np.max(np.abs(hc - jm @ m @ np.conj(jm).T)) < 1e-13 * (1 + np.max(np.abs(m))))
            worst_tr = max(worst_tr, abs(np.trace(hc).real - 0.25 * np.trace(m)))
    checks.append(worst_tr < 1e-12)
    checks.append(np.allclose(complex_hessian(2 * np.eye(4)), np.eye(2)))
    checks.append(np.allclose(complex_hessian(np.diag([2.0, 0.0])), [[0.5]]))
    du = np.zeros(4)
    du[0] = 1.0
    checks.append(np.allclose(wirtinger_gradient(du), [0.5, 0.0]))
    du = np.zeros(4)
    du[2] = 1.0
    checks.append(np.allclose(wirtinger_gradient(du), [-0.5j, 0.0]))
    # finite-difference jets are exact on quadratics
    grid = build_grid(2, 0.5, 0.0625)
    gf = GridFunction.from_callable(grid, lambda z: np.einsum("ij,ij->i", z, z) - 0.25)
    nid = grid.node_id(np.zeros(4, dtype=np.int64))
    jet = finite_difference_jet(gf, nid)
    checks.append(np.max(np.abs(jet.hc - np.eye(2))) < 1e-10)
    checks.append(abs(np.trace(jet.hc).real - 0.25 * np.trace(jet.d2u)) < 1e-12)
    gf2 = GridFunction.from_callable(grid, lambda z: z[:, 0] * z[:, 2])  # x1*y1, pluriharmonic
    jet2 = finite_difference_jet(gf2, nid)
    checks.append(np.max(np.abs(jet2.hc)) < 1e-12)
    bad = len(checks) - sum(checks)
    return _result("complex_calculus_identities", bad == 0, f"{len(checks)} checks, {bad} failures", t0)


def hermitian_eigensolver():
    t0 = time.perf_counter()
    checks = []
    checks.append(np.allclose(hermitian_eigenvalues(np.eye(3)), 1.0))
    checks.append(np.allclose(hermitian_eigenvalues(np.array([[2, 1j], [-1j, 2]])), [1.0, 3.0]))
    rng = np.random.default_rng(303)
    worst_tr = worst_det = 0.0
    for n in (2, 3, 5, 6):
        a = rng.standard_normal((80, n, n)) + 1j * rng.standard_normal((80, n, n))
        hs = 0.5 * (a + np.conj(np.swapaxes(a, 1, 2)))
        lams = hermitian_eigenvalues_batch(hs)
        for i in range(hs.shape[0]):
            tr = np.trace(hs[i]).real
            det = np.linalg.det(hs[i]).real  # LU-based oracle
            worst_tr = max(worst_tr, abs(np.sum(lams[i]) - tr) / (1 + abs(tr)))
            worst_det = max(worst_det, abs(np.prod(lams[i]) - det) / (1 + abs(det)))
        single = hermitian_eigenvalues(hs[0])
        checks.append(np.max(np.abs(single - lams[0])) < 1e-12 * (1 + np.max(np.abs(lams[0]))))
    checks.append(worst_tr < 1e-10)
    checks.append(worst_det < 1e-10)
    # Weyl continuity under tiny perturbation
    a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    h = 0.5 * (a + np.conj(a.T))
    d = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    d = 0.5 * (d + np.conj(d.T))
    d *= 1e-8 / np.sqrt(np.sum(np.abs(d) ** 2))
    move = np.max(np.abs(hermitian_eigenvalues(h + d) - hermitian_eigenvalues(h)))
    checks.append(move <= 1e-8 + 1e-12)
    bad = len(checks) - sum(checks)
    return _result("hermitian_eigensolver", bad == 0,
                   f"{len(checks)} checks, {bad} failures; tr err {worst_tr:.1e}, det err {worst_det:.1e}", t0)


def _random_admissible_pairs(n, k, eps, count, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((count, n, n)) + 1j * rng.standard_normal((count, n, n))
    m = 0.5 * (a + np.conj(np.swapaxes(a, 1, 2)))
    lam = hermitian_eigenvalues_batch(m)
    tr = np.sum(lam, axis=1)
    # shift each M so the regularized spectrum sits strictly inside the cone
    target = 0.1 * (1.0 + np.max(np.abs(lam), axis=1))
    shift = np.clip((target - lam[:, 0] - eps * tr) / (1.0 + eps * n), 0.0, None)
    m += shift[:, None, None] * np.eye(n)
    b = rng.standard_normal((count, n, n)) + 1j * rng.standard_normal((count, n, n))
    nn = b @ np.conj(np.swapaxes(b, 1, 2)) + 0.05 * np.eye(n)
    return m, nn


def ellipticity_suite(total=10_000):
    t0 = time.perf_counter()
    cells = [(n, k, eps) for n in range(1, 6) for k in range(1, n + 1)
             for eps in (0.01, 0.1, 1.0)]
    per_cell = max(1, total // len(cells))
    tested = 0
    violations = 0
    worst_margin = np.inf
    for idx, (n, k, eps) in enumerate(cells):
        m, nn = _random_admissible_pairs(n, k, eps, per_cell, seed=40_000 + idx)
        lam_eps, big_lam_eps = ellipticity_constants(k, n, eps)
        lm = hermitian_eigenvalues_batch(m)
        lsum = hermitian_eigenvalues_batch(m + nn)
        root_m = np.clip(sigma_all_batch(lm + eps * np.sum(lm, axis=1)[:, None], k)[:, k], 0, None) ** (1 / k)
        root_mn = np.clip(sigma_all_batch(lsum + eps * np.sum(lsum, axis=1)[:, None], k)[:, k], 0, None) ** (1 / k)
        mid = root_mn - root_m
        tr_n = np.einsum("ijj->i", nn).real
        lhs, rhs = lam_eps * tr_n, big_lam_eps * tr_n
        tol = 1e-9 * (1.0 + np.abs(rhs))
        bad = (mid < lhs - tol) | (mid > rhs + tol)
        violations += int(np.count_nonzero(bad))
        worst_margin = min(worst_margin, float(np.min(np.minimum(mid - lhs, rhs - mid))))
        tested += per_cell
    return _result("ellipticity", violations == 0,
                   f"{tested} admissible pairs over {len(cells)} (n,k,eps) cells, "
                   f"{violations} violations, worst margin {worst_margin:.2e}", t0)


def _det_identity_configs():
    for k in (2, 3, 4):
        for n in range(k, 6):
            for r in (0.125, 0.25, 0.5):
                for eps in (r / 10.0, r / 2.0):
                    yield k, n, r, eps


def determinant_identity(points=1000):
    t0 = time.perf_counter()
    worst = 0.0
    lb_bad = 0
    configs = 0
    for k, n, r, eps in _det_identity_configs():
        p = PogorelovParams(n=n, k=k, r=r, eps=eps, big_m=1.0)
        pts = sampling.ball_points(2 * n, points, r)
        hs = np.empty((points, n, n), dtype=complex)
        dets = np.empty(points)
        for i, z in enumerate(pts):
            _, _, hs[i] = pogorelov_w(p, z)
            dets[i] = pogorelov_det(p, z)
        lam = hermitian_eigenvalues_batch(hs)
        sig = sigma_all_batch(lam, k)[:, k]
        worst = max(worst, float(_rel_err(sig, dets)))
        lb_bad += int(np.count_nonzero(dets < p.alpha**k * r ** (2 * (k - 1)) * (1 - 1e-12)))
        configs += 1
    passed = worst <= 1e-9 and lb_bad == 0
    return _result("determinant_identity", passed,
                   f"{configs} configs x {points} pts; max rel err {worst:.2e}; "
                   f"{lb_bad} lower-bound violations", t0)


def eigenvalue_identity(points=1000):
    t0 = time.perf_counter()
    worst_prod = 0.0
    worst_gamma = 0.0
    configs = 0
    for k, n, r, eps in _det_identity_configs():
        p = PogorelovParams(n=n, k=k, r=r, eps=eps, big_m=1.0)
        pts = sampling.ball_points(2 * n, points, r)
        gammas = np.empty((points, k - 1, k - 1), dtype=complex)
        expected = np.empty((points, k - 1))
        for i, z in enumerate(pts):
            eig = gamma_matrix_eigs(p, z)
            prod = eig.lambda1**eig.multiplicity * eig.lambda2
            worst_prod = max(worst_prod, abs(prod - pogorelov_det(p, z)) / abs(pogorelov_det(p, z)))
            gammas[i] = gamma_matrix(p, z)
            expected[i] = np.sort(np.array([eig.lambda1] * eig.multiplicity + [eig.lambda2]))
        lam = hermitian_eigenvalues_batch(gammas)
        scale = 1.0 + np.max(np.abs(expected), axis=1)
        worst_gamma = max(worst_gamma, float(np.max(np.abs(lam - expected) / scale[:, None])))
        configs += 1
    passed = worst_prod <= 1e-12 and worst_gamma <= 1e-9
    return _result("eigenvalue_identity", passed,
                   f"{configs} configs x {points} pts; product err {worst_prod:.2e}, "
                   f"assembled-spectrum err {worst_gamma:.2e}", t0)


def gradient_bounds(points=10_000):
    t0 = time.perf_counter()
    f = RhsSpec.constant(1.0)
    r = choose_r(f, 2)
    m_scale = choose_M(r, 2)
    details = []
    passed = True
    for (n, k) in ((2, 2), (3, 3)):
        for eps in (r / 10.0, r / 2.0, 0.9 * r):
            p = PogorelovParams(n=n, k=k, r=r, eps=eps, big_m=choose_M(r, k))
            rep = gradient_bound_check(p, count=points)
            psi_grad_max = p.big_m * math.sqrt(rep.max_grad_sq)
            ok = rep.passed and psi_grad_max <= 1.0 + 1e-9
            passed &= ok
            details.append(f"k={k},eps={eps:.4g}: ratio {rep.max_ratio:.3f}, "
                           f"|Dpsi|max {psi_grad_max:.6f}, fd {rep.fd_max_err:.1e}")
    return _result("gradient_bounds", passed and m_scale == choose_M(r, 2),
                   "; ".join(details), t0)


def barrier_signs(points=10_000):
    t0 = time.perf_counter()
    f = RhsSpec.constant(1.0)
    k = n = 2
    r = choose_r(f, k)
    ok = abs(r - 0.125) < 1e-15
    details = [f"r={r}"]
    pts_br = sampling.ball_points(2 * n, points, r)
    worst_sub = -np.inf
    for eps in (r / 2.0, r / 4.0, r / 8.0):
        p = PogorelovParams.standard(n, k, r, eps)
        psi = PogorelovLower(p)
        res = classical_sign_check(k, f, psi, pts_br, "sub", tol=0.0)
        ok &= res.passed and res.worst < 0.0
        worst_sub = max(worst_sub, res.worst)
        phi = PogorelovUpper(p)
        res_super = classical_sign_check(k, f, phi, pts_br, "super", tol=0.0)
        ok &= res_super.passed and res_super.worst > 0.0
        consts = choose_lambda_star(f, phi)
        ok &= r < consts.r0
        u_lam = LowerBarrierCandidate(phi, consts.lambda_star, r)
        res_low = classical_sign_check(k, f, u_lam, pts_br, "sub", eps=eps, tol=0.0)
        ok &= res_low.passed and res_low.worst < 0.0
        details.append(f"eps={eps:.4g}: psi worst {res.worst:.3e}, phi worst {res_super.worst:.3e}, "
                       f"u_lam worst {res_low.worst:.3e}")
    details.append(f"max psi margin {worst_sub:.3e}")
    return _result("barrier_signs", ok, "; ".join(details), t0)


def rhs_certification():
    t0 = time.perf_counter()
    checks = []
    rep = certify_rhs(RhsSpec.constant(1.0))
    checks.append(rep.c0 == 1.0 and rep.deriv_bound == 0.0 and rep.monotone_u)
    rep = certify_rhs(RhsSpec.bounded_monotone(1.0, 0.5))
    checks.append(abs(rep.c0 - 1.0) < 1e-15 and abs(rep.deriv_bound - 0.5 / math.pi) < 1e-15)
    try:
        certify_rhs(RhsSpec.constant(-1.0))
        checks.append(False)
    except CertificationError:
        checks.append(True)
    f = RhsSpec.bounded_monotone(1.0, 0.5)
    us = np.linspace(-5, 5, 11)
    vals = f.value(None, us, None)
    checks.append(np.all(np.diff(vals) >= 0) and np.all(vals >= 1.0) and np.all(vals <= 1.5))
    bad = len(checks) - sum(checks)
    return _result("rhs_certification", bad == 0, f"{len(checks)} checks, {bad} failures", t0)


def barrier_envelopes(points=10_000):
    t0 = time.perf_counter()
    checks = []
    f = RhsSpec.constant(1.0)
    k = n = 2
    r = choose_r(f, k)
    pts = sampling.ball_points(2 * n, points, 1.0)
    for eps in (0.5, 0.1):
        p = PogorelovParams.standard(n, k, r, eps)
        p0 = PogorelovParams(n=n, k=k, r=r, eps=0.0, big_m=p.big_m)
        bad = 0
        for z in pts:
            psi0 = psi_and_phi(p0, z)[0]
            psi_e, phi_e = psi_and_phi(p, z)
            if not (psi0 <= psi_e + 1e-12 and psi_e <= phi_e + 1e-12):
                bad += 1
        checks.append(bad == 0)
    # phi is independent of z_1 and z'' (n=3, k=2 exposes both)
    p3 = PogorelovParams(n=3, k=2, r=r, eps=0.25, big_m=1.0)
    rng = np.random.default_rng(404)
    indep_bad = 0
    for _ in range(100):
        z = rng.uniform(-0.5, 0.5, size=6)
        z2 = z.copy()
        z2[[0, 2, 3, 5]] = rng.uniform(-0.5, 0.5, size=4)  # perturb z1 and z3 (real+imag)
        if abs(psi_and_phi(p3, z)[1] - psi_and_phi(p3, z2)[1]) > 1e-14:
            indep_bad += 1
    checks.append(indep_bad == 0)
    checks.append(abs(choose_M(0.5, 2) - 1.0) < 1e-15)
    checks.append(choose_r(RhsSpec.constant(2.0), 2) <= choose_r(RhsSpec.constant(1.0), 2))
    # psi <= r/sqrt(2) on B_r with the standard scaling
    p = PogorelovParams.standard(n, k, r, r / 2.0)
    psi_max = max(psi_and_phi(p, z)[0] for z in sampling.ball_points(2 * n, 2048, r))
    checks.append(psi_max <= r / math.sqrt(2.0) + 1e-12)
    consts = choose_lambda_star(f, PogorelovUpper(p))
    checks.append(consts.lambda_star == 1.0 and consts.r0 == 1.0)
    consts2 = choose_lambda_star(RhsSpec.constant(2.5), PogorelovUpper(p))
    checks.append(abs(consts2.lambda_star - 2.5) < 1e-12 and abs(consts2.r0 - 0.4) < 1e-12)
    checks.append(choose_eps0(affine_candidate(2, 0.3, [1.0, 0, 0, 0]), 2, f) == 1.0)
    phi_q = z1_modulus_candidate(2)
    eps0 = choose_eps0(phi_q, 2, f)
    checks.append(abs(eps0 - 0.5) < 1e-12)
    bad_sign = 0
    for z in sampling.ball_points(4, 2048, 1.0):
        val = eval_F_eps(2, eps0 / 2.0, f, phi_q(z))
        if val is None or val <= 0.0:
            bad_sign += 1
    checks.append(bad_sign == 0)
    # diagonal line z2 = z1: psi0 = M (r^2+t^2) |t|^(2a), phi0 = 2M |t|^(2a); x1-axis: both vanish
    p0 = PogorelovParams(n=2, k=2, r=r, eps=0.0, big_m=16.0)
    diag_bad = axis_bad = 0
    for t in np.linspace(-r, r, 41):
        z = np.array([t, t, 0.0, 0.0])
        psi0, phi0 = psi_and_phi(p0, z)
        if abs(psi0 - 16.0 * (r**2 + t**2) * abs(t)) > 1e-13 or abs(phi0 - 32.0 * abs(t)) > 1e-13:
            diag_bad += 1
        psi_ax, phi_ax = psi_and_phi(p0, np.array([t, 0.0, 0.0, 0.0]))
        if psi_ax != 0.0 or phi_ax != 0.0:
            axis_bad += 1
    checks.append(diag_bad == 0 and axis_bad == 0)
    bad = len(checks) - sum(checks)
    return _result("barrier_envelopes", bad == 0, f"{len(checks)} checks, {bad} failures", t0)


def grid_invariants():
    t0 = time.perf_counter()
    checks = []
    grid = build_grid(1, 0.5, 0.25)
    brute = [(i, j) for i in range(-2, 3) for j in range(-2, 3) if (i * i + j * j) * 0.25**2 <= 0.25 + 1e-12]
    checks.append(grid.n_nodes == len(brute) == 13)
    checks.append(grid.interior_ids.size == 1 and
                  tuple(grid.lattice[grid.interior_ids[0]]) == (0, 0))
    # Monte Carlo volume oracle on an n=2 grid
    grid2 = build_grid(2, 0.5, 0.0625)
    rng = np.random.default_rng(505)
    side = (2 * grid2._halfwidth + 1) * grid2.h
    pts = rng.uniform(-side / 2, side / 2, size=(200_000, 4))
    frac = np.mean(np.einsum("ij,ij->i", pts, pts) <= grid2.r**2)
    predicted = frac * (2 * grid2._halfwidth + 1) ** 4
    checks.append(abs(grid2.n_nodes - predicted) <= 0.10 * predicted)
    # every interior node accepts the full finite-difference stencil
    gf = GridFunction.from_callable(grid2, lambda z: np.einsum("ij,ij->i", z, z))
    stencil_bad = 0
    for nid in grid2.interior_ids[:: max(1, grid2.interior_ids.size // 200)]:
        try:
            finite_difference_jet(gf, int(nid))
        except StencilError:
            stencil_bad += 1
    checks.append(stencil_bad == 0)
    bad = len(checks) - sum(checks)
    return _result("grid_invariants", bad == 0,
                   f"{len(checks)} checks, {bad} failures; n=2 grid nodes {grid2.n_nodes} "
                   f"vs MC {predicted:.0f}", t0)


def analysis_invariants():
    t0 = time.perf_counter()
    checks = []
    ts = np.linspace(-1.0, 1.0, 401)
    for expo, target in ((4.0 / 3.0, 4.0 / 3.0), (1.0, 1.0)):
        prof = AxisProfile(t=ts, values=np.abs(ts) ** expo, origin_value=0.0,
                           axis=0, source="callable")
        fit = holder_fit(prof, t_min=0.01, t_max=1.0)
        checks.append(abs(fit.exponent_hat - target) < 1e-3)
    prof_abs = AxisProfile(t=ts, values=np.abs(ts), origin_value=0.0, axis=0, source="callable")
    kink = kink_detector(prof_abs)
    checks.append(abs(kink.right_slope - 1) < 1e-12 and abs(kink.left_slope + 1) < 1e-12
                  and abs(kink.gap - 2) < 1e-12)
    # smooth profiles: the gap shrinks linearly with the sample spacing
    gaps = []
    for m in (100, 200, 400):
        tt = np.linspace(-1, 1, 2 * m + 1)
        prof_sq = AxisProfile(t=tt, values=tt**2, origin_value=0.0, axis=0, source="callable")
        gaps.append(kink_detector(prof_sq).gap)
        checks.append(gaps[-1] <= 4.0 / m + 1e-12)
    checks.append(gaps[0] > gaps[1] > gaps[2])
    # profile of a barrier value callable on the x1 axis is identically zero
    p0 = PogorelovParams(n=2, k=2, r=0.125, eps=0.0, big_m=16.0)
    phi0 = PogorelovUpper(p0)
    prof0 = axis_profile(phi0, count=32, t_max=0.1, axis=0)
    checks.append(np.max(np.abs(prof0.values)) == 0.0)
    quad = build_grid(2, 0.5, 0.0625)
    gf = GridFunction.from_callable(quad, lambda z: np.einsum("ij,ij->i", z, z) - 0.25)
    prof_g = axis_profile(gf, axis=0)
    checks.append(np.max(np.abs(prof_g.values - (prof_g.t**2 - 0.25))) < 1e-14)
    bad = len(checks) - sum(checks)
    return _result("analysis_invariants", bad == 0, f"{len(checks)} checks, {bad} failures", t0)


def operator_invariants():
    t0 = time.perf_counter()
    checks = []
    f1 = RhsSpec.constant(1.0)
    # exact solution: u = |z|^2 - r^2 with f = 1, k = n = 2
    jet = Jet(z=np.zeros(4), u=-0.25, du=np.zeros(4), hc=np.eye(2))
    checks.append(abs(eval_F(2, f1, jet)) < 1e-14)
    jet_bad = Jet(z=np.zeros(4), u=0.0, du=np.zeros(4), hc=np.diag([2.0, -1.0]))
    checks.append(eval_F(2, f1, jet_bad) is None)
    # eps = 0 reduces to eval_F on random admissible jets
    rng = np.random.default_rng(606)
    agree = True
    for _ in range(200):
        a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        h = a @ np.conj(a.T) + 0.1 * np.eye(2)  # positive definite, hence admissible
        jet_r = Jet(z=np.zeros(4), u=0.0, du=np.zeros(4), hc=h)
        v0, v1 = eval_F(2, f1, jet_r), eval_F_eps(2, 0.0, f1, jet_r)
        if v0 is None or v1 is None or abs(v0 - v1) > 1e-14:
            agree = False
    checks.append(agree)
    jet_s = Jet(z=np.zeros(4), u=0.0, du=np.zeros(4), hc=np.diag([1.0, -0.2]))
    val = eval_F_eps(2, 0.5, f1, jet_s)
    checks.append(val is not None and abs(val - (-math.sqrt(0.28) + 1.0)) < 1e-12)
    lam_e, big_e = ellipticity_constants(2, 2, 0.1)
    checks.append(abs(lam_e - 0.1) < 1e-15 and abs(big_e - 1.1) < 1e-15)
    lam_e, big_e = ellipticity_constants(2, 4, 1.0)
    checks.append(abs(lam_e - math.sqrt(6)) < 1e-12 and abs(big_e - 2 * math.sqrt(6)) < 1e-12)
    # monotonicity in the matrix argument (ellipticity) and homogeneity
    mono = homog = True
    for _ in range(200):
        a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        h1 = a @ np.conj(a.T) + 0.1 * np.eye(3)
        b = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        psd = b @ np.conj(b.T)
        j1 = Jet(z=np.zeros(6), u=0.0, du=np.zeros(6), hc=h1)
        j2 = Jet(z=np.zeros(6), u=0.0, du=np.zeros(6), hc=h1 + psd)
        v1, v2 = eval_F(2, f1, j1), eval_F(2, f1, j2)
        if v1 is None or v2 is None or v2 > v1 + 1e-10:
            mono = False
        t = rng.uniform(0.2, 3.0)
        lam = hermitian_eigenvalues(h1)
        lhs = sigma_root(2, t * lam)
        if abs(lhs - t * sigma_root(2, lam)) > 1e-12 * (1 + abs(lhs)):
            homog = False
    checks.append(mono)
    checks.append(homog)
    bad = len(checks) - sum(checks)
    return _result("operator_invariants", bad == 0, f"{len(checks)} checks, {bad} failures", t0)


REGISTRY = [
    ("sigma_identities", sigma_identities),
    ("complex_calculus_identities", complex_calculus_identities),
    ("hermitian_eigensolver", hermitian_eigensolver),
    ("operator_invariants", operator_invariants),
    ("ellipticity", ellipticity_suite),
    ("determinant_identity", determinant_identity),
    ("eigenvalue_identity", eigenvalue_identity),
    ("gradient_bounds", gradient_bounds),
    ("barrier_signs", barrier_signs),
    ("rhs_certification", rhs_certification),
    ("barrier_envelopes", barrier_envelopes),
    ("grid_invariants", grid_invariants),
    ("analysis_invariants", analysis_invariants),
]


def run_all(names=None):
    """Run the registered suites (optionally a subset), in registry order.

    Independent suites may be evaluated by a thread pool sized by the
    KHESSIAN_THREADS environment variable; results always come back in
    registry order, so output is identical across thread counts.
    """
    selected = [(n, fn) for n, fn in REGISTRY if names is None or n in names]
    workers = int(os.environ.get("KHESSIAN_THREADS", "1"))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(fn) for _, fn in selected]
            return [f.result() for f in futures]
    return [fn() for _, fn in selected]
