"""Damped-Newton solution of the regularized Dirichlet problem on a ball grid.

The interior residual is

    G(u)_i = sigma_k^(1/k)( H_i + eps*trace(H_i)*I ) - f(z_i, u_i, Du_i),

with H_i the central-difference complex Hessian at node i (so G = -F_eps and
G = 0 is the regularized equation).  Newton steps solve J delta = -G with the
Jacobian assembled in closed form through the directional-derivative matrix of
sigma_k^(1/k) (a polynomial in the regularized Hessian; no eigenvectors
needed).  The linear stage is a damped Jacobi relaxation: dependency-free,
deterministic, and recorded sweep-by-sweep in the report.

Safeguards: steps keeping any node's regularized spectrum outside the open
cone are re-damped (halving down to a floor) and, failing that, a mu*I lift
applied to the interior values is recorded as a repair.  Collar nodes always
hold exact Dirichlet data of the (globally defined) datum.
"""

import json
from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.sparse as sparse

from .calculus import eigenvalues_fast_batch
from .errors import ConvergenceError, DomainError
from .grids import GridFunction
from .operators import certify_rhs
from .symmetric import in_cone_batch, sigma_all_batch

_SIGMA_FLOOR = 1e-30  # keeps the chain-rule weight finite near the cone boundary
_MU_CAP = 1e6


@dataclass
class SolverConfig:
    """Solver knobs; all keys are accepted by the key=value config file."""

    tol: float = 1e-8
    max_iter: int = 60
    damping_floor: float = 2.0**-20
    mu_lift: float = 1e-8
    relax_tol: float = 1e-10
    relax_max_sweeps: int = 60000
    relax_omega: float = 0.8
    divergence_patience: int = 5
    init_lambda: float = None
    eps_schedule: tuple = ()

    @classmethod
    def from_file(cls, path):
        """Read a config from `key = value` lines (values are JSON literals)."""
        cfg = cls()
        with open(path) as fh:
            for raw in fh:
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise DomainError(f"bad config line: {raw!r}")
                key, val = (part.strip() for part in line.split("=", 1))
                if not hasattr(cfg, key):
                    raise DomainError(f"unknown config key: {key}")
                parsed = json.loads(val)
                if key == "eps_schedule":
                    parsed = tuple(float(x) for x in parsed)
                setattr(cfg, key, parsed)
        return cfg

    def to_dict(self):
        d = asdict(self)
        d["eps_schedule"] = list(self.eps_schedule)
        return d


@dataclass
class SolveReport:
    """Outcome of one regularized solve (JSON-serializable via to_dict)."""

    k: int
    n: int
    r: float
    h: float
    eps: float
    interior_count: int
    iterations: int = 0
    final_residual: float = np.inf
    converged: bool = False
    damping_history: list = field(default_factory=list)
    linear_sweeps: list = field(default_factory=list)
    repairs: int = 0
    lipschitz_estimate: float = np.nan
    message: str = ""

    def to_dict(self):
        return asdict(self)


class _Problem:
    """Vectorized residual/Jacobian assembly over the interior nodes."""

    def __init__(self, k, eps, f, grid, config):
        self.k, self.eps, self.f, self.grid, self.config = k, eps, f, grid, config
        self.n, self.h = grid.n, grid.h
        t = grid.stencil_tables
        self.tables = t
        self.pair_idx = {pair: i for i, pair in enumerate(t["pairs"])}
        self.z_center = grid.coords[t["center"]]
        npos = np.full(grid.n_nodes, -1, dtype=np.int64)
        npos[grid.interior_ids] = np.arange(grid.interior_ids.size)
        self.interior_pos = npos

    def hessian_stack(self, u):
        """Complex Hessians, gradients and center values at all interior nodes."""
        t, h, n = self.tables, self.h, self.n
        uc = u[t["center"]]
        up, um = u[t["axis_p"]], u[t["axis_m"]]
        dax = (up - 2.0 * uc[:, None] + um) / h**2
        du = (up - um) / (2.0 * h)
        mix = (u[t["pp"]] - u[t["pm"]] - u[t["mp"]] + u[t["mm"]]) / (4.0 * h**2)
        hs = np.zeros((uc.size, n, n), dtype=complex)
        for j in range(n):
            hs[:, j, j] = 0.25 * (dax[:, j] + dax[:, n + j])
            for l in range(j + 1, n):
                sxx = mix[:, self.pair_idx[(j, l)]]
                syy = mix[:, self.pair_idx[(n + j, n + l)]]
                sxy = mix[:, self.pair_idx[(j, n + l)]]
                syx = mix[:, self.pair_idx[(l, n + j)]]
                hs[:, j, l] = 0.25 * ((sxx + syy) + 1j * (sxy - syx))
                hs[:, l, j] = np.conj(hs[:, j, l])
        return hs, du, uc

    def residual(self, u):
        """G, per-node admissibility of the regularized spectrum, and a cache.

        Nodes whose regularized spectrum has left the open cone (possible in
        the collar boundary layer of a fresh lower-barrier start) switch to
        the linear mean-eigenvalue surrogate (1+n*eps) tr(H)/n - f: a strongly
        elliptic restoration equation whose healed state agrees with the true
        one for near-isotropic Hessians.  Healthy nodes use the true residual.
        """
        hs, du, uc = self.hessian_stack(u)
        lam = eigenvalues_fast_batch(hs)
        tr = np.sum(lam, axis=1)
        lam_eps = lam + self.eps * tr[:, None]
        adm = in_cone_batch(self.k, lam_eps, "strict")
        e = sigma_all_batch(lam_eps, self.k)
        root = np.clip(e[:, self.k], 0.0, None) ** (1.0 / self.k)
        fvals = np.asarray(self.f.value(self.z_center, uc, du), dtype=float)
        g = root - fvals
        if not np.all(adm):
            n = self.n
            surrogate = (1.0 + n * self.eps) * tr / n - fvals
            g = np.where(adm, g, surrogate)
        cache = {"hs": hs, "du": du, "uc": uc, "tr": tr, "adm": adm, "e": e}
        return g, adm, cache

    def jacobian(self, cache):
        """Sparse Newton matrix dG/du over interior unknowns (collar columns dropped)."""
        hs, du, uc, tr, adm, e = (cache[key] for key in
                                  ("hs", "du", "uc", "tr", "adm", "e"))
        k, n, h, eps = self.k, self.n, self.h, self.eps
        d = 2 * n
        count = hs.shape[0]
        eye = np.eye(n, dtype=complex)
        heps = hs + (eps * tr)[:, None, None] * eye
        # directional-derivative matrix of sigma_k: T = sum_j (-1)^j sigma_{k-1-j} Heps^j
        t_mat = e[:, k - 1, None, None] * eye
        power = np.broadcast_to(eye, heps.shape).copy()
        sign = 1.0
        for j in range(1, k):
            power = power @ heps
            sign = -sign
            t_mat = t_mat + sign * e[:, k - 1 - j, None, None] * power
        tr_t = np.trace(t_mat, axis1=1, axis2=2).real
        w_mat = t_mat + eps * tr_t[:, None, None] * eye
        gp = (1.0 / k) * np.clip(e[:, k], _SIGMA_FLOOR, None) ** (1.0 / k - 1.0)
        if not np.all(adm):
            # restoration rows: derivative of the linear surrogate
            sick = ~adm
            w_mat[sick] = ((1.0 + n * eps) / n) * eye
            gp[sick] = 1.0
        re_w, im_w = w_mat.real, w_mat.imag
        r_mat = np.empty((count, d, d))
        r_mat[:, :n, :n] = 0.25 * re_w
        r_mat[:, :n, n:] = 0.25 * im_w
        r_mat[:, n:, :n] = -0.25 * im_w
        r_mat[:, n:, n:] = 0.25 * re_w

        fu = np.asarray(self.f.d_u(self.z_center, uc, du), dtype=float)
        fp = np.asarray(self.f.d_p(self.z_center, uc, du), dtype=float)
        t = self.tables
        rows, cols, vals = [], [], []
        rng = np.arange(count)

        def add(node_ids, values):
            pos = self.interior_pos[node_ids]
            keep = pos >= 0
            rows.append(rng[keep])
            cols.append(pos[keep])
            vals.append(values[keep])

        diag_sum = np.einsum("iaa->i", r_mat)
        rows.append(rng)
        cols.append(rng)
        vals.append(gp * (-2.0 / h**2) * diag_sum - fu)
        for a in range(d):
            w = gp * r_mat[:, a, a] / h**2
            add(t["axis_p"][:, a], w - fp[:, a] / (2.0 * h))
            add(t["axis_m"][:, a], w + fp[:, a] / (2.0 * h))
        for idx, (a, b) in enumerate(t["pairs"]):
            w = gp * r_mat[:, a, b] / (2.0 * h**2)
            add(t["pp"][:, idx], w)
            add(t["mm"][:, idx], w)
            add(t["pm"][:, idx], -w)
            add(t["mp"][:, idx], -w)
        mat = sparse.coo_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(count, count),
        )
        return mat.tocsr()


def _relax_solve(a, b, config):
    """Damped Jacobi relaxation for A x = b; halves omega and restarts on stalls."""
    diag = a.diagonal()
    if np.any(np.abs(diag) < 1e-300):
        raise ConvergenceError("relaxation: zero diagonal entry in the Newton matrix")
    bnorm = max(1.0, float(np.max(np.abs(b))))
    omega = config.relax_omega
    for _restart in range(7):
        x = np.zeros_like(b)
        r = b.copy()
        last_check = np.inf
        sweeps = 0
        healthy = True
        while sweeps < config.relax_max_sweeps:
            rn = float(np.max(np.abs(r)))
            if rn <= config.relax_tol * bnorm:
                return x, sweeps, omega
            if not np.isfinite(rn) or rn > 1e8 * bnorm:
                healthy = False
                break
            if sweeps % 500 == 499:
                if rn > 0.98 * last_check:
                    healthy = False
                    break
                last_check = rn
            x += omega * (r / diag)
            r = b - a @ x
            sweeps += 1
        if healthy:
            break
        omega *= 0.5
    raise ConvergenceError(
        "relaxation failed to reach the linear tolerance",
        diagnostics={"omega": omega, "rhs_norm": bnorm},
    )


def solve_regularized(k, eps, f, boundary, grid, config=None, warm_start=None):
    """Solve F_eps = 0 on the grid interior with Dirichlet data from `boundary`.

    Parameters
    ----------
    k, eps : cone level and regularization parameter (eps > 0).
    f : RhsSpec, certified before any iteration (positivity + monotonicity).
    boundary : callable z -> value, defined on the whole closed ball; collar
        nodes take its exact values.
    grid : BallGrid.
    config : SolverConfig, optional.
    warm_start : GridFunction, optional; defaults to the lower-barrier start
        datum + lambda*(|z|^2 - r^2).

    Returns (GridFunction, SolveReport).  Divergence, unrecoverable
    admissibility loss and the iteration cap raise ConvergenceError with
    diagnostics (including partial values).
    """
    config = config or SolverConfig()
    if eps <= 0:
        raise DomainError(f"solver needs eps > 0, got {eps}")
    if not 1 <= k <= grid.n:
        raise DomainError(f"need 1 <= k <= n={grid.n}, got k={k}")
    certify_rhs(f)

    datum = GridFunction.from_callable(grid, boundary)
    prob = _Problem(k, eps, f, grid, config)
    int_ids = grid.interior_ids
    rho = np.einsum("ij,ij->i", grid.coords, grid.coords) - grid.r**2

    u = datum.values.copy()
    if warm_start is not None:
        u[int_ids] = np.asarray(warm_start.values, dtype=float)[int_ids]
    else:
        if config.init_lambda is not None:
            lam0 = config.init_lambda
        else:
            lam0 = max(1.0, f.sup_zp(float(np.max(datum.values)), 1.0, 4.0))
        u[int_ids] += lam0 * rho[int_ids]

    report = SolveReport(k=k, n=grid.n, r=grid.r, h=grid.h, eps=eps,
                         interior_count=int(int_ids.size))

    def measure(values):
        g, adm, cache = prob.residual(values)
        return g, int(np.count_nonzero(~adm)), float(np.max(np.abs(g))), cache

    # a fresh lower-barrier start may leave a thin inadmissible layer next to
    # the collar (the datum/interior interface); Newton is allowed to march
    # through it, accepting steps that shrink the layer before the residual.
    g, inadm, res, cache = measure(u)

    best = res
    best_inadm = inadm
    stall = 0
    for it in range(1, config.max_iter + 1):
        if res <= config.tol and inadm == 0:
            report.converged = True
            break
        jac = prob.jacobian(cache)
        delta, sweeps, _ = _relax_solve(jac, -g, config)
        report.linear_sweeps.append(int(sweeps))

        d = 1.0
        accepted = False
        while d >= config.damping_floor:
            trial = u.copy()
            trial[int_ids] += d * delta
            g_t, inadm_t, res_t, cache_t = measure(trial)
            if inadm_t < inadm or (inadm_t == inadm and res_t < res):
                u, g, inadm, res, cache = trial, g_t, inadm_t, res_t, cache_t
                accepted = True
                break
            d *= 0.5
        if not accepted:
            # floor step plus a growing identity lift until the cone is recovered
            base = u.copy()
            base[int_ids] += config.damping_floor * delta
            mu = config.mu_lift
            while True:
                trial = base.copy()
                trial[int_ids] += mu * rho[int_ids]
                g_t, inadm_t, res_t, cache_t = measure(trial)
                if inadm_t == 0:
                    u, g, inadm, res, cache = trial, g_t, inadm_t, res_t, cache_t
                    report.repairs += 1
                    d = config.damping_floor
                    break
                mu *= 2.0
                if mu > _MU_CAP:
                    raise ConvergenceError("admissibility unrecoverable",
                                           diagnostics={"iteration": it,
                                                        "inadmissible_nodes": inadm_t})
        report.damping_history.append(d)
        report.iterations = it
        if inadm < best_inadm or res < best * (1.0 - 1e-9):
            best_inadm = min(best_inadm, inadm)
            best = min(best, res)
            stall = 0
        else:
            stall += 1
            if stall >= config.divergence_patience:
                raise ConvergenceError(
                    f"diverged: no residual decrease over {stall} consecutive damped steps",
                    diagnostics={"residual": res, "iteration": it, "partial_values": u},
                )
    else:
        raise ConvergenceError("iteration cap reached",
                               diagnostics={"residual": res, "partial_values": u})

    report.final_residual = res
    solution = GridFunction(grid, u)
    report.lipschitz_estimate = lipschitz_estimate(solution)
    report.message = "converged"
    return solution, report


def lipschitz_estimate(u):
    """Max difference quotient |u_i - u_j| / h over adjacent (axis) node pairs."""
    grid = u.grid
    best = 0.0
    for a in range(grid.dim):
        e = np.zeros(grid.dim, dtype=np.int64)
        e[a] = 1
        nb = grid.ids_at(grid.lattice + e)
        mask = nb >= 0
        if np.any(mask):
            diffs = np.abs(u.values[nb[mask]] - u.values[mask]) / grid.h
            best = max(best, float(np.max(diffs)))
    return best


@dataclass
class SandwichReport:
    """Two-sided comparison of a grid function against lower/upper envelopes."""

    min_lower_gap: float
    min_upper_gap: float
    slack: float
    passed: bool
    worst_lower: tuple = None  # (coords, gap) at the weakest lower margin
    worst_upper: tuple = None


def _values_at(fn, coords):
    from .calculus import Jet

    try:
        vals = np.asarray(fn(coords), dtype=float)
        if vals.shape == (coords.shape[0],):
            return vals
    except Exception:
        pass
    out = np.empty(coords.shape[0])
    for i, z in enumerate(coords):
        v = fn(z)
        out[i] = v.u if isinstance(v, Jet) else float(v)
    return out


def compare(u, lower, upper, c_slack):
    """Check lower <= u <= upper on every node, within slack = c_slack * h^2."""
    coords = u.grid.coords
    low = _values_at(lower, coords)
    up = _values_at(upper, coords)
    gap_low = u.values - low
    gap_up = up - u.values
    slack = c_slack * u.grid.h**2
    i_low = int(np.argmin(gap_low))
    i_up = int(np.argmin(gap_up))
    return SandwichReport(
        min_lower_gap=float(gap_low[i_low]),
        min_upper_gap=float(gap_up[i_up]),
        slack=slack,
        passed=bool(gap_low[i_low] >= -slack and gap_up[i_up] >= -slack),
        worst_lower=(coords[i_low].tolist(), float(gap_low[i_low])),
        worst_upper=(coords[i_up].tolist(), float(gap_up[i_up])),
    )


@dataclass
class ContinuationResult:
    """All stages of an eps-continuation run (possibly partial on failure)."""

    eps_values: list
    solutions: list
    reports: list
    lipschitz_values: list
    lipschitz_flag: bool
    stage_gaps: list  # max |u_{j+1} - u_j| between consecutive stages
    failed_stage: int = None
    message: str = "ok"


def continuation_in_eps(k, f, boundary, grid, schedule, config=None):
    """Solve along a strictly decreasing eps schedule with warm starts.

    `f` may be a single RhsSpec or a callable eps -> RhsSpec (per-stage data).
    Flags when the Lipschitz estimate grows beyond twice its value at the
    largest eps.  A stage failure aborts and returns the partial results.
    """
    schedule = [float(e) for e in schedule]
    if not schedule or any(e <= 0 for e in schedule):
        raise DomainError("schedule must be positive")
    if any(b >= a for a, b in zip(schedule, schedule[1:])):
        raise DomainError("schedule must be strictly decreasing")
    result = ContinuationResult(eps_values=[], solutions=[], reports=[],
                                lipschitz_values=[], lipschitz_flag=False, stage_gaps=[])
    warm = None
    for stage, eps in enumerate(schedule):
        f_stage = f(eps) if callable(f) else f
        try:
            sol, rep = solve_regularized(k, eps, f_stage, boundary, grid,
                                         config=config, warm_start=warm)
        except ConvergenceError as exc:
            result.failed_stage = stage
            result.message = f"stage {stage} (eps={eps}) failed: {exc}"
            return result
        if warm is not None:
            result.stage_gaps.append(float(np.max(np.abs(sol.values - warm.values))))
        result.eps_values.append(eps)
        result.solutions.append(sol)
        result.reports.append(rep)
        result.lipschitz_values.append(rep.lipschitz_estimate)
        warm = sol
    first = result.lipschitz_values[0]
    result.lipschitz_flag = any(v > 2.0 * first for v in result.lipschitz_values)
    return result
