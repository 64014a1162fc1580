"""Discrete biharmonic obstacle problem: minimize sum (Lap_h u)^2 h^n over u >= 0
with clamped boundary data.

Discretization.  The energy is the squared 3/5-point Laplacian summed over
every node with a full stencil; clamped data enters through the boundary
closure.  On intervals the boundary node is pinned to g and a ghost value
``u_ghost = u_mirror - 2 h * slope`` encodes the derivative condition; on 2D
domains (rectangles, masked disks) the two outermost node layers of the
active mask form a Dirichlet collar carrying the data (sampled from an oracle
or extended from (g, f) by first-order Taylor), which imposes value and
normal derivative to the same second order as the ghost closure does.

Optimization.  The bound-constrained convex QP is solved by a primal-dual
active-set method (exact sparse solve on the inactive set, KKT-driven set
updates; Hintermueller-Ito-Kunisch style), with an accelerated projected
gradient fallback when the active set cycles.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy import ndimage, sparse
from scipy.sparse import linalg as splinalg

from .grid import DISK, INTERVAL, GridSpec, ScalarField, SubRegion
from .operators import gradient, laplacian, norm_sobolev, norm_sup
from .oracles import RadialBump

log = logging.getLogger(__name__)

__all__ = [
    "BiharmonicProblem",
    "SolverConfig",
    "KKTReport",
    "QuadraticModel",
    "SolverError",
    "problem_interval",
    "problem_from_oracle",
    "problem_from_boundary_data",
    "assemble",
    "solve",
    "contact_mask",
    "transfer_mask",
    "kkt_residuals",
    "zeta_diagnostic",
    "regularity_ratios",
    "RegularityRatios",
]

_PLUS = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)


class SolverError(RuntimeError):
    """Non-convergence; carries the best iterate and its residuals."""

    def __init__(self, message: str, field: ScalarField | None = None, report: "KKTReport | None" = None):
        super().__init__(message)
        self.field = field
        self.report = report


@dataclass
class SolverConfig:
    kkt_tol: float = 1e-8            # relative feasibility/complementarity tolerance
    max_iterations: int = 2000       # outer active-set iterations
    linear_solver: str = "direct"    # "direct" or "cg"
    linear_tol: float = 1e-12        # cg relative tolerance
    method: str = "active-set"       # or "projected-gradient"
    start: str = "unconstrained"     # or "all-active"
    fallback_iterations: int = 40000

    def __post_init__(self):
        if self.kkt_tol <= 0 or self.linear_tol <= 0:
            raise ValueError("tolerances must be positive")


@dataclass
class BiharmonicProblem:
    """Grid, Dirichlet data on the closure nodes, and (1D) endpoint slopes.

    ``fixed_values`` is NaN away from the clamped nodes.  The obstacle (zero)
    constrains every remaining active node.  Boundary values must be
    nonnegative: the admissible set needs positive data, relaxed to >= 0 here
    so the one-dimensional family with a flat right end remains expressible.
    """

    grid: GridSpec
    fixed_values: np.ndarray
    slopes: tuple[float, float] | None = None  # 1D: u'(left), u'(right)
    label: str = ""

    def __post_init__(self):
        self.fixed_values = np.asarray(self.fixed_values, dtype=float)
        if self.fixed_values.shape != self.grid.shape:
            raise ValueError("fixed_values shape mismatch")
        fixed = np.isfinite(self.fixed_values)
        if not fixed.any():
            raise ValueError("no boundary data")
        if np.any(self.fixed_values[fixed] < -1e-12):
            raise ValueError("boundary data must be nonnegative")
        if self.grid.domain_shape == INTERVAL:
            if self.slopes is None:
                raise ValueError("interval problems need endpoint slopes")
        elif self.slopes is not None:
            raise ValueError("slopes are only meaningful on intervals")

    @property
    def fixed_mask(self) -> np.ndarray:
        return np.isfinite(self.fixed_values)

    @property
    def free_mask(self) -> np.ndarray:
        return self.grid.mask & ~self.fixed_mask


def problem_interval(lo: float, hi: float, n: int, g: tuple[float, float], slope: tuple[float, float],
                     label: str = "") -> BiharmonicProblem:
    """Clamped interval problem: values g=(g_lo, g_hi) and derivatives
    slope=(u'(lo), u'(hi)).  Note the outward normal derivative at the left
    endpoint is -slope[0]."""
    from .grid import interval as make_interval

    grid = make_interval(lo, hi, n)
    fixed = np.full(grid.shape, np.nan)
    fixed[0] = g[0]
    fixed[-1] = g[1]
    return BiharmonicProblem(grid, fixed, slopes=(float(slope[0]), float(slope[1])), label=label)


def _collar_mask(mask: np.ndarray, depth: int = 2) -> np.ndarray:
    """The ``depth`` outermost node layers of ``mask`` (4-connectivity)."""
    inner = ndimage.binary_erosion(mask, structure=_PLUS, iterations=depth, border_value=0)
    return mask & ~inner


def problem_from_oracle(grid: GridSpec, oracle, label: str = "") -> BiharmonicProblem:
    """2D problem with the Dirichlet collar sampled from a closed-form oracle."""
    if grid.dimension != 2:
        raise ValueError("use problem_interval for 1D")
    collar = _collar_mask(grid.mask)
    x, y = grid.coords()
    fixed = np.full(grid.shape, np.nan)
    fn = getattr(oracle, "value", oracle)
    fixed[collar] = fn(x[collar], y[collar])
    return BiharmonicProblem(grid, fixed, label=label)


def problem_from_boundary_data(grid: GridSpec, g: np.ndarray, f: np.ndarray, label: str = "") -> BiharmonicProblem:
    """2D problem from per-boundary-node value and outward-normal-derivative
    arrays, ordered by the flat index of the outermost mask layer.

    The second collar layer is filled by the Taylor extension
    g + f * ((x_in - x_b) . nu); on staircase boundaries the normal is taken
    from the mask geometry, so this closure is first-order there.
    """
    if grid.dimension != 2:
        raise ValueError("boundary-array closure is 2D")
    mask = grid.mask
    outer = _collar_mask(mask, 1)
    second = _collar_mask(mask, 2) & ~outer
    b_idx = np.flatnonzero(outer.reshape(-1))
    g = np.asarray(g, dtype=float)
    f = np.asarray(f, dtype=float)
    if g.shape != b_idx.shape or f.shape != b_idx.shape:
        raise ValueError(f"boundary arrays must have length {b_idx.size}")
    fixed = np.full(grid.shape, np.nan)
    fixed.reshape(-1)[b_idx] = g

    # outward normal at boundary nodes from the mask (direction of the complement)
    x, y = grid.coords()
    bi, bj = np.nonzero(outer)
    if grid.domain_shape == DISK:
        cx, cy = grid.center
        nx, ny = x[bi, bj] - cx, y[bi, bj] - cy
    else:
        nx = np.zeros(bi.size)
        ny = np.zeros(bi.size)
        nx[bi == 0] = -1.0
        nx[bi == grid.shape[0] - 1] = 1.0
        ny[bj == 0] = -1.0
        ny[bj == grid.shape[1] - 1] = 1.0
    nrm = np.hypot(nx, ny)
    nrm[nrm == 0] = 1.0
    nx, ny = nx / nrm, ny / nrm

    # nearest boundary node for each second-layer node
    si, sj = np.nonzero(second)
    d2 = (x[si, sj][:, None] - x[bi, bj][None, :]) ** 2 + (y[si, sj][:, None] - y[bi, bj][None, :]) ** 2
    nearest = np.argmin(d2, axis=1)
    dx = x[si, sj] - x[bi, bj][nearest]
    dy = y[si, sj] - y[bi, bj][nearest]
    gb = fixed.reshape(-1)[b_idx]
    ext = gb[nearest] + f[nearest] * (dx * nx[nearest] + dy * ny[nearest])
    fixed[si, sj] = np.maximum(ext, 0.0)
    return BiharmonicProblem(grid, fixed, label=label)


# ---------------------------------------------------------------------------
# assembly
# ---------------------------------------------------------------------------

@dataclass
class QuadraticModel:
    """Energy h^n ||S u_free + c||^2 with S the closure-aware Laplacian rows."""

    problem: BiharmonicProblem
    S: sparse.csr_matrix
    c: np.ndarray
    free_flat: np.ndarray
    hn: float
    closure_rows: np.ndarray = dc_field(default_factory=lambda: np.empty(0, dtype=np.int64))
    _Q: sparse.csc_matrix | None = dc_field(default=None, repr=False)

    def vi_columns(self) -> np.ndarray:
        """Free nodes whose adjoint column avoids the boundary-closure rows:
        there the assembled residual is the interior discrete bilaplacian and
        the variational inequality applies (all free nodes in 2D)."""
        keep = np.ones(self.n_free, dtype=bool)
        if self.closure_rows.size:
            sub = self.S[self.closure_rows]
            keep[np.unique(sub.indices)] = False
        return keep

    @property
    def n_free(self) -> int:
        return self.free_flat.size

    @property
    def Q(self) -> sparse.csc_matrix:
        if self._Q is None:
            self._Q = (self.S.T @ self.S).tocsc()
        return self._Q

    def energy(self, u_free: np.ndarray) -> float:
        r = self.S @ u_free + self.c
        return float(self.hn * np.dot(r, r))

    def residual(self, u_free: np.ndarray) -> np.ndarray:
        """S^T (S u + c): the closure-aware discrete bilaplacian at free nodes."""
        return self.S.T @ (self.S @ u_free + self.c)

    def field_from(self, u_free: np.ndarray) -> ScalarField:
        g = self.problem.grid
        vals = np.where(self.problem.fixed_mask, self.problem.fixed_values, np.nan)
        vals.reshape(-1)[self.free_flat] = u_free
        valid = self.problem.fixed_mask | self.problem.free_mask
        return ScalarField(g, np.where(valid, vals, np.nan), valid)

    def free_part(self, f: ScalarField) -> np.ndarray:
        if f.grid != self.problem.grid:
            raise ValueError("field grid does not match problem grid")
        return f.values.reshape(-1)[self.free_flat].copy()

    def energy_of_field(self, f: ScalarField) -> float:
        return self.energy(self.free_part(f))


def assemble(problem: BiharmonicProblem) -> QuadraticModel:
    grid = problem.grid
    h = grid.h
    if grid.dimension == 1:
        return _assemble_interval(problem)

    mask = grid.mask
    energy_nodes = ndimage.binary_erosion(mask, structure=_PLUS, border_value=0)
    free = problem.free_mask
    fixed = problem.fixed_mask
    if not free.any():
        raise ValueError("no free nodes: grid too small for a two-layer collar")

    nI, nJ = grid.shape
    flat = lambda i, j: i * nJ + j
    col_of = np.full(nI * nJ, -1, dtype=np.int64)
    free_flat = np.flatnonzero(free.reshape(-1))
    col_of[free_flat] = np.arange(free_flat.size)

    ei, ej = np.nonzero(energy_nodes)
    rows_n = ei.size
    c = np.zeros(rows_n)
    data, rows, cols = [], [], []
    offsets = [(0, 0, -4.0), (1, 0, 1.0), (-1, 0, 1.0), (0, 1, 1.0), (0, -1, 1.0)]
    fvals = problem.fixed_values.reshape(-1)
    row_ids = np.arange(rows_n)
    for di, dj, w in offsets:
        nb = flat(ei + di, ej + dj)
        colk = col_of[nb]
        is_free = colk >= 0
        is_fixed = np.isfinite(fvals[nb])
        if not np.all(is_free | is_fixed):
            raise ValueError("energy stencil reaches a node with no value or closure")
        rows.append(row_ids[is_free])
        cols.append(colk[is_free])
        data.append(np.full(is_free.sum(), w / h**2))
        np.add.at(c, row_ids[is_fixed], w / h**2 * fvals[nb[is_fixed]])
    S = sparse.csr_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(rows_n, free_flat.size),
    )
    return QuadraticModel(problem, S, c, free_flat, h**2)


def _assemble_interval(problem: BiharmonicProblem) -> QuadraticModel:
    grid = problem.grid
    n = grid.shape[0]
    if n < 5:
        raise ValueError("interval grid too small")
    h = grid.h
    g0 = problem.fixed_values[0]
    g1 = problem.fixed_values[-1]
    s0, s1 = problem.slopes
    free_flat = np.arange(1, n - 1)
    col_of = np.full(n, -1, dtype=np.int64)
    col_of[free_flat] = np.arange(free_flat.size)

    rows, cols, data = [], [], []
    c = np.zeros(n)

    def add(row, node, w):
        k = col_of[node]
        if k >= 0:
            rows.append(row)
            cols.append(k)
            data.append(w)
        else:
            c[row] += w * (g0 if node == 0 else g1)

    # boundary rows: second-order one-sided Laplacian using the slope data,
    # u''(0) = (-7 u0 + 8 u1 - u2) / (2 h^2) - 3 s / h + O(h^2)
    add(0, 0, -3.5 / h**2)
    add(0, 1, 4.0 / h**2)
    add(0, 2, -0.5 / h**2)
    c[0] += -3.0 * s0 / h
    add(n - 1, n - 1, -3.5 / h**2)
    add(n - 1, n - 2, 4.0 / h**2)
    add(n - 1, n - 3, -0.5 / h**2)
    c[n - 1] += 3.0 * s1 / h
    for i in range(1, n - 1):
        add(i, i - 1, 1.0 / h**2)
        add(i, i, -2.0 / h**2)
        add(i, i + 1, 1.0 / h**2)
    S = sparse.csr_matrix((data, (rows, cols)), shape=(n, free_flat.size))
    return QuadraticModel(problem, S, c, free_flat, h, closure_rows=np.array([0, n - 1], dtype=np.int64))


# ---------------------------------------------------------------------------
# KKT certificate
# ---------------------------------------------------------------------------

@dataclass
class KKTReport:
    """Discrete variational-inequality certificate.

    min_u / min_bilaplacian are the worst primal/dual values over interior
    nodes (>= -tol for a solution); complementarity is the mass-weighted
    pairing sum |u * Lap^2_h u| h^n; measure_mass collects the positive part
    of the discrete bilaplacian, the total contact-measure mass.
    """

    min_u: float
    min_bilaplacian: float
    complementarity: float
    measure_mass: float
    energy: float
    iterations: int
    primal_rel: float
    dual_rel: float
    complementarity_rel: float
    tol: float
    passed: bool
    fallback_used: bool = False
    active_nodes: int = 0
    energy_decreasing: bool = True

    def to_dict(self) -> dict:
        return {
            "min_u": self.min_u,
            "min_bilaplacian": self.min_bilaplacian,
            "complementarity": self.complementarity,
            "measure_mass": self.measure_mass,
            "energy": self.energy,
            "iterations": self.iterations,
            "primal_rel": self.primal_rel,
            "dual_rel": self.dual_rel,
            "complementarity_rel": self.complementarity_rel,
            "tol": self.tol,
            "passed": self.passed,
            "fallback_used": self.fallback_used,
            "active_nodes": self.active_nodes,
            "energy_decreasing": self.energy_decreasing,
        }


def kkt_residuals(u: ScalarField, problem: BiharmonicProblem, tol: float = 1e-8,
                  iterations: int = 0, fallback_used: bool = False,
                  energy_decreasing: bool = True) -> KKTReport:
    """Certificate for any field on the problem grid.

    The dual variable is the assembled discrete bilaplacian S^T(S u + c): in
    2D this is exactly the 13-point stencil at every free node; on intervals
    the two closure-adjacent nodes per end carry the one-sided boundary rows.
    Relative residuals follow QP-solver practice: the primal violation is
    measured against max |u| and the dual/complementarity violations against
    the stationarity-equation scale max(|Q u|, |q|) of the assembled model,
    which is what float64 can actually resolve for a fourth-order operator.
    """
    model = assemble(problem)
    u_free = model.free_part(u)
    free = problem.free_mask
    hn = model.hn
    vi = model.vi_columns()
    bvals = model.residual(u_free)[vi]
    uvals = u_free[vi]
    min_u = float(np.min(u.values[free & u.valid])) if (free & u.valid).any() else 0.0
    min_b = float(np.min(bvals)) if bvals.size else 0.0
    comp = float(np.sum(np.abs(uvals * bvals)) * hn)
    mass = float(np.sum(np.maximum(bvals, 0.0)) * hn)
    energy = model.energy(u_free)
    scale_u = max(float(np.max(np.abs(u.values[u.valid]))), 1e-300)
    q = model.S.T @ model.c
    scale_dual = max(
        float(np.max(np.abs(model.Q @ u_free))) if u_free.size else 0.0,
        float(np.max(np.abs(q))) if q.size else 0.0,
        1e-300,
    )
    primal_rel = max(0.0, -min_u) / scale_u
    dual_rel = max(0.0, -min_b) / scale_dual
    comp_sup = float(np.max(np.abs(uvals * bvals))) if bvals.size else 0.0
    comp_rel = comp_sup / (scale_u * scale_dual)
    passed = primal_rel <= tol and dual_rel <= tol and comp_rel <= tol
    return KKTReport(
        min_u=min_u, min_bilaplacian=min_b, complementarity=comp, measure_mass=mass,
        energy=energy, iterations=iterations, primal_rel=primal_rel, dual_rel=dual_rel,
        complementarity_rel=comp_rel, tol=tol, passed=passed, fallback_used=fallback_used,
        active_nodes=int(np.sum(np.abs(u_free) == 0.0)), energy_decreasing=energy_decreasing,
    )


# ---------------------------------------------------------------------------
# solvers
# ---------------------------------------------------------------------------

def _solve_inactive(Q: sparse.csc_matrix, q: np.ndarray, active: np.ndarray, cfg: SolverConfig) -> np.ndarray:
    u = np.zeros(q.size)
    inact = ~active
    if not inact.any():
        return u
    idx = np.flatnonzero(inact)
    Qi = Q[idx][:, idx].tocsc()
    qi = q[idx]
    if cfg.linear_solver == "cg":
        x, info = splinalg.cg(Qi, qi, rtol=cfg.linear_tol, maxiter=20 * qi.size)
        if info != 0:
            raise SolverError(f"inner cg failed (info={info})")
    else:
        lu = splinalg.splu(Qi)
        x = lu.solve(qi)
        for _ in range(2):  # iterative refinement: the operator is h^-4 conditioned
            res = qi - Qi @ x
            x = x + lu.solve(res)
    u[idx] = x
    return u


def _active_set_solve(model: QuadraticModel, cfg: SolverConfig,
                      start_active: np.ndarray | None = None) -> tuple[np.ndarray, int, bool, bool]:
    """Primal-dual active set with selective updates.

    Per iteration: exact solve on the inactive set, then add the primal
    violators and release only active nodes with strictly negative
    multipliers.  Biactive nodes (u = 0, multiplier 0) stay active, which the
    fourth-order operator needs to keep the contact region pinned.
    """
    Q = model.Q
    q = -(model.S.T @ model.c)
    n = model.n_free
    if start_active is not None:
        active = start_active.copy()
    elif cfg.start == "all-active":
        active = np.ones(n, dtype=bool)
    else:
        active = np.zeros(n, dtype=bool)
    seen: dict[bytes, int] = {}
    u = np.zeros(n)
    guard = 1e-12
    energies: list[float] = []
    for it in range(1, cfg.max_iterations + 1):
        u = _solve_inactive(Q, q, active, cfg)
        energies.append(model.energy(np.maximum(u, 0.0)))
        r = Q @ u - q
        scale_u = max(float(np.max(np.abs(u))) if n else 0.0, 1e-300)
        scale_r = max(float(np.max(np.abs(r))) if n else 0.0, 1e-300)
        add = ~active & (u < -guard * scale_u)
        release = active & (r < -guard * scale_r)
        new_active = (active & ~release) | add
        if np.array_equal(new_active, active):
            log.debug("active-set converged in %d iterations (%d active)", it, int(active.sum()))
            dec = bool(np.all(np.diff(energies) <= 1e-9 * np.abs(energies[:-1]) + 1e-12)) if len(energies) > 1 else True
            return u, it, False, dec
        key = new_active.tobytes()
        if key in seen:
            log.warning("active set cycled at iteration %d; switching to projected gradient", it)
            u2, extra = _projected_gradient(model, cfg, u0=np.maximum(u, 0.0))
            return u2, it + extra, True, True
        seen[key] = it
        active = new_active
    # out of iterations: one fallback attempt
    u2, extra = _projected_gradient(model, cfg, u0=np.maximum(u, 0.0))
    return u2, cfg.max_iterations + extra, True, True


def _projected_gradient(model: QuadraticModel, cfg: SolverConfig, u0: np.ndarray | None = None) -> tuple[np.ndarray, int]:
    """FISTA on the bound-constrained quadratic; monotone safeguard."""
    Q = model.Q
    q = -(model.S.T @ model.c)
    n = model.n_free
    u = np.zeros(n) if u0 is None else u0.copy()
    # Lipschitz constant: power iteration on Q
    v = np.ones(n) / np.sqrt(n)
    L = 1.0
    for _ in range(60):
        w = Q @ v
        L = float(np.linalg.norm(w))
        if L == 0:
            return u, 0
        v = w / L
    L *= 1.01
    scale_q = max(float(np.max(np.abs(q))), L * 1e-300)
    y = u.copy()
    t = 1.0
    best = u.copy()
    best_e = model.energy(u)
    it = 0
    for it in range(1, cfg.fallback_iterations + 1):
        grad = Q @ y - q
        u_new = np.maximum(y - grad / L, 0.0)
        t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        y = u_new + (t - 1.0) / t_new * (u_new - u)
        u, t = u_new, t_new
        if it % 100 == 0:
            e = model.energy(u)
            if e < best_e:
                best_e, best = e, u.copy()
            r = Q @ u - q
            stat = float(np.max(np.abs(r[u > 0]))) if (u > 0).any() else 0.0
            dual = float(np.min(r[u <= 0])) if (u <= 0).any() else 0.0
            if stat <= 1e-2 * cfg.kkt_tol * scale_q + 1e-14 and dual >= -cfg.kkt_tol * scale_q:
                return u, it
    return best, it


def solve(problem: BiharmonicProblem, config: SolverConfig | None = None,
          start_active: np.ndarray | None = None) -> tuple[ScalarField, KKTReport]:
    """Minimize the clamped-plate energy over nonnegative interior values.

    ``start_active`` is an optional boolean grid array marking the initial
    contact guess (used to warm-start refinement ladders).  Returns the
    solution field and its KKT certificate; raises :class:`SolverError`
    (carrying the best iterate) if the certificate fails.
    """
    cfg = config or SolverConfig()
    model = assemble(problem)
    start = None
    if start_active is not None:
        start_active = np.asarray(start_active, dtype=bool)
        if start_active.shape != problem.grid.shape:
            raise ValueError("start_active shape mismatch")
        start = start_active.reshape(-1)[model.free_flat]
    if cfg.method == "projected-gradient":
        u_free, its = _projected_gradient(model, cfg)
        fallback = True
        decreasing = True
    else:
        u_free, its, fallback, decreasing = _active_set_solve(model, cfg, start_active=start)
    u_free = np.maximum(u_free, 0.0)  # clip solver roundoff at the bound
    fld = model.field_from(u_free)
    report = kkt_residuals(fld, problem, tol=cfg.kkt_tol, iterations=its, fallback_used=fallback,
                           energy_decreasing=decreasing)
    if not report.passed:
        raise SolverError(
            f"no KKT-certified solution in {its} iterations "
            f"(primal {report.primal_rel:.2e}, dual {report.dual_rel:.2e}, "
            f"comp {report.complementarity_rel:.2e})",
            field=fld,
            report=report,
        )
    return fld, report


def contact_mask(u: ScalarField, problem: BiharmonicProblem) -> np.ndarray:
    """Grid-shaped boolean contact set (free nodes at the bound)."""
    return problem.free_mask & u.valid & (u.values <= 0.0)


def transfer_mask(mask: np.ndarray, src: GridSpec, dst: GridSpec) -> np.ndarray:
    """Nearest-neighbor transfer of a boolean grid mask between grids (used to
    warm-start refinement ladders)."""
    dcoords = dst.coords()
    idx = []
    for axis in range(src.dimension):
        lo, _ = src.extent[axis]
        idx.append(np.clip((dcoords[axis] - lo) / src.h, 0, src.shape[axis] - 1).reshape(-1))
    vals = ndimage.map_coordinates(mask.astype(np.uint8), np.stack(idx), order=0, mode="nearest")
    return vals.reshape(dst.shape).astype(bool)


# ---------------------------------------------------------------------------
# diagnostics
# ---------------------------------------------------------------------------

def zeta_diagnostic(u: ScalarField, axis: int, center, radius: float) -> float:
    """Sign check sum Lap_h(d_i u) * Lap_h(zeta d_i u) h^n with zeta a smooth
    radial bump; nonpositive (up to tolerance) for converged solutions."""
    zeta = RadialBump(center, radius)
    g = u.grid
    coords = g.coords()
    zvals = zeta.value(*coords)
    du = gradient(u)[axis]
    support = zvals > 0.0
    if np.any(support & ~du.valid):
        raise ValueError("bump support touches the boundary closure region")
    prod_vals = np.where(support, zvals * np.where(du.valid, du.values, 0.0), 0.0)
    prod = ScalarField(g, prod_vals, du.valid | ~support)
    a = laplacian(du)
    b = laplacian(prod)
    sel = a.valid & b.valid
    hn = g.h**g.dimension
    return float(np.sum(a.values[sel] * b.values[sel]) * hn)


@dataclass
class RegularityRatios:
    sup_laplacian_ratio: float
    holder_gradient_ratio: float
    sobolev_norm: float
    alpha: float


def regularity_ratios(u: ScalarField, center=None, scale: float | None = None,
                      alpha: float = 0.5, probes: int = 24) -> RegularityRatios:
    """Interior-regularity sanity ratios: sup |Lap u| on the inner third-ball
    and a sampled C^{1,alpha} gradient quotient, both divided by the W^{2,2}
    norm.  Contract: finite and stable under refinement; no constant asserted.
    """
    g = u.grid
    if center is None:
        center = tuple((lo + hi) / 2.0 for lo, hi in g.extent)
    center = np.atleast_1d(np.asarray(center, dtype=float))
    if scale is None:
        half = min((hi - lo) / 2.0 for lo, hi in g.extent)
        if g.domain_shape == DISK:
            half = g.radius
        scale = 0.9 * half
    w22 = norm_sobolev(u, 2)
    lap = laplacian(u)
    inner = SubRegion(tuple(center), scale / 3.0)
    sup_lap = norm_sup(lap, inner)

    # deterministic golden-angle probe points in the half-scale ball
    kk = np.arange(probes)
    rr = (scale / 2.0) * np.sqrt((kk + 0.5) / probes)
    th = kk * (np.pi * (3.0 - np.sqrt(5.0)))
    if g.dimension == 1:
        pts = center[0] + np.linspace(-scale / 2.0, scale / 2.0, probes)[:, None]
    else:
        pts = np.stack([center[0] + rr * np.cos(th), center[1] + rr * np.sin(th)], axis=1)
    grads = gradient(u)
    axes = g.axes()
    samples = []
    for p in pts:
        idx = tuple(int(round((p[d] - axes[d][0]) / g.h)) for d in range(g.dimension))
        if any(i < 0 or i >= g.shape[d] for d, i in enumerate(idx)):
            continue
        if not all(comp.valid[idx] for comp in grads):
            continue
        xy = np.array([axes[d][idx[d]] for d in range(g.dimension)])
        gv = np.array([comp.values[idx] for comp in grads])
        samples.append((xy, gv))
    quot = 0.0
    for a in range(len(samples)):
        for b in range(a + 1, len(samples)):
            d = np.linalg.norm(samples[a][0] - samples[b][0])
            if d < 2 * g.h:
                continue
            quot = max(quot, float(np.linalg.norm(samples[a][1] - samples[b][1]) / d**alpha))
    return RegularityRatios(
        sup_laplacian_ratio=sup_lap / w22,
        holder_gradient_ratio=quot / w22,
        sobolev_norm=w22,
        alpha=alpha,
    )
