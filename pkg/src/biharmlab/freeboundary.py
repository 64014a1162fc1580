"""Free-boundary machinery: positivity sets, boundary extraction, flatness
norms, normalization, normalized-direction search, blow-up traces, normal
fields and Holder-exponent fits.

Scaling conventions.  Solutions grow like distance cubed from the free
boundary, so the positivity threshold scales with h^3 and rescalings divide
by the cube of the scale.  A field is *normalized* when the L2(B_1) norm of
its third-derivative tensor equals sqrt(|B_1|/2), the value attained by the
canonical half-space profile (1/6)(x_n)_+^3.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field as dc_field

import numpy as np
from skimage import measure as sk_measure

from .grid import GridSpec, ScalarField, SubRegion, ball, sample_field, square
from .operators import (
    _multiplicity,
    gradient,
    laplacian,
    norm_l2,
    norm_sobolev,
    rescale,
    third_derivatives,
)
from .oracles import HalfspaceCubic, omega_norm
from . import nta as nta_mod

__all__ = [
    "positivity_set",
    "FreeBoundary",
    "extract_free_boundary",
    "flatness",
    "tangential_gradient",
    "normalize",
    "NormalizeInfo",
    "DirectionResult",
    "normalized_direction",
    "direction_objective",
    "direction_sweep",
    "BlowupTrace",
    "blowup_sequence",
    "discretization_floor",
    "NormalFieldFit",
    "normal_field_and_modulus",
    "ExponentFit",
    "holder_exponent",
    "FlatnessReport",
    "class_membership",
    "write_boundary_csv",
]

DEFAULT_THRESHOLD_COEFF = 0.1  # theta(h) = coeff * h^3; keeps the detected
# boundary of a canonical cubic profile within one cell of the true one


# ---------------------------------------------------------------------------
# positivity set and free boundary
# ---------------------------------------------------------------------------

def positivity_set(u: ScalarField, threshold_coeff: float = DEFAULT_THRESHOLD_COEFF) -> np.ndarray:
    """Nodes with u > theta(h), theta = coeff * h^3 (cubic growth scaling)."""
    theta = threshold_coeff * u.grid.h**3
    out = np.zeros(u.grid.shape, dtype=bool)
    out[u.valid] = u.values[u.valid] > theta
    return out


@dataclass
class FreeBoundary:
    """Ordered points on the positivity boundary with unit normals pointing
    into the positivity set; ``segments`` indexes contiguous runs."""

    points: np.ndarray            # (N, dim)
    normals: np.ndarray           # (N, dim)
    segments: list[slice] = dc_field(default_factory=list)

    def __len__(self) -> int:
        return self.points.shape[0]

    def as_graph(self, axis: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray] | None:
        """Height-function representation over the tangent axis, or None if
        the boundary is not single-valued over it."""
        if self.points.shape[1] != 2 or len(self) < 2:
            return None
        nbar = self.normals.mean(axis=0)
        nn = np.linalg.norm(nbar)
        if axis is None:
            if nn < 1e-12:
                return None
            nbar = nbar / nn
        else:
            nbar = np.asarray(axis, dtype=float)
            nbar = nbar / np.linalg.norm(nbar)
        tang = np.array([-nbar[1], nbar[0]])
        t = self.points @ tang
        hgt = self.points @ nbar
        order = np.argsort(t)
        t, hgt = t[order], hgt[order]
        if np.any(np.diff(t) <= 0):
            return None
        return t, hgt


def write_boundary_csv(fbd: "FreeBoundary", path) -> None:
    """Polyline CSV: segment id, point coordinates, unit normal."""
    import csv

    dim = fbd.points.shape[1]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["segment"] + [f"x{d}" for d in range(dim)] + [f"n{d}" for d in range(dim)])
        for si, seg in enumerate(fbd.segments or [slice(0, len(fbd.points))]):
            for p, nn in zip(fbd.points[seg], fbd.normals[seg]):
                w.writerow([si] + [f"{v:.17g}" for v in p] + [f"{v:.17g}" for v in nn])


def _interp_nearest(u: ScalarField, pts: np.ndarray) -> np.ndarray:
    g = u.grid
    axes = g.axes()
    idx = []
    for d in range(g.dimension):
        i = np.clip(np.round((pts[:, d] - axes[d][0]) / g.h).astype(int), 0, g.shape[d] - 1)
        idx.append(i)
    return u.values[tuple(idx)]


def extract_free_boundary(u: ScalarField, threshold_coeff: float = DEFAULT_THRESHOLD_COEFF,
                          edge_margin: float | None = None) -> FreeBoundary:
    """Trace the positivity boundary inside the domain with linear sub-cell
    placement (1D: root bracketing; 2D: marching-squares contours).  Points
    within ``edge_margin`` (default 3h) of the active-mask edge belong to the
    domain boundary, not the free boundary, and are dropped.
    """
    g = u.grid
    theta = threshold_coeff * g.h**3
    mask = positivity_set(u, threshold_coeff)
    if not mask.any() or mask.all():
        raise ValueError("positivity set is empty or fills the domain")
    if edge_margin is None:
        edge_margin = 3.0 * g.h

    if g.dimension == 1:
        x = g.axes()[0]
        w = np.where(u.valid, u.values, -theta) - theta
        s = np.sign(w)
        pts, nrm = [], []
        for i in np.flatnonzero(s[:-1] * s[1:] < 0):
            t = w[i] / (w[i] - w[i + 1])
            xx = x[i] + t * g.h
            if xx - x[0] < edge_margin or x[-1] - xx < edge_margin:
                continue
            pts.append([xx])
            nrm.append([1.0 if w[i] < w[i + 1] else -1.0])  # into the positive side
        if not pts:
            raise ValueError("no free boundary found")
        P = np.asarray(pts)
        return FreeBoundary(P, np.asarray(nrm), [slice(0, len(P))])

    # 2D: level set of u - theta, with the outside filled below the level
    w = np.where(u.valid, u.values, -theta) - theta
    contours = sk_measure.find_contours(w, 0.0)
    axes = g.axes()
    # distance (in cells) to the active-mask edge, to clip off domain-boundary pieces
    from scipy import ndimage

    edge_d = ndimage.distance_transform_edt(u.valid) * g.h
    pts_all, nrm_all, segs = [], [], []
    for cont in contours:
        pts = np.stack([axes[0][0] + cont[:, 0] * g.h, axes[1][0] + cont[:, 1] * g.h], axis=1)
        ic = np.clip(np.round(cont[:, 0]).astype(int), 0, g.shape[0] - 1)
        jc = np.clip(np.round(cont[:, 1]).astype(int), 0, g.shape[1] - 1)
        keep = edge_d[ic, jc] > edge_margin
        # split into contiguous kept runs
        start = None
        for k in range(len(pts) + 1):
            inside = k < len(pts) and keep[k]
            if inside and start is None:
                start = k
            elif not inside and start is not None:
                run = pts[start:k]
                if len(run) >= 2:
                    # tangents from a smoothed copy: marching-squares runs
                    # stair-step at the cell scale and would jitter them
                    if len(run) >= 7:
                        kernel = np.ones(5) / 5.0
                        sm = np.stack(
                            [np.convolve(np.pad(run[:, d], 2, mode="edge"), kernel, mode="valid")
                             for d in range(2)], axis=1)
                    else:
                        sm = run
                    tang = np.gradient(sm, axis=0)
                    tt = tang / np.maximum(np.linalg.norm(tang, axis=1, keepdims=True), 1e-300)
                    nn = np.stack([-tt[:, 1], tt[:, 0]], axis=1)
                    # orient into the positivity set
                    d = 1.5 * g.h
                    up = _interp_nearest(u, run + d * nn)
                    dn = _interp_nearest(u, run - d * nn)
                    flip = np.nan_to_num(dn, nan=-np.inf) > np.nan_to_num(up, nan=-np.inf)
                    nn[flip] *= -1.0
                    a = len(pts_all)
                    pts_all.extend(run)
                    nrm_all.extend(nn)
                    segs.append(slice(a, a + len(run)))
                start = None
    if not pts_all:
        raise ValueError("no free boundary found inside the domain")
    return FreeBoundary(np.asarray(pts_all), np.asarray(nrm_all), segs)


# ---------------------------------------------------------------------------
# flatness and normalization
# ---------------------------------------------------------------------------

def _unit(eta) -> np.ndarray:
    eta = np.atleast_1d(np.asarray(eta, dtype=float))
    if abs(np.linalg.norm(eta) - 1.0) > 1e-10:
        raise ValueError("direction must be a unit vector")
    return eta


def tangential_gradient(u: ScalarField, eta) -> list[ScalarField]:
    """Components of grad u - eta (eta . grad u)."""
    eta = _unit(eta)
    G = gradient(u)
    if len(G) != eta.size:
        raise ValueError("direction dimension mismatch")
    dot = G[0] * float(eta[0])
    for i in range(1, len(G)):
        dot = dot + G[i] * float(eta[i])
    return [G[i] - dot * float(eta[i]) for i in range(len(G))]


def flatness(u: ScalarField, eta, region: SubRegion) -> float:
    """W^{2,2} norm of the tangential gradient over ``region`` (component
    norms summed in quadrature): zero iff the field is one-dimensional
    along ``eta`` there."""
    comps = tangential_gradient(u, eta)
    return float(np.sqrt(sum(norm_sobolev(c, 2, region) ** 2 for c in comps)))


def d3_norm(u: ScalarField, region: SubRegion) -> float:
    """L2 norm of the full third-derivative tensor over ``region``."""
    total = 0.0
    for idx, d in third_derivatives(u).items():
        total += _multiplicity(idx) * norm_l2(d, region) ** 2
    return float(np.sqrt(total))


@dataclass
class NormalizeInfo:
    factor: float
    d3_b1: float
    kappa_check: float


def normalize(u: ScalarField, r1: float = 1.0, r2: float = 2.0,
              center=None) -> tuple[ScalarField, NormalizeInfo]:
    """Scale so the third-derivative tensor has L2 norm sqrt(|B_1|/2) on B_{r1}.

    Idempotent by construction (the same discrete norm is rescaled to the
    target exactly).  Also reports the post-scaling norm on B_{r2}, the bound
    checked against kappa in class membership.  A vanishing third-derivative
    norm (a quadratic field, no blow-up content) is rejected.
    """
    dim = u.grid.dimension
    if center is None:
        center = (0.0,) * dim
    b1 = SubRegion(tuple(center), r1)
    b2 = SubRegion(tuple(center), r2)
    n1 = d3_norm(u, b1)
    # roundoff floor of the third-difference stencils: below it the field has
    # no cubic content (it is a quadratic up to noise)
    floor = 1e-12 * u.max_abs() / u.grid.h**3
    if n1 <= floor:
        raise ValueError("third-derivative norm vanishes; field has no cubic content")
    factor = omega_norm(dim) / n1
    if abs(factor - 1.0) < 8 * np.finfo(float).eps:
        factor = 1.0  # already normalized: idempotence is exact
    scaled = u * factor
    n2 = d3_norm(u, b2) * factor
    return scaled, NormalizeInfo(factor=factor, d3_b1=n1, kappa_check=n2)


# ---------------------------------------------------------------------------
# normalized coordinate direction
# ---------------------------------------------------------------------------

@dataclass
class DirectionResult:
    eta: np.ndarray
    gram: np.ndarray
    eigenvalues: np.ndarray
    objective: float
    degenerate: bool


def _grad_lap(u: ScalarField) -> list[ScalarField]:
    return gradient(laplacian(u))

def _gram(comps: list[ScalarField], region: SubRegion) -> np.ndarray:
    g = comps[0].grid
    sel = region.select(g)
    for c in comps:
        sel = sel & c.valid
    if not sel.any():
        raise ValueError("region selects no valid nodes")
    hn = g.h**g.dimension
    n = len(comps)
    G = np.zeros((n, n))
    vals = [c.values[sel] for c in comps]
    for i in range(n):
        for j in range(i, n):
            G[i, j] = G[j, i] = float(np.sum(vals[i] * vals[j]) * hn)
    return G


def normalized_direction(u: ScalarField, region: SubRegion | None = None) -> DirectionResult:
    """Axis minimizing the tangential content of grad(Lap u) over the region.

    The squared objective ||grad'_eta Lap u||^2 equals ||grad Lap u||^2 -
    eta^T G eta with G the Gram matrix of the components, so the minimizer is
    the top eigenvector of G (an exact algebraic identity).  Oriented so the
    last component is nonnegative; a degenerate top eigenvalue is flagged and
    broken deterministically by smallest index.
    """
    if region is None:
        region = ball(1.0, dim=u.grid.dimension)
    comps = _grad_lap(u)
    G = _gram(comps, region)
    tr = float(np.trace(G))
    floor = (1e-12 * u.max_abs() / u.grid.h**3) ** 2
    if tr <= floor:
        raise ValueError("no third-derivative content in the region")
    evals, evecs = np.linalg.eigh(G)  # ascending
    top = evals[-1]
    gap = (evals[-1] - evals[-2]) / max(top, 1e-300) if G.shape[0] > 1 else 1.0
    degenerate = bool(gap < 1e-9)
    eta = evecs[:, -1]
    # orientation: last component nonnegative, deterministic tie-break below
    k = eta.size - 1
    while k >= 0 and abs(eta[k]) < 1e-14:
        k -= 1
    if k >= 0 and eta[k] < 0:
        eta = -eta
    objective = max(tr - float(eta @ G @ eta), 0.0)
    return DirectionResult(eta=eta, gram=G, eigenvalues=evals, objective=objective, degenerate=degenerate)


def direction_objective(u: ScalarField, eta, region: SubRegion | None = None) -> float:
    """||grad'_eta Lap u||^2_{L2(region)} evaluated directly from the fields."""
    if region is None:
        region = ball(1.0, dim=u.grid.dimension)
    eta = _unit(eta)
    comps = _grad_lap(u)
    dot = comps[0] * float(eta[0])
    for i in range(1, len(comps)):
        dot = dot + comps[i] * float(eta[i])
    tang = [comps[i] - dot * float(eta[i]) for i in range(len(comps))]
    return float(sum(norm_l2(c, region) ** 2 for c in tang))


def direction_sweep(u: ScalarField, n_angles: int = 3600,
                    region: SubRegion | None = None) -> tuple[np.ndarray, float, np.ndarray]:
    """Exhaustive 2D sweep of the direction objective; returns (best eta,
    best objective, all objectives)."""
    if u.grid.dimension != 2:
        raise ValueError("sweep is 2D")
    if region is None:
        region = ball(1.0)
    comps = _grad_lap(u)
    sel = region.select(u.grid) & comps[0].valid & comps[1].valid
    hn = u.grid.h**2
    g1 = comps[0].values[sel]
    g2 = comps[1].values[sel]
    thetas = np.linspace(0.0, np.pi, n_angles, endpoint=False)
    objs = np.empty(n_angles)
    for k, th in enumerate(thetas):
        e1, e2 = np.sin(th), np.cos(th)
        d = e1 * g1 + e2 * g2
        objs[k] = (np.sum(g1 * g1) + np.sum(g2 * g2) - np.sum(d * d)) * hn
    kbest = int(np.argmin(objs))
    th = thetas[kbest]
    eta = np.array([np.sin(th), np.cos(th)])
    if eta[-1] < 0:
        eta = -eta
    return eta, float(objs[kbest]), objs


# ---------------------------------------------------------------------------
# blow-up traces
# ---------------------------------------------------------------------------

@dataclass
class BlowupTrace:
    s: float
    lambda_weight: float
    values: np.ndarray            # A_k, k = 0..K
    directions: np.ndarray        # (K+1, dim) frame axis per step
    floors: np.ndarray            # per-step pipeline noise level
    fit_used: np.ndarray          # bool per k: entered the decay fit
    beta_hat: float | None
    alpha_hat: float | None
    eta_limit: np.ndarray | None
    at_floor: bool
    r2: float | None = None

    @property
    def floor(self) -> float:
        """Worst per-step noise level past the initial frame."""
        return float(np.max(self.floors[1:])) if len(self.floors) > 1 else float(self.floors[0])

    def to_dict(self) -> dict:
        return {
            "s": self.s,
            "lambda_weight": self.lambda_weight,
            "A": [float(a) for a in self.values],
            "directions": [[float(x) for x in d] for d in self.directions],
            "floors": [float(f) for f in self.floors],
            "fit_used": [bool(b) for b in self.fit_used],
            "beta_hat": self.beta_hat,
            "alpha_hat": self.alpha_hat,
            "eta_limit": [float(x) for x in self.eta_limit] if self.eta_limit is not None else None,
            "at_floor": self.at_floor,
            "r2": self.r2,
        }


def _default_work_grid(dim: int, n: int = 181) -> GridSpec:
    if dim == 1:
        from .grid import interval

        return interval(-2.25, 2.25, n)
    return square(2.25, n)


def _resample(src: ScalarField, x0: np.ndarray, scale: float, target: GridSpec, power: float) -> ScalarField:
    """rescale() without the (0,1) restriction, for the k = 0 working copy."""
    if scale < 1.0:
        return rescale(src, x0, scale, target, power=power)
    from scipy import ndimage

    tcoords = target.coords()
    idx = []
    for axis in range(src.grid.dimension):
        lo, _ = src.grid.extent[axis]
        idx.append(((scale * tcoords[axis] + x0[axis]) - lo) / src.grid.h)
    idx_arr = np.stack([i.reshape(-1) for i in idx])
    for axis in range(src.grid.dimension):
        if np.any(idx_arr[axis] < 2.0) or np.any(idx_arr[axis] > src.grid.shape[axis] - 3.0):
            raise ValueError("working grid leaves the source domain")
    filled = np.where(src.valid, src.values, 0.0)
    vals = ndimage.map_coordinates(filled, idx_arr, order=3, mode="nearest").reshape(target.shape)
    return ScalarField(target, vals / scale**power, np.ones(target.shape, dtype=bool))


def _working_field(source, x0: np.ndarray, scale: float, work: GridSpec) -> ScalarField:
    """Sample x -> source(scale x + x0) / scale^3 on the working grid."""
    if isinstance(source, ScalarField):
        return _resample(source, x0, scale, work, power=3.0)
    fn = getattr(source, "value", source)
    coords = work.coords()
    pts = [scale * c + x0[d] for d, c in enumerate(coords)]
    vals = np.asarray(fn(*pts), dtype=float) / scale**3
    return ScalarField(work, vals, np.ones(work.shape, dtype=bool))


def _trace_values(source, s: float, K: int, lam: float, work: GridSpec,
                  x0: np.ndarray, base_scale: float, e0: np.ndarray):
    dim = work.dimension
    b1 = ball(1.0, dim=dim)
    b2 = ball(2.0, dim=dim)
    directions = [np.asarray(e0, dtype=float)]
    values = []
    last_field = None
    for k in range(K + 1):
        fk = _working_field(source, x0, base_scale * s**k, work)
        last_field = fk
        if k == 0:
            ek = directions[0]
        else:
            res = normalized_direction(fk, b1)
            ek = res.eta if res.eta @ directions[-1] >= 0 else -res.eta
            directions.append(ek)
        e_prev = directions[k - 1] if k >= 1 else directions[0]
        d3 = d3_norm(fk, b1)
        if d3 <= 1e-300:
            values.append(0.0)
            continue
        lap_term = np.sqrt(direction_objective(fk, ek, b1))
        flat_term = flatness(fk, e_prev, b2)
        values.append((lam * lap_term + flat_term) / d3)
    return np.asarray(values), np.asarray(directions), last_field


_FLOOR_CACHE: dict[tuple, np.ndarray] = {}


def discretization_floor(s: float, K: int, lambda_weight: float, work: GridSpec,
                         source_grid: GridSpec | None = None,
                         base_scale: float = 1.0) -> np.ndarray:
    """Per-step trace values of an exactly one-dimensional profile (a rotated
    half-space cubic) on the same pipeline: everything below is noise.

    When the blow-up source is a sampled field, the probe is itself sampled
    on the source grid so the floor includes the interpolation error, which
    dominates at deep rescaling steps where the zoom window spans only a few
    source cells.
    """
    key = (round(s, 12), K, round(lambda_weight, 12), work.dimension, work.shape, work.extent,
           None if source_grid is None else (source_grid.shape, source_grid.extent),
           round(base_scale, 12))
    if key not in _FLOOR_CACHE:
        if work.dimension == 1:
            _FLOOR_CACHE[key] = np.full(K + 1, 1e-14)
        else:
            # exactly one-dimensional probe, started in its own frame: the
            # whole trace is pipeline noise
            theta = np.deg2rad(30.0)
            probe = HalfspaceCubic((0.0, 1.0)).rotated(theta)
            source = probe if source_grid is None else sample_field(probe, source_grid)
            vals, _, _ = _trace_values(
                source, s, K, lambda_weight, work,
                x0=np.zeros(2), base_scale=base_scale,
                e0=np.array([-np.sin(theta), np.cos(theta)]),
            )
            _FLOOR_CACHE[key] = np.maximum(vals, 1e-14)
    return _FLOOR_CACHE[key].copy()


def blowup_sequence(source, s: float, K: int, lambda_weight: float = 1.0,
                    work: GridSpec | None = None, x0=None,
                    initial_direction=None) -> BlowupTrace:
    """Iterated rescale-renormalize trace at a free boundary point.

    Per step k the source is rescaled by s^k (население an off-origin ``x0``
    first re-centers at half scale), the frame axis is recomputed from the
    rescaled field, and the decay quantity A_k combines the weighted
    tangential content of grad(Lap u) on B_1 with the tangential W^{2,2}
    flatness on B_2 (previous step's axis), normalized by the D^3 norm on
    B_1.  The geometric rate beta is fit on log A_k above ten times the
    discretization floor; alpha = log(beta)/log(s).
    """
    if not (0.25 < s < 0.5):
        raise ValueError("scale s must lie in (1/4, 1/2)")
    if K < 1:
        raise ValueError("need at least one rescaling step")
    dim = source.grid.dimension if isinstance(source, ScalarField) else getattr(source, "dimension", 2)
    if work is None:
        work = _default_work_grid(dim)
    if x0 is None:
        x0 = np.zeros(dim)
        base_scale = 1.0
    else:
        x0 = np.atleast_1d(np.asarray(x0, dtype=float))
        base_scale = 0.5  # re-center at half scale before iterating
    if initial_direction is None:
        e0 = np.zeros(dim)
        e0[-1] = 1.0
    else:
        e0 = _unit(initial_direction)

    values, directions, last_field = _trace_values(source, s, K, lambda_weight, work, x0, base_scale, e0)
    src_grid = source.grid if isinstance(source, ScalarField) else None
    floors = discretization_floor(s, K, lambda_weight, work, source_grid=src_grid, base_scale=base_scale)
    fit_used = values > 10.0 * floors
    fit_used[0] = fit_used[0] and values[0] > 0
    beta = alpha = r2 = None
    at_floor = not bool(fit_used[1:].any())
    ks = np.flatnonzero(fit_used)
    if ks.size >= 2:
        logs = np.log(values[ks])
        slope, intercept = np.polyfit(ks, logs, 1)
        beta = float(np.exp(slope))
        alpha = float(np.log(beta) / np.log(s))
        pred = slope * ks + intercept
        ss_res = float(np.sum((logs - pred) ** 2))
        ss_tot = float(np.sum((logs - logs.mean()) ** 2))
        r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0

    # orient the limit direction toward the positivity side of the last field
    eta_limit = directions[-1].copy()
    if last_field is not None:
        probe_pts = 0.5 * eta_limit
        up = _interp_nearest(last_field, probe_pts[None, :] if dim == 2 else probe_pts.reshape(1, 1))
        dn = _interp_nearest(last_field, -probe_pts[None, :] if dim == 2 else -probe_pts.reshape(1, 1))
        if np.nan_to_num(dn, nan=-np.inf) > np.nan_to_num(up, nan=-np.inf):
            eta_limit = -eta_limit
    return BlowupTrace(
        s=s, lambda_weight=lambda_weight, values=values, directions=directions,
        floors=floors, fit_used=fit_used, beta_hat=beta, alpha_hat=alpha,
        eta_limit=eta_limit, at_floor=at_floor, r2=r2,
    )


# ---------------------------------------------------------------------------
# normal field along the free boundary and its Holder modulus
# ---------------------------------------------------------------------------

@dataclass
class NormalFieldFit:
    points: np.ndarray
    normals: np.ndarray
    alpha_hat: float | None
    c_hat: float | None
    r2: float | None
    n_pairs: int
    exact_constant: bool


def normal_field_and_modulus(fb: FreeBoundary, u: ScalarField, s: float = 0.4, K: int = 3,
                             work: GridSpec | None = None, stride: int = 1,
                             max_points: int = 24,
                             max_pair_distance: float | None = None) -> NormalFieldFit:
    """Blow-up normal at sampled boundary points plus a Holder-modulus fit
    |eta_x - eta_y| <= C |x - y|^alpha by log-log regression over point pairs.

    Pairs further apart than ``max_pair_distance`` (default: a third of the
    sampled span) are excluded: beyond the feature wavelength the normal
    field need not be monotone and would corrupt the modulus fit.
    """
    if len(fb) < 3:
        raise ValueError("need at least 3 boundary points")
    dim = u.grid.dimension
    if work is None:
        work = _default_work_grid(dim, n=121)
    # margin: the recentered working copy samples base_scale * extent around x0
    reach = 0.5 * max(abs(e) for ex in work.extent for e in ex) + 4 * u.grid.h
    pts = fb.points[::stride]
    with_margin = [
        p for p in pts
        if all(p[d] - reach >= u.grid.extent[d][0] and p[d] + reach <= u.grid.extent[d][1]
               for d in range(dim))
    ]
    if len(with_margin) < 3:
        raise ValueError("fewer than 3 boundary points have enough interior margin")
    pts = np.asarray(with_margin)
    if len(pts) > max_points:
        pts = pts[np.linspace(0, len(pts) - 1, max_points).astype(int)]
    sel_pts, normals = [], []
    for p in pts:
        trace = blowup_sequence(u, s, K, work=work, x0=p)
        sel_pts.append(p)
        normals.append(trace.eta_limit)
    P = np.asarray(sel_pts)
    N = np.asarray(normals)
    span = float(np.max(np.linalg.norm(P - P[0], axis=1)))
    if max_pair_distance is None:
        max_pair_distance = span / 3.0 if span > 0 else np.inf
    dxs, dns = [], []
    for i in range(len(P)):
        for j in range(i + 1, len(P)):
            dn = float(np.linalg.norm(N[i] - N[j]))
            dx = float(np.linalg.norm(P[i] - P[j]))
            if dx <= 0 or dx > max_pair_distance:
                continue
            if dn < 1e-12:
                continue
            dxs.append(dx)
            dns.append(dn)
    if len(dxs) < 3:
        return NormalFieldFit(P, N, None, None, None, len(dxs), exact_constant=True)
    lx, ln = np.log(dxs), np.log(dns)
    slope, intercept = np.polyfit(lx, ln, 1)
    pred = slope * lx + intercept
    ss_res = float(np.sum((ln - pred) ** 2))
    ss_tot = float(np.sum((ln - ln.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return NormalFieldFit(P, N, float(slope), float(np.exp(intercept)), r2, len(dxs), exact_constant=False)


# ---------------------------------------------------------------------------
# Holder exponent of sup-growth
# ---------------------------------------------------------------------------

@dataclass
class ExponentFit:
    alpha: float
    intercept: float
    radii: np.ndarray
    sups: np.ndarray
    dropped: int
    r2: float


def holder_exponent(f, x0, r_range: tuple[float, float], n_radii: int = 12,
                    n_angles: int = 720) -> ExponentFit:
    """Least-squares slope of log sup_{B_r(x0)} |f| against log r.

    ``f`` may be a ScalarField (node maxima over balls) or a callable/oracle
    (dense polar sampling with cumulative maxima).  Radii with zero supremum
    carry no information and are dropped with a warning.
    """
    r_min, r_max = r_range
    if not (0 < r_min < r_max):
        raise ValueError("need 0 < r_min < r_max")
    radii = np.geomspace(r_min, r_max, n_radii)
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    sups = np.empty(n_radii)
    if isinstance(f, ScalarField):
        if r_min < 2 * f.grid.h:
            raise ValueError("r_min under-resolved: need r_min >= 2h")
        for i, r in enumerate(radii):
            sups[i] = float(np.max(np.abs(f.values[SubRegion(tuple(x0), r).select(f.grid) & f.valid])))
    else:
        fn = getattr(f, "value", f)
        rs = np.geomspace(r_min / 8.0, r_max, n_radii * 16)
        th = np.linspace(-np.pi, np.pi, n_angles, endpoint=False)
        ring_max = np.empty(rs.size)
        if x0.size == 2:
            ct, st = np.cos(th), np.sin(th)
            for i, r in enumerate(rs):
                ring_max[i] = float(np.max(np.abs(fn(x0[0] + r * ct, x0[1] + r * st))))
        else:
            for i, r in enumerate(rs):
                ring_max[i] = float(max(abs(fn(x0[0] + r)), abs(fn(x0[0] - r))))
        cum = np.maximum.accumulate(ring_max)
        sups = np.interp(radii, rs, cum)
    keep = sups > 0.0
    dropped = int((~keep).sum())
    if dropped:
        warnings.warn(f"dropped {dropped} radii with zero supremum", stacklevel=2)
    if keep.sum() < 2:
        raise ValueError("not enough radii with positive supremum")
    lr, ls = np.log(radii[keep]), np.log(sups[keep])
    slope, intercept = np.polyfit(lr, ls, 1)
    pred = slope * lr + intercept
    ss_res = float(np.sum((ls - pred) ** 2))
    ss_tot = float(np.sum((ls - ls.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return ExponentFit(float(slope), float(intercept), radii, sups, dropped, r2)


# ---------------------------------------------------------------------------
# class membership
# ---------------------------------------------------------------------------

@dataclass
class FlatnessReport:
    epsilon_hat: float
    normalization_factor: float
    kappa_check: float
    kappa_ok: bool
    vanish_t_measured: float
    vanish_ok: bool
    nta_ok: bool
    nta_details: dict
    member: bool
    kappa: float
    rho: float
    epsilon: float
    t: float

    def to_dict(self) -> dict:
        return {
            "epsilon_hat": self.epsilon_hat,
            "normalization_factor": self.normalization_factor,
            "kappa_check": self.kappa_check,
            "kappa_ok": self.kappa_ok,
            "vanish_t_measured": self.vanish_t_measured,
            "vanish_ok": self.vanish_ok,
            "nta_ok": self.nta_ok,
            "nta_details": self.nta_details,
            "member": self.member,
            "kappa": self.kappa,
            "rho": self.rho,
            "epsilon": self.epsilon,
            "t": self.t,
        }


def class_membership(u: ScalarField, kappa: float, rho: float, epsilon: float, t: float,
                     threshold_coeff: float = DEFAULT_THRESHOLD_COEFF) -> FlatnessReport:
    """Discrete analogue of the flatness-class test at the origin.

    Four checks: tangential W^{2,2} flatness on B_2 below epsilon (after
    normalization); positivity set an NTA domain with constants r0 = 1/M =
    rho (sampled corkscrew / complement-corkscrew / chain checks); the field
    vanishes on B_2 below height -t; and the D^3 bound kappa on B_2.
    The origin must be a free boundary point within one cell.
    """
    if not (0 < t < 2):
        raise ValueError("need 0 < t < 2")
    g = u.grid
    dim = g.dimension
    mask = positivity_set(u, threshold_coeff)
    coords = g.coords()
    near = sum(c**2 for c in coords) < (1.5 * g.h) ** 2
    if not (mask & near).any() or not (~mask & g.mask & near).any():
        raise ValueError("origin is not a free boundary point (translate the field first)")

    un, info = normalize(u)
    eta = np.zeros(dim)
    eta[-1] = 1.0
    eps_hat = flatness(un, eta, ball(2.0, dim=dim))

    # vanish below -t within B_2
    b2sel = ball(2.0, dim=dim).select(g)
    pos_b2 = mask & b2sel
    xn = coords[-1]
    if pos_b2.any():
        mn = float(np.min(xn[pos_b2]))
        t_measured = max(0.0, -mn)
    else:
        t_measured = 0.0
    vanish_ok = t_measured <= t + 1e-12

    params = nta_mod.NTAParams.coupled(rho)
    nta_res = nta_mod.sampled_nta_verdict(mask, g, params)
    kappa_ok = info.kappa_check < kappa
    member = (eps_hat <= epsilon) and nta_res["verdict"] and vanish_ok and kappa_ok
    return FlatnessReport(
        epsilon_hat=float(eps_hat),
        normalization_factor=info.factor,
        kappa_check=info.kappa_check,
        kappa_ok=kappa_ok,
        vanish_t_measured=t_measured,
        vanish_ok=vanish_ok,
        nta_ok=bool(nta_res["verdict"]),
        nta_details=nta_res,
        member=bool(member),
        kappa=kappa,
        rho=rho,
        epsilon=epsilon,
        t=t,
    )
