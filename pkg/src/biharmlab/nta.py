"""Discrete non-tangential-accessibility checks on positivity masks:
interior/exterior corkscrew points and greedy Harnack chains.

A domain is NTA (Jerison-Kenig) when it and its complement admit corkscrew
points at every boundary scale and interior points are joined by chains of
balls with uniformly comparable radii.  Here the domain is a boolean node
mask; distances are Euclidean distance transforms to the nearest outside
node center (error at most one cell, absorbed by testing radii >= 4h).
The grid window truncates the complement, so complement queries see only
the complement nodes inside the active window.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy import ndimage

from .grid import GridSpec

__all__ = [
    "NTAParams",
    "CorkscrewResult",
    "HarnackChain",
    "corkscrew",
    "corkscrew_complement",
    "harnack_chain",
    "distance_to_complement",
    "sampled_nta_verdict",
]

_PLUS = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)


@dataclass(frozen=True)
class NTAParams:
    """Corkscrew constant M >= 1, scale cutoff r0, chain separation factor."""

    M: float
    r0: float
    C_chain: float = 4.0

    def __post_init__(self):
        if self.M < 1.0:
            raise ValueError("corkscrew constant must be >= 1")
        if self.r0 <= 0:
            raise ValueError("scale cutoff must be positive")

    @classmethod
    def coupled(cls, rho: float) -> "NTAParams":
        """The coupled preset r0 = 1/M = rho."""
        if not (0 < rho <= 1):
            raise ValueError("rho must lie in (0, 1]")
        return cls(M=1.0 / rho, r0=rho)


@dataclass
class CorkscrewResult:
    success: bool
    point: tuple[float, ...] | None
    clearance: float
    required: float
    reason: str = ""

    def to_dict(self) -> dict:
        return {
            "success": self.success,
            "point": list(self.point) if self.point is not None else None,
            "clearance": self.clearance,
            "required": self.required,
            "reason": self.reason,
        }


def distance_to_complement(mask: np.ndarray, grid: GridSpec) -> np.ndarray:
    """Euclidean distance (physical units) from each node to the nearest node
    outside ``mask``.  Zero outside the mask."""
    return ndimage.distance_transform_edt(mask) * grid.h


def _node_coords(grid: GridSpec):
    return grid.coords()


def corkscrew(mask: np.ndarray, grid: GridSpec, x0, r: float, params: NTAParams,
              dist: np.ndarray | None = None) -> CorkscrewResult:
    """Search the annulus M^-1 r < |P - x0| < r for a mask node with clearance
    above M^-1 r; returns the best point found or a failure with its reason."""
    if r < 2 * grid.h:
        raise ValueError("radius unresolvable: need r >= 2h")
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if dist is None:
        dist = distance_to_complement(mask, grid)
    coords = _node_coords(grid)
    d2 = sum((c - x0[d]) ** 2 for d, c in enumerate(coords))
    inner = r / params.M
    sel = mask & (d2 > inner**2) & (d2 < r**2)
    required = inner
    if not sel.any():
        return CorkscrewResult(False, None, 0.0, required, reason="no domain nodes in annulus")
    clear = np.where(sel, dist, -np.inf)
    best = np.unravel_index(int(np.argmax(clear)), mask.shape)
    best_clear = float(dist[best])
    pt = tuple(float(c[best]) for c in coords)
    if best_clear > required:
        return CorkscrewResult(True, pt, best_clear, required)
    return CorkscrewResult(False, pt, best_clear, required, reason="no annulus node with enough clearance")


def corkscrew_complement(mask: np.ndarray, grid: GridSpec, x0, r: float, params: NTAParams,
                         dist: np.ndarray | None = None) -> CorkscrewResult:
    """Corkscrew condition for the complement of ``mask`` within the active
    window.  A mask filling the window has no complement nodes at all, which
    is reported distinctly."""
    comp = grid.mask & ~mask
    if not comp.any():
        return CorkscrewResult(False, None, 0.0, r / params.M, reason="no complement nodes")
    return corkscrew(comp, grid, x0, r, params, dist=dist)


@dataclass
class HarnackChain:
    centers: np.ndarray           # (l, dim)
    radii: np.ndarray             # (l,)
    length: int
    checks_ok: bool
    clearances: np.ndarray = dc_field(default_factory=lambda: np.empty(0))

    def to_dict(self) -> dict:
        return {
            "centers": [[float(x) for x in c] for c in self.centers],
            "radii": [float(r) for r in self.radii],
            "length": self.length,
            "checks_ok": self.checks_ok,
        }


def _snap(grid: GridSpec, p) -> tuple[int, ...]:
    p = np.atleast_1d(np.asarray(p, dtype=float))
    axes = grid.axes()
    return tuple(
        int(np.clip(round((p[d] - axes[d][0]) / grid.h), 0, grid.shape[d] - 1))
        for d in range(grid.dimension)
    )


def _bfs_path(mask: np.ndarray, start: tuple[int, ...], goal: tuple[int, ...]) -> list[tuple[int, ...]]:
    """Shortest 4-connected path inside the mask via vectorized wave labels."""
    wave = np.full(mask.shape, -1, dtype=np.int32)
    frontier = np.zeros(mask.shape, dtype=bool)
    frontier[start] = True
    wave[start] = 0
    w = 0
    struct = _PLUS if mask.ndim == 2 else np.ones(3, dtype=bool)
    while wave[goal] < 0:
        grown = ndimage.binary_dilation(frontier, structure=struct) & mask & (wave < 0)
        if not grown.any():
            raise ValueError("points disconnected in mask")
        w += 1
        wave[grown] = w
        frontier = grown
    # backtrack
    path = [goal]
    cur = goal
    offsets = [(-1, 0), (1, 0), (0, -1), (0, 1)] if mask.ndim == 2 else [(-1,), (1,)]
    for ww in range(wave[goal] - 1, -1, -1):
        for off in offsets:
            nb = tuple(c + o for c, o in zip(cur, off))
            if all(0 <= nb[d] < mask.shape[d] for d in range(mask.ndim)) and wave[nb] == ww:
                cur = nb
                path.append(cur)
                break
        else:
            raise RuntimeError("backtrack failed")
    path.reverse()
    return path


def harnack_chain(mask: np.ndarray, grid: GridSpec, p1, p2, eps_clearance: float,
                  params: NTAParams, dist: np.ndarray | None = None) -> HarnackChain:
    """Greedy ball chain along a shortest inside-mask path from p1 to p2.

    Each ball has radius half the local boundary clearance and contains the
    next center, so consecutive balls overlap and stay inside the mask; the
    reported length is an upper bound for the optimal chain.  Raises when an
    endpoint is outside the mask, its clearance is below ``eps_clearance``,
    or the points are disconnected.
    """
    if dist is None:
        dist = distance_to_complement(mask, grid)
    a = _snap(grid, p1)
    b = _snap(grid, p2)
    for name, node in (("p1", a), ("p2", b)):
        if not mask[node]:
            raise ValueError(f"{name} is outside the mask")
        if dist[node] <= eps_clearance:
            raise ValueError(f"{name} clearance {dist[node]:.3g} below required {eps_clearance:.3g}")
    path = _bfs_path(mask, a, b)
    axes = grid.axes()

    def xy(node):
        return np.array([axes[d][node[d]] for d in range(grid.dimension)])

    centers, radii, clearances = [], [], []
    k = 0
    target = xy(b)
    while True:
        node = path[k]
        c = xy(node)
        clearance = float(dist[node])
        radius = clearance / 2.0
        if radius <= 0:
            raise RuntimeError("zero-clearance node on path")
        centers.append(c)
        radii.append(radius)
        clearances.append(clearance)
        if np.linalg.norm(target - c) <= radius:
            break
        nxt = k
        for m in range(k + 1, len(path)):
            if np.linalg.norm(xy(path[m]) - c) <= 0.75 * radius:
                nxt = m
            else:
                break
        k = nxt if nxt > k else k + 1
        if k >= len(path):
            k = len(path) - 1
    centers = np.asarray(centers)
    radii = np.asarray(radii)
    clearances = np.asarray(clearances)
    # per-ball comparability: M r > dist(ball, boundary) > r / M, with
    # dist(ball, boundary) = clearance - radius = radius by construction
    ball_dist = clearances - radii
    ok = bool(np.all((params.M * radii > ball_dist - 1e-12) & (ball_dist > radii / params.M - 1e-12)))
    return HarnackChain(centers, radii, int(len(radii)), ok, clearances)


# ---------------------------------------------------------------------------
# sampled verdict over a positivity mask
# ---------------------------------------------------------------------------

def sampled_nta_verdict(mask: np.ndarray, grid: GridSpec, params: NTAParams,
                        n_boundary: int = 6, n_radii: int = 3,
                        within: float = 1.1) -> dict:
    """Spot-check NTA over sampled free-boundary points and a radius ladder.

    This is a finite certificate, not a proof: corkscrew and complement
    corkscrew run at every sampled (point, radius); Harnack chains join
    consecutive interior witnesses.  Returns a JSON-able verdict dictionary.
    """
    h = grid.h
    surface = mask & ndimage.binary_dilation(grid.mask & ~mask, structure=_PLUS)
    # keep only free-boundary nodes: away from the window edge and the domain rim
    rim_d = ndimage.distance_transform_edt(grid.mask) * h
    coords = grid.coords()
    d0 = np.sqrt(sum(c**2 for c in coords))
    cand = surface & (rim_d > 4 * h) & (d0 < within)
    out: dict = {"params": {"M": params.M, "r0": params.r0}, "corkscrew": [], "chains": []}
    if not cand.any():
        out["verdict"] = False
        out["reason"] = "no free-boundary nodes to sample"
        return out
    idx = np.argwhere(cand)
    take = np.linspace(0, len(idx) - 1, min(n_boundary, len(idx))).astype(int)
    samples = idx[take]
    radii = np.geomspace(4 * h, max(0.9 * params.r0, 4.5 * h), n_radii)
    dist_in = distance_to_complement(mask, grid)
    comp = grid.mask & ~mask
    dist_out = distance_to_complement(comp, grid)
    axes = grid.axes()
    all_ok = True
    witnesses = []
    for node in samples:
        x0 = tuple(axes[d][node[d]] for d in range(grid.dimension))
        for r in radii:
            ck = corkscrew(mask, grid, x0, r, params, dist=dist_in)
            ckc = corkscrew_complement(mask, grid, x0, r, params, dist=dist_out)
            out["corkscrew"].append(
                {"x0": list(map(float, x0)), "r": float(r),
                 "interior": ck.to_dict(), "complement": ckc.to_dict()}
            )
            all_ok &= ck.success and ckc.success
            if ck.success and r == radii[-1]:
                witnesses.append(ck)
    for w1, w2 in zip(witnesses[:-1], witnesses[1:]):
        eps = 0.9 * min(w1.clearance, w2.clearance)
        try:
            ch = harnack_chain(mask, grid, w1.point, w2.point, eps, params, dist=dist_in)
            out["chains"].append({"p1": list(w1.point), "p2": list(w2.point),
                                  "length": ch.length, "checks_ok": ch.checks_ok})
            all_ok &= ch.checks_ok
        except ValueError as exc:
            out["chains"].append({"p1": list(w1.point), "p2": list(w2.point), "error": str(exc)})
            all_ok = False
    out["verdict"] = bool(all_ok)
    return out
