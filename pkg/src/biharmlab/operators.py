"""Finite-difference operators and discrete norms on uniform grids.

All stencils are centered and second-order: the Laplacian is exact on
polynomials of degree <= 3 and the bilaplacian (Laplacian composed twice,
the 5/13-point stencil) on degree <= 5.  Nodes whose stencil reaches an
invalid neighbor are flagged invalid rather than one-sided; norms skip
invalid nodes (see :func:`region_coverage` for the skipped fraction).
"""

from __future__ import annotations

import itertools

import numpy as np
from scipy import ndimage

from .grid import GridSpec, ScalarField, SubRegion

__all__ = [
    "laplacian",
    "bilaplacian",
    "gradient",
    "hessian",
    "third_derivatives",
    "norm_l2",
    "norm_sup",
    "norm_sobolev",
    "norm_l2_vector",
    "region_coverage",
    "rescale",
    "reflect",
]


def _shifted(a: np.ndarray, axis: int, k: int) -> np.ndarray:
    """Array shifted so entry i holds a[i + k] along ``axis``; NaN past the edge."""
    out = np.full_like(a, np.nan)
    src = [slice(None)] * a.ndim
    dst = [slice(None)] * a.ndim
    if k > 0:
        src[axis] = slice(k, None)
        dst[axis] = slice(None, -k)
    elif k < 0:
        src[axis] = slice(None, k)
        dst[axis] = slice(-k, None)
    out[tuple(dst)] = a[tuple(src)]
    return out


def _shifted_valid(v: np.ndarray, axis: int, k: int) -> np.ndarray:
    out = np.zeros_like(v)
    src = [slice(None)] * v.ndim
    dst = [slice(None)] * v.ndim
    if k > 0:
        src[axis] = slice(k, None)
        dst[axis] = slice(None, -k)
    elif k < 0:
        src[axis] = slice(None, k)
        dst[axis] = slice(-k, None)
    else:
        return v.copy()
    out[tuple(dst)] = v[tuple(src)]
    return out


def _apply(f: ScalarField, offsets_weights: list[tuple[tuple[int, ...], float]], scale: float) -> ScalarField:
    """Linear stencil sum(w * f[i + off]) * scale with validity propagation."""
    vals = np.zeros(f.grid.shape)
    ok = f.valid.copy()
    for off, w in offsets_weights:
        a = f.values
        v = f.valid
        for axis, k in enumerate(off):
            if k:
                a = _shifted(a, axis, k)
                v = _shifted_valid(v, axis, k)
        with np.errstate(invalid="ignore"):
            vals = vals + w * np.where(v, a, 0.0)
        ok &= v
    vals *= scale
    vals[~ok] = np.nan
    return ScalarField(f.grid, vals, ok)


def _axis_offsets(dim: int, axis: int, ks: list[int], ws: list[float]):
    out = []
    for k, w in zip(ks, ws):
        off = [0] * dim
        off[axis] = k
        out.append((tuple(off), w))
    return out


def laplacian(f: ScalarField) -> ScalarField:
    """Centered 3-point (1D) / 5-point (2D) Laplacian."""
    g = f.grid
    if any(n < 3 for n in g.shape):
        raise ValueError("laplacian needs at least 3 nodes per axis")
    dim = g.dimension
    ow = [((0,) * dim, -2.0 * dim)]
    for axis in range(dim):
        ow += _axis_offsets(dim, axis, [-1, 1], [1.0, 1.0])
    return _apply(f, ow, 1.0 / g.h**2)


def bilaplacian(f: ScalarField) -> ScalarField:
    """Laplacian applied twice: the classical 5-point (1D) / 13-point (2D) stencil."""
    if any(n < 5 for n in f.grid.shape):
        raise ValueError("bilaplacian needs at least 5 nodes per axis")
    return laplacian(laplacian(f))


def _d1(f: ScalarField, axis: int) -> ScalarField:
    return _apply(f, _axis_offsets(f.grid.dimension, axis, [1, -1], [1.0, -1.0]), 0.5 / f.grid.h)


def _d2_pure(f: ScalarField, axis: int) -> ScalarField:
    dim = f.grid.dimension
    ow = _axis_offsets(dim, axis, [1, 0, -1], [1.0, -2.0, 1.0])
    return _apply(f, ow, 1.0 / f.grid.h**2)


def _d3_pure(f: ScalarField, axis: int) -> ScalarField:
    dim = f.grid.dimension
    ow = _axis_offsets(dim, axis, [2, 1, -1, -2], [1.0, -2.0, 2.0, -1.0])
    return _apply(f, ow, 0.5 / f.grid.h**3)


def gradient(f: ScalarField) -> list[ScalarField]:
    if any(n < 3 for n in f.grid.shape):
        raise ValueError("gradient needs at least 3 nodes per axis")
    return [_d1(f, axis) for axis in range(f.grid.dimension)]


def hessian(f: ScalarField) -> list[list[ScalarField]]:
    """Symmetric matrix of second derivatives (mixed entries via composed
    centered first differences, symmetric in the axes by construction)."""
    dim = f.grid.dimension
    H: list[list[ScalarField | None]] = [[None] * dim for _ in range(dim)]
    for i in range(dim):
        H[i][i] = _d2_pure(f, i)
        for j in range(i + 1, dim):
            mixed = _d1(_d1(f, i), j)
            H[i][j] = mixed
            H[j][i] = mixed
    return H  # type: ignore[return-value]


def third_derivatives(f: ScalarField) -> dict[tuple[int, int, int], ScalarField]:
    """Unique third derivatives keyed by sorted index triple (i <= j <= k).

    Centered differences commute, so the full rank-3 tensor is recovered by
    symmetry; :func:`norm_sobolev` accounts for the multiplicities.
    """
    dim = f.grid.dimension
    out: dict[tuple[int, int, int], ScalarField] = {}
    for i, j, k in itertools.combinations_with_replacement(range(dim), 3):
        if i == j == k:
            out[(i, j, k)] = _d3_pure(f, i)
        elif i == j:
            out[(i, j, k)] = _d1(_d2_pure(f, i), k)
        elif j == k:
            out[(i, j, k)] = _d1(_d2_pure(f, j), i)
        else:
            out[(i, j, k)] = _d1(_d1(_d1(f, i), j), k)
    return out


def _multiplicity(idx: tuple[int, ...]) -> int:
    """Number of orderings of a sorted multi-index (tensor entry count)."""
    perms = set(itertools.permutations(idx))
    return len(perms)


# ---------------------------------------------------------------------------
# norms
# ---------------------------------------------------------------------------

def _selection(f: ScalarField, region: SubRegion | None) -> np.ndarray:
    sel = f.grid.mask if region is None else region.select(f.grid)
    return sel & f.valid


def region_coverage(f: ScalarField, region: SubRegion | None = None) -> float:
    """Fraction of the selected nodes at which ``f`` is valid."""
    sel = f.grid.mask if region is None else region.select(f.grid)
    total = int(sel.sum())
    if total == 0:
        raise ValueError("region selects no nodes")
    return float((sel & f.valid).sum()) / total


def norm_l2(f: ScalarField, region: SubRegion | None = None) -> float:
    """Midpoint-quadrature L2 norm: sqrt(sum f^2 h^n) over selected valid nodes."""
    sel = _selection(f, region)
    if not sel.any():
        raise ValueError("region selects no valid nodes")
    hn = f.grid.h**f.grid.dimension
    return float(np.sqrt(np.sum(f.values[sel] ** 2) * hn))


def norm_sup(f: ScalarField, region: SubRegion | None = None) -> float:
    sel = _selection(f, region)
    if not sel.any():
        raise ValueError("region selects no valid nodes")
    return float(np.max(np.abs(f.values[sel])))


def norm_l2_vector(fields: list[ScalarField], region: SubRegion | None = None) -> float:
    """L2 norm of a vector field: component norms summed in quadrature."""
    return float(np.sqrt(sum(norm_l2(c, region) ** 2 for c in fields)))


def norm_sobolev(f: ScalarField, k: int, region: SubRegion | None = None) -> float:
    """W^{k,2} norm: L2 norms of all derivative tensors up to order ``k``.

    Tensor convention: every component of D^j counts (mixed entries with
    multiplicity), so ||D^3 (1/6)(x_n)_+^3||_{L2} integrates to the halfspace
    volume exactly as the normalization constant requires.
    """
    if k not in (0, 1, 2, 3):
        raise ValueError("order k must be 0..3")
    total = norm_l2(f, region) ** 2
    if k >= 1:
        total += sum(norm_l2(gi, region) ** 2 for gi in gradient(f))
    if k >= 2:
        H = hessian(f)
        dim = f.grid.dimension
        for i in range(dim):
            for j in range(dim):
                total += norm_l2(H[i][j], region) ** 2
    if k >= 3:
        for idx, d in third_derivatives(f).items():
            total += _multiplicity(idx) * norm_l2(d, region) ** 2
    return float(np.sqrt(total))


# ---------------------------------------------------------------------------
# rescaling u(r x + x0) / r^3 by cubic interpolation
# ---------------------------------------------------------------------------

def rescale(f: ScalarField, x0, r: float, target: GridSpec, power: float = 3.0) -> ScalarField:
    """Sample ``x -> f(r x + x0) / r^power`` on ``target`` via cubic interpolation.

    Sample points (with a 2-cell spline-support margin) must fall in the valid
    region of ``f``; the cubic degree preserves the leading distance-cubed
    behavior of the fields this library cares about.
    """
    if not (0.0 < r < 1.0):
        raise ValueError("scale r must lie in (0, 1)")
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    g = f.grid
    if x0.shape != (g.dimension,):
        raise ValueError("center dimension mismatch")
    tcoords = target.coords()
    # index coordinates of the sample points in the source grid
    idx = []
    for axis in range(g.dimension):
        lo, _ = g.extent[axis]
        pts = r * tcoords[axis] + x0[axis]
        idx.append((pts - lo) / g.h)
    idx_arr = np.stack([i.reshape(-1) for i in idx])
    margin = 2.0
    inside = np.ones(idx_arr.shape[1], dtype=bool)
    for axis in range(g.dimension):
        inside &= (idx_arr[axis] >= margin) & (idx_arr[axis] <= g.shape[axis] - 1 - margin)
    if not inside.all():
        raise ValueError("rescaled sample points leave the source domain")
    # validity of the spline support: nearest source nodes must be valid
    near = ndimage.map_coordinates(f.valid.astype(float), idx_arr, order=1, mode="constant", cval=0.0)
    if np.any(near < 1.0 - 1e-12):
        raise ValueError("rescaled sample points touch invalid source nodes")
    filled = np.where(f.valid, f.values, 0.0)
    vals = ndimage.map_coordinates(filled, idx_arr, order=3, mode="nearest")
    vals = vals.reshape(target.shape) / r**power
    return ScalarField(target, vals, np.ones(target.shape, dtype=bool))


def reflect(f: ScalarField, axis: int) -> ScalarField:
    """Reflection of the field across the midpoint of ``axis`` (grid unchanged,
    so the extent must be symmetric for this to be a geometric reflection)."""
    vals = np.flip(f.values, axis=axis).copy()
    ok = np.flip(f.valid, axis=axis).copy()
    return ScalarField(f.grid, vals, ok)
