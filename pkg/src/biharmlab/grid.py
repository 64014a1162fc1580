"""Uniform isotropic grids and scalar fields on intervals, rectangles and masked disks.

A :class:`GridSpec` describes the node layout; a :class:`ScalarField` pairs a
grid with one value per node plus a validity mask (derivative fields lose
validity near the edge of the active domain instead of extrapolating).
Fields on identical grids combine pointwise; mixing grids raises.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from functools import cached_property
from pathlib import Path

import numpy as np

__all__ = [
    "GridSpec",
    "ScalarField",
    "SubRegion",
    "interval",
    "rectangle",
    "disk_in_rectangle",
    "sample_field",
    "save_field",
    "load_field",
]

INTERVAL = "interval"
RECTANGLE = "rectangle"
DISK = "disk-in-rectangle"

_SHAPES = (INTERVAL, RECTANGLE, DISK)


@dataclass(frozen=True)
class GridSpec:
    """Uniform node layout: ``shape[i]`` nodes spanning ``extent[i]`` on axis i.

    Spacing is isotropic: ``h = (hi - lo)/(n - 1)`` must agree on every axis.
    ``domain_shape`` selects the active-node mask: the full interval/rectangle,
    or the open disk ``|x - center| < radius`` tested at node centers.
    """

    dimension: int
    extent: tuple[tuple[float, float], ...]
    shape: tuple[int, ...]
    domain_shape: str = RECTANGLE
    center: tuple[float, ...] | None = None
    radius: float | None = None

    def __post_init__(self):
        if self.dimension not in (1, 2):
            raise ValueError(f"dimension must be 1 or 2, got {self.dimension}")
        if len(self.extent) != self.dimension or len(self.shape) != self.dimension:
            raise ValueError("extent/shape length must match dimension")
        if self.domain_shape not in _SHAPES:
            raise ValueError(f"unknown domain_shape {self.domain_shape!r}")
        if any(n < 2 for n in self.shape):
            raise ValueError("need at least 2 nodes per axis")
        steps = [(hi - lo) / (n - 1) for (lo, hi), n in zip(self.extent, self.shape)]
        if steps[0] <= 0:
            raise ValueError("extent must be increasing")
        if any(abs(s - steps[0]) > 1e-12 * abs(steps[0]) for s in steps[1:]):
            raise ValueError(f"grid must be isotropic, got spacings {steps}")
        if self.domain_shape == DISK:
            if self.dimension != 2 or self.center is None or self.radius is None:
                raise ValueError("disk-in-rectangle needs dimension 2, center and radius")

    @property
    def h(self) -> float:
        lo, hi = self.extent[0]
        return (hi - lo) / (self.shape[0] - 1)

    def axes(self) -> list[np.ndarray]:
        return [np.linspace(lo, hi, n) for (lo, hi), n in zip(self.extent, self.shape)]

    def coords(self) -> list[np.ndarray]:
        """Node-center coordinate arrays, one per axis, each of shape ``self.shape``."""
        if self.dimension == 1:
            return self.axes()
        return list(np.meshgrid(*self.axes(), indexing="ij"))

    @cached_property
    def mask(self) -> np.ndarray:
        """Boolean active-domain mask at node centers."""
        if self.domain_shape != DISK:
            return np.ones(self.shape, dtype=bool)
        x, y = self.coords()
        cx, cy = self.center
        return (x - cx) ** 2 + (y - cy) ** 2 < self.radius**2

    def node_count(self) -> int:
        return int(np.prod(self.shape))


def interval(lo: float, hi: float, n: int) -> GridSpec:
    return GridSpec(1, ((float(lo), float(hi)),), (int(n),), INTERVAL)


def rectangle(xlim: tuple[float, float], ylim: tuple[float, float], nx: int) -> GridSpec:
    """Rectangle grid with ``nx`` nodes on the first axis; the second axis node
    count follows from isotropy and must fit the extent exactly."""
    h = (xlim[1] - xlim[0]) / (nx - 1)
    ny_f = (ylim[1] - ylim[0]) / h + 1
    ny = int(round(ny_f))
    if abs(ny_f - ny) > 1e-9:
        raise ValueError(f"ylim {ylim} not an integer multiple of spacing {h}")
    return GridSpec(2, (tuple(map(float, xlim)), tuple(map(float, ylim))), (int(nx), ny), RECTANGLE)


def square(half_width: float, n: int, center: tuple[float, float] = (0.0, 0.0)) -> GridSpec:
    cx, cy = center
    return rectangle((cx - half_width, cx + half_width), (cy - half_width, cy + half_width), n)


def disk_in_rectangle(center: tuple[float, float], radius: float, n: int, pad: float = 0.0) -> GridSpec:
    """Disk of given center/radius masked inside its bounding square (plus ``pad``)."""
    cx, cy = center
    r = radius + pad
    return GridSpec(
        2,
        ((cx - r, cx + r), (cy - r, cy + r)),
        (int(n), int(n)),
        DISK,
        center=(float(cx), float(cy)),
        radius=float(radius),
    )


@dataclass
class ScalarField:
    """Real values per grid node, with a validity mask.

    ``valid`` defaults to the grid's active-domain mask.  Values must be finite
    wherever valid; invalid entries are stored as NaN so accidental use shows up.
    """

    grid: GridSpec
    values: np.ndarray
    valid: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise ValueError(f"values shape {self.values.shape} != grid shape {self.grid.shape}")
        if self.valid is None:
            self.valid = self.grid.mask.copy()
        self.valid = np.asarray(self.valid, dtype=bool)
        if self.valid.shape != self.grid.shape:
            raise ValueError("valid mask shape mismatch")
        if not np.all(np.isfinite(self.values[self.valid])):
            raise ValueError("non-finite values at valid nodes")
        self.values = self.values.copy()
        self.values[~self.valid] = np.nan

    def _check_same_grid(self, other: "ScalarField"):
        if self.grid != other.grid:
            raise ValueError("fields live on different grids")

    def __add__(self, other):
        if isinstance(other, ScalarField):
            self._check_same_grid(other)
            v = self.values + other.values
            ok = self.valid & other.valid
        else:
            v = self.values + other
            ok = self.valid.copy()
        v[~ok] = np.nan
        return ScalarField(self.grid, np.where(ok, v, np.nan), ok)

    def __sub__(self, other):
        if isinstance(other, ScalarField):
            self._check_same_grid(other)
            v = self.values - other.values
            ok = self.valid & other.valid
        else:
            v = self.values - other
            ok = self.valid.copy()
        return ScalarField(self.grid, np.where(ok, v, np.nan), ok)

    def __mul__(self, other):
        if isinstance(other, ScalarField):
            self._check_same_grid(other)
            v = self.values * other.values
            ok = self.valid & other.valid
        else:
            v = self.values * other
            ok = self.valid.copy()
        return ScalarField(self.grid, np.where(ok, v, np.nan), ok)

    __rmul__ = __mul__

    def __neg__(self):
        return self * (-1.0)

    def copy(self) -> "ScalarField":
        return ScalarField(self.grid, self.values.copy(), self.valid.copy())

    def max_abs(self) -> float:
        if not self.valid.any():
            raise ValueError("field has no valid nodes")
        return float(np.max(np.abs(self.values[self.valid])))


@dataclass(frozen=True)
class SubRegion:
    """Open ball ``|x - center| < radius``, intersected with the active mask."""

    center: tuple[float, ...]
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")

    def select(self, grid: GridSpec) -> np.ndarray:
        coords = grid.coords()
        c = self.center if isinstance(self.center, tuple) else (self.center,)
        if len(c) != grid.dimension:
            raise ValueError("center dimension mismatch")
        d2 = sum((x - ci) ** 2 for x, ci in zip(coords, c))
        return (d2 < self.radius**2) & grid.mask


def ball(radius: float, center=None, dim: int = 2) -> SubRegion:
    if center is None:
        center = (0.0,) * dim
    if np.isscalar(center):
        center = (float(center),)
    return SubRegion(tuple(float(c) for c in center), float(radius))


def sample_field(fn, grid: GridSpec, valid: np.ndarray | None = None) -> ScalarField:
    """Evaluate ``fn`` at valid node centers (NaN elsewhere).  ``fn`` takes one
    coordinate array per axis (vectorized) or an object with a ``.value``
    method of that signature."""
    f = getattr(fn, "value", fn)
    coords = grid.coords()
    ok = grid.mask.copy() if valid is None else np.asarray(valid, dtype=bool).copy()
    vals = np.full(grid.shape, np.nan)
    pts = [c[ok] for c in coords]
    vals[ok] = np.broadcast_to(np.asarray(f(*pts), dtype=float), pts[0].shape)
    return ScalarField(grid, vals, ok)


# ---------------------------------------------------------------------------
# serialization: values as CSV or flat binary, grid spec in a JSON sidecar
# ---------------------------------------------------------------------------

def _spec_to_dict(grid: GridSpec) -> dict:
    return {
        "dimension": grid.dimension,
        "extent": [list(e) for e in grid.extent],
        "n": list(grid.shape),
        "shape": grid.domain_shape,
        "center": list(grid.center) if grid.center is not None else None,
        "radius": grid.radius,
    }


def _spec_from_dict(d: dict) -> GridSpec:
    return GridSpec(
        int(d["dimension"]),
        tuple(tuple(float(v) for v in e) for e in d["extent"]),
        tuple(int(v) for v in d["n"]),
        d["shape"],
        center=tuple(float(v) for v in d["center"]) if d.get("center") else None,
        radius=float(d["radius"]) if d.get("radius") is not None else None,
    )


def save_field(f: ScalarField, base: str | Path, fmt: str = "csv") -> Path:
    """Write ``<base>.csv`` (or ``.bin``) plus a ``<base>.json`` sidecar.

    Invalid nodes are stored as NaN; the sidecar records the grid spec and the
    values file name.  Returns the sidecar path.
    """
    base = Path(base)
    if fmt == "csv":
        vfile = base.with_suffix(".csv")
        np.savetxt(vfile, f.values.reshape(-1), fmt="%.17g")
    elif fmt == "bin":
        vfile = base.with_suffix(".bin")
        f.values.astype("<f8").tofile(vfile)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    meta = {"grid": _spec_to_dict(f.grid), "values_file": vfile.name, "format": fmt}
    sidecar = base.with_suffix(".json")
    sidecar.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return sidecar


def load_field(sidecar: str | Path) -> ScalarField:
    sidecar = Path(sidecar)
    meta = json.loads(sidecar.read_text())
    grid = _spec_from_dict(meta["grid"])
    vfile = sidecar.parent / meta["values_file"]
    if meta["format"] == "csv":
        vals = np.loadtxt(vfile).reshape(grid.shape)
    else:
        vals = np.fromfile(vfile, dtype="<f8").reshape(grid.shape)
    valid = np.isfinite(vals)
    return ScalarField(grid, vals, valid)
