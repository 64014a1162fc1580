"""Closed-form solutions of the biharmonic obstacle problem used as ground truth.

Three explicit solutions cover the checkable landscape:

* the one-dimensional clamped solution on (0, 1) with slope parameter
  ``lam < -3``: a single cubic arc meeting the zero set at ``gamma = -3/lam``
  with C^2 contact,
* the half-space profile ``(1/6) (eta . x)_+^3`` for a unit direction ``eta``,
* the two-dimensional slit solution ``r^{5/2}(cos(phi/2) - cos(5 phi/2)/5)``
  whose zero set is the segment [-1, 0] x {0} and whose Laplacian
  ``6 sqrt(r) cos(phi/2)`` realizes the C^{2,1/2} endpoint.

Evaluators expose analytic derivatives (differentiated by hand, checked
symbolically during development) so they can serve as oracles for the
finite-difference stencils.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .grid import GridSpec, ScalarField, sample_field

__all__ = [
    "OneDimSolution",
    "one_dim_solution",
    "OneDimFamily",
    "HalfspaceCubic",
    "halfspace_cubic",
    "SlitExample",
    "slit_example",
    "slit_measure_pairing",
    "RadialBump",
    "sample",
]


@dataclass(frozen=True)
class OneDimSolution:
    """Clamped 1D solution u(x) = (lam^3/27) min(x - gamma, 0)^3 on (0, 1).

    Boundary data u(0) = 1, u'(0) = lam < -3, u(1) = u'(1) = 0; the zero set
    starts at gamma = -3/lam and the bending energy is -4 lam^3 / 9.
    """

    lam: float

    def __post_init__(self):
        if not self.lam < -3:
            raise ValueError(f"slope parameter must be < -3, got {self.lam}")

    @property
    def gamma(self) -> float:
        return -3.0 / self.lam

    @property
    def coefficient(self) -> float:
        return self.lam**3 / 27.0

    @property
    def energy(self) -> float:
        return -4.0 * self.lam**3 / 9.0

    def value(self, x):
        m = np.minimum(np.asarray(x, dtype=float) - self.gamma, 0.0)
        return self.coefficient * m**3

    def derivative(self, x, order: int = 1):
        m = np.minimum(np.asarray(x, dtype=float) - self.gamma, 0.0)
        c = self.coefficient
        if order == 1:
            return 3.0 * c * m**2
        if order == 2:
            return 6.0 * c * m
        if order == 3:
            return np.where(m < 0.0, 6.0 * c, 0.0)
        raise ValueError("order must be 1, 2 or 3")

    def third_derivative_jump(self) -> float:
        """Jump of u''' across gamma: the mass of the contact measure u''''."""
        return -6.0 * self.coefficient

    @staticmethod
    def energy_of_contact_point(lam: float, gamma: float) -> float:
        """Bending energy of the cubic arc clamped at 0 and flat at ``gamma``."""
        return 4.0 / gamma**3 * (lam**2 * gamma**2 + 3.0 * lam * gamma + 3.0)

    @staticmethod
    def energy_derivative(lam: float, gamma: float) -> float:
        return -4.0 / gamma**4 * (lam * gamma + 3.0) ** 2


def one_dim_solution(lam: float) -> OneDimSolution:
    return OneDimSolution(float(lam))


@dataclass(frozen=True)
class OneDimFamily:
    """Two-sided cubic profile c1 (x - a1)_-^3 + c2 (x - a2)_+^3, nonnegative.

    The negative-part cube is taken so the first term is nonnegative:
    (t)_-^3 here means max(-t, 0)^3.
    """

    c1: float
    c2: float
    a1: float
    a2: float

    def __post_init__(self):
        if self.c1 < 0 or self.c2 < 0:
            raise ValueError("coefficients must be nonnegative")
        if self.a1 > self.a2:
            raise ValueError("need a1 <= a2")

    def value(self, x):
        x = np.asarray(x, dtype=float)
        lo = np.maximum(self.a1 - x, 0.0)
        hi = np.maximum(x - self.a2, 0.0)
        return self.c1 * lo**3 + self.c2 * hi**3

    def derivative(self, x, order: int = 1):
        x = np.asarray(x, dtype=float)
        lo = np.maximum(self.a1 - x, 0.0)
        hi = np.maximum(x - self.a2, 0.0)
        if order == 1:
            return -3.0 * self.c1 * lo**2 + 3.0 * self.c2 * hi**2
        if order == 2:
            return 6.0 * self.c1 * lo + 6.0 * self.c2 * hi
        raise ValueError("order must be 1 or 2")


class HalfspaceCubic:
    """Profile (1/6) ((eta . x)_+)^3 for a unit direction eta.

    Laplacian (eta . x)_+; third-derivative tensor eta x eta x eta on the
    positive side, so its L2(B_1) norm is sqrt(|B_1| / 2).
    """

    def __init__(self, eta):
        eta = np.atleast_1d(np.asarray(eta, dtype=float))
        if abs(np.linalg.norm(eta) - 1.0) > 1e-12:
            raise ValueError("direction must be a unit vector")
        self.eta = eta
        self.dimension = eta.size

    def _t(self, *coords):
        if len(coords) != self.dimension:
            raise ValueError("coordinate count mismatch")
        return sum(e * np.asarray(c, dtype=float) for e, c in zip(self.eta, coords))

    def value(self, *coords):
        t = np.maximum(self._t(*coords), 0.0)
        return t**3 / 6.0

    def laplacian(self, *coords):
        return np.maximum(self._t(*coords), 0.0)

    def gradient(self, *coords):
        t = np.maximum(self._t(*coords), 0.0)
        return [0.5 * t**2 * e for e in self.eta]

    def third(self, i: int, j: int, k: int, *coords):
        t = self._t(*coords)
        return np.where(t > 0.0, self.eta[i] * self.eta[j] * self.eta[k], 0.0)

    def rotated(self, theta: float) -> "HalfspaceCubic":
        """2D only: profile with eta rotated by ``theta`` radians."""
        if self.dimension != 2:
            raise ValueError("rotation defined for 2D profiles")
        c, s = np.cos(theta), np.sin(theta)
        ex, ey = self.eta
        return HalfspaceCubic((c * ex - s * ey, s * ex + c * ey))


def halfspace_cubic(eta) -> HalfspaceCubic:
    return HalfspaceCubic(eta)


def omega_norm(dim: int) -> float:
    """sqrt(|B_1| / 2): the L2(B_1) norm of the half-space third-derivative tensor."""
    vol = {1: 2.0, 2: np.pi}[dim]
    return float(np.sqrt(vol / 2.0))


class SlitExample:
    """Slit solution in the closed unit disk, branch cut on the negative x-axis.

    In polar coordinates (phi in [-pi, pi)):
        u = r^{5/2} (cos(phi/2) - cos(5 phi/2) / 5),
        Delta u = 6 sqrt(r) cos(phi/2).
    u vanishes exactly on the segment -1 <= x1 <= 0, x2 = 0 and is positive
    elsewhere; the second polar mode is harmonic.
    """

    dimension = 2

    @staticmethod
    def _polar(x1, x2):
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        r = np.hypot(x1, x2)
        if np.any(r > 1.0 + 1e-12):
            raise ValueError("point outside the closed unit disk")
        phi = np.arctan2(x2, x1)
        # branch phi in [-pi, pi): fold the +pi ray (x2 = +0 side of the cut)
        phi = np.where(phi >= np.pi, -np.pi, phi)
        return r, phi

    def value(self, x1, x2):
        r, phi = self._polar(x1, x2)
        return r**2.5 * (np.cos(phi / 2.0) - np.cos(2.5 * phi) / 5.0)

    def laplacian(self, x1, x2):
        r, phi = self._polar(x1, x2)
        return 6.0 * np.sqrt(r) * np.cos(phi / 2.0)

    def gradient(self, x1, x2):
        """One-sided on the cut: the phi -> pi limit is returned there."""
        r, phi = self._polar(x1, x2)
        u_r = 2.5 * r**1.5 * (np.cos(phi / 2.0) - np.cos(2.5 * phi) / 5.0)
        u_phi_over_r = 0.5 * r**1.5 * (np.sin(2.5 * phi) - np.sin(phi / 2.0))
        c, s = np.cos(phi), np.sin(phi)
        gx = u_r * c - u_phi_over_r * s
        gy = u_r * s + u_phi_over_r * c
        return [gx, gy]


def slit_example() -> SlitExample:
    return SlitExample()


class RadialBump:
    """Standard C-infinity bump exp(1 - 1/(1 - |x-c|^2/R^2)) on |x-c| < R."""

    def __init__(self, center, radius: float, amplitude: float = 1.0):
        self.center = np.atleast_1d(np.asarray(center, dtype=float))
        if radius <= 0:
            raise ValueError("radius must be positive")
        self.radius = float(radius)
        self.amplitude = float(amplitude)
        self.dimension = self.center.size

    def value(self, *coords):
        if len(coords) != self.dimension:
            raise ValueError("coordinate count mismatch")
        s = sum((np.asarray(c, dtype=float) - ci) ** 2 for c, ci in zip(coords, self.center))
        s = s / self.radius**2
        out = np.zeros(np.broadcast(*[np.asarray(c) for c in coords]).shape or ())
        inside = s < 1.0
        with np.errstate(divide="ignore", over="ignore"):
            vals = np.exp(1.0 - 1.0 / np.maximum(1.0 - s, 1e-300))
        out = np.where(inside, self.amplitude * vals, 0.0)
        return out


def slit_measure_pairing(f, rtol: float = 1e-10) -> float:
    """Contact-measure pairing of the slit solution with a test function ``f``:
    6 * integral_0^1 r^{-1/2} f(r, pi) dr, with f evaluated on the slit
    (Cartesian point (-r, 0)).

    ``f`` is a callable f(x1, x2) (or an object with ``.value``), compactly
    supported in the open unit disk; the substitution r = t^2 removes the
    endpoint singularity before adaptive quadrature.
    """
    fn = getattr(f, "value", f)
    # support must stay away from the circle
    th = np.linspace(-np.pi, np.pi, 720, endpoint=False)
    rim = np.max(np.abs(fn(0.999 * np.cos(th), 0.999 * np.sin(th))))
    if rim > 1e-12:
        raise ValueError("test function support touches the unit circle")

    def integrand(t):
        return fn(-(t**2), 0.0 * t)

    val, _err = integrate.quad(integrand, 0.0, 1.0, epsabs=0.0, epsrel=rtol, limit=200)
    return 12.0 * val


def sample(oracle, grid: GridSpec) -> ScalarField:
    """Render an oracle (or plain callable) onto a grid as a ScalarField."""
    return sample_field(oracle, grid)
