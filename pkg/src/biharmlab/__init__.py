"""Numerical laboratory for the biharmonic obstacle problem.

Solves min integral (Lap u)^2 over nonnegative fields with clamped boundary
data on 1D/2D grids, certifies the discrete variational inequality, and
provides the free-boundary toolbox: flatness norms, normalization, rescaling
and blow-up traces, normal fields, Holder-exponent fits and NTA geometry
checks, all verified against closed-form solutions.
"""

from .grid import (
    GridSpec,
    ScalarField,
    SubRegion,
    ball,
    disk_in_rectangle,
    interval,
    load_field,
    rectangle,
    sample_field,
    save_field,
    square,
)
from .operators import (
    bilaplacian,
    gradient,
    hessian,
    laplacian,
    norm_l2,
    norm_l2_vector,
    norm_sobolev,
    norm_sup,
    region_coverage,
    rescale,
    third_derivatives,
)
from .oracles import (
    HalfspaceCubic,
    OneDimFamily,
    OneDimSolution,
    RadialBump,
    SlitExample,
    halfspace_cubic,
    omega_norm,
    one_dim_solution,
    sample,
    slit_example,
    slit_measure_pairing,
)

__version__ = "0.1.0"
