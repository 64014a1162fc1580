import numpy as np
import pytest

import biharmlab as bl
from biharmlab.solver import (
    BiharmonicProblem,
    SolverConfig,
    SolverError,
    assemble,
    kkt_residuals,
    problem_from_boundary_data,
    problem_from_oracle,
    problem_interval,
    regularity_ratios,
    solve,
    zeta_diagnostic,
)


@pytest.fixture(scope="module")
def one_dim_solve():
    problem = problem_interval(0.0, 1.0, 513, g=(1.0, 0.0), slope=(-6.0, 0.0))
    u, report = solve(problem)
    return problem, u, report


@pytest.fixture(scope="module")
def slit_solve():
    grid = bl.disk_in_rectangle((0.0, 0.0), 1.0, 129)
    problem = problem_from_oracle(grid, bl.slit_example())
    u, report = solve(problem)
    return problem, u, report


# ---------------------------------------------------------------------------
# assembly and problem validation
# ---------------------------------------------------------------------------

def test_problem_requires_nonnegative_boundary_values():
    with pytest.raises(ValueError, match="nonnegative"):
        problem_interval(0.0, 1.0, 65, g=(-0.5, 0.0), slope=(-6.0, 0.0))


def test_interval_needs_slopes():
    g = bl.interval(0.0, 1.0, 65)
    fixed = np.full(65, np.nan)
    fixed[0] = 1.0
    fixed[-1] = 0.0
    with pytest.raises(ValueError, match="slopes"):
        BiharmonicProblem(g, fixed)


def test_energy_of_flat_extension_is_zero():
    grid = bl.square(1.0, 33)
    problem = problem_from_oracle(grid, lambda x, y: np.ones_like(x))
    model = assemble(problem)
    f = bl.ScalarField(grid, np.ones(grid.shape))
    assert model.energy_of_field(f) == pytest.approx(0.0, abs=1e-20)


def test_energy_scales_quadratically():
    grid = bl.square(1.0, 33)
    hc = bl.halfspace_cubic((0.0, 1.0))
    p1 = problem_from_oracle(grid, hc)
    p3 = problem_from_oracle(grid, lambda x, y: 3.0 * hc.value(x, y))
    f = bl.sample(hc, grid)
    e1 = assemble(p1).energy_of_field(f)
    e9 = assemble(p3).energy_of_field(f * 3.0)
    assert e9 == pytest.approx(9.0 * e1, rel=1e-12)


def test_interval_energy_of_oracle_interpolant_near_formula():
    o = bl.one_dim_solution(-6.0)
    for n in (257, 1025):
        problem = problem_interval(0.0, 1.0, n, g=(1.0, 0.0), slope=(-6.0, 0.0))
        model = assemble(problem)
        e = model.energy_of_field(bl.sample(o, problem.grid))
        assert abs(e - o.energy) / o.energy < 4.0 / n  # O(h) quadrature at the ends


# ---------------------------------------------------------------------------
# 1D solve against the closed form
# ---------------------------------------------------------------------------

def test_one_dim_energy_and_certificate(one_dim_solve):
    problem, u, report = one_dim_solve
    o = bl.one_dim_solution(-6.0)
    assert report.passed
    assert report.energy == pytest.approx(o.energy, rel=5e-3)
    assert report.measure_mass == pytest.approx(48.0, rel=5e-3)
    assert report.min_u >= 0.0


def test_one_dim_free_boundary_location(one_dim_solve):
    problem, u, report = one_dim_solve
    from biharmlab.freeboundary import extract_free_boundary

    fbd = extract_free_boundary(u)
    assert abs(fbd.points[0, 0] - 0.5) <= 2 * problem.grid.h


def test_one_dim_solution_matches_oracle_pointwise(one_dim_solve):
    problem, u, _ = one_dim_solve
    ref = bl.sample(bl.one_dim_solution(-6.0), problem.grid)
    assert np.nanmax(np.abs(u.values - ref.values)) < 50 * problem.grid.h**2


def test_solution_energy_below_feasible_comparisons(one_dim_solve):
    problem, u, report = one_dim_solve
    model = assemble(problem)
    oracle_interp = bl.sample(bl.one_dim_solution(-6.0), problem.grid)
    assert report.energy <= model.energy_of_field(oracle_interp) + 1e-9
    # a smooth feasible competitor: the positive part of the clamped cubic
    x = problem.grid.coords()[0]
    competitor = bl.ScalarField(problem.grid, np.maximum((1 - x) ** 2 * (1 - 4 * x), 0.0))
    assert report.energy <= model.energy_of_field(competitor) + 1e-9


def test_oracle_interpolant_is_discrete_kkt_point():
    o = bl.one_dim_solution(-6.0)
    problem = problem_interval(0.0, 1.0, 513, g=(1.0, 0.0), slope=(-6.0, 0.0))
    report = kkt_residuals(bl.sample(o, problem.grid), problem)
    assert report.measure_mass == pytest.approx(48.0, rel=1e-9)
    assert report.min_bilaplacian >= -1e-8
    assert report.complementarity_rel < 1e-12


def test_constant_field_certificate():
    grid = bl.square(1.0, 33)
    problem = problem_from_oracle(grid, lambda x, y: np.ones_like(x))
    f = bl.ScalarField(grid, np.ones(grid.shape))
    report = kkt_residuals(f, problem)
    assert report.min_bilaplacian == pytest.approx(0.0, abs=1e-10)
    assert report.complementarity == pytest.approx(0.0, abs=1e-10)
    assert report.measure_mass == pytest.approx(0.0, abs=1e-10)


# ---------------------------------------------------------------------------
# uniqueness, homogeneity
# ---------------------------------------------------------------------------

def test_two_starts_agree(one_dim_solve):
    problem, u, report = one_dim_solve
    u2, report2 = solve(problem, SolverConfig(start="all-active"))
    tol = report.tol
    scale = np.nanmax(np.abs(u.values))
    assert np.nanmax(np.abs(u.values - u2.values)) <= 10 * tol * scale


def test_positive_homogeneity():
    c = 3.0
    p1 = problem_interval(0.0, 1.0, 257, g=(1.0, 0.0), slope=(-6.0, 0.0))
    pc = problem_interval(0.0, 1.0, 257, g=(c, 0.0), slope=(c * -6.0, 0.0))
    u1, _ = solve(p1)
    uc, _ = solve(pc)
    scale = c * np.nanmax(np.abs(u1.values))
    assert np.nanmax(np.abs(uc.values - c * u1.values)) / scale < 1e-9


# ---------------------------------------------------------------------------
# 2D solves
# ---------------------------------------------------------------------------

def test_halfspace_data_recovers_cubic_under_refinement():
    hc = bl.halfspace_cubic((0.0, 1.0))
    errs = []
    for n in (33, 65, 129):
        grid = bl.square(1.0, n)
        u, report = solve(problem_from_oracle(grid, hc))
        ref = bl.sample(hc, grid)
        errs.append(np.nanmax(np.abs(u.values - ref.values)[u.valid]))
        assert report.passed
    assert errs[2] < errs[0]
    assert errs[2] < 5e-5


def test_slit_solve_certificate_and_error(slit_solve):
    problem, u, report = slit_solve
    assert report.passed
    assert report.primal_rel <= 1e-8 and report.dual_rel <= 1e-8 and report.complementarity_rel <= 1e-8
    ref = bl.sample(bl.slit_example(), problem.grid)
    err = np.nanmax(np.abs(u.values - ref.values)[u.valid & ref.valid])
    assert err < 1e-4


def test_monotone_energy_under_refinement_matches_oracle_direction():
    # discrete minimum is below the interpolated-oracle energy at each level
    sl = bl.slit_example()
    for n in (65, 129):
        grid = bl.disk_in_rectangle((0.0, 0.0), 1.0, n)
        problem = problem_from_oracle(grid, sl)
        u, report = solve(problem)
        model = assemble(problem)
        assert report.energy <= model.energy_of_field(bl.sample(sl, grid)) + 1e-9


def test_boundary_array_interface_matches_oracle_closure():
    hc = bl.halfspace_cubic((0.0, 1.0))
    grid = bl.square(1.0, 65)
    from biharmlab.solver import _collar_mask

    outer = _collar_mask(grid.mask, 1)
    x, y = grid.coords()
    bi, bj = np.nonzero(outer)
    g_vals = hc.value(x[bi, bj], y[bi, bj])
    # outward normal derivative on the square's edges
    gx, gy = hc.gradient(x[bi, bj], y[bi, bj])
    nx = np.where(bi == 0, -1.0, np.where(bi == grid.shape[0] - 1, 1.0, 0.0))
    ny = np.where(bj == 0, -1.0, np.where(bj == grid.shape[1] - 1, 1.0, 0.0))
    nrm = np.hypot(nx, ny)
    f_vals = (gx * nx + gy * ny) / np.where(nrm > 0, nrm, 1.0)
    problem = problem_from_boundary_data(grid, g_vals, f_vals)
    u, report = solve(problem)
    ref = bl.sample(hc, grid)
    assert report.passed
    assert np.nanmax(np.abs(u.values - ref.values)[u.valid]) < 5e-3


def test_boundary_array_length_validated():
    grid = bl.square(1.0, 33)
    with pytest.raises(ValueError, match="length"):
        problem_from_boundary_data(grid, np.ones(7), np.zeros(7))


# ---------------------------------------------------------------------------
# diagnostics
# ---------------------------------------------------------------------------

def test_zeta_diagnostic_vanishes_for_tangential_direction():
    grid = bl.square(1.0, 129)
    f = bl.sample(bl.halfspace_cubic((0.0, 1.0)), grid)
    val = zeta_diagnostic(f, 0, (0.0, 0.0), 0.4)
    assert abs(val) < 1e-20


def test_zeta_diagnostic_sign_at_contact(one_dim_solve):
    problem, u, _ = one_dim_solve
    val = zeta_diagnostic(u, 0, (0.5,), 0.2)
    assert val <= 1e-10


def test_zeta_diagnostic_biharmonic_region(slit_solve):
    problem, u, _ = slit_solve
    val = zeta_diagnostic(u, 0, (0.5, 0.0), 0.3)
    scale = abs(zeta_diagnostic(u, 0, (-0.4, 0.0), 0.3)) + 1.0
    assert abs(val) < 1e-3 * scale + 1e-6


def test_zeta_support_must_stay_interior():
    grid = bl.square(1.0, 65)
    f = bl.sample(bl.halfspace_cubic((0.0, 1.0)), grid)
    with pytest.raises(ValueError, match="support"):
        zeta_diagnostic(f, 0, (0.9, 0.9), 0.5)


def test_regularity_ratios_finite_and_stable():
    hc = bl.halfspace_cubic((0.0, 1.0))
    vals = []
    for n in (65, 129, 257):
        grid = bl.square(1.0, n)
        f = bl.sample(hc, grid)
        rr = regularity_ratios(f)
        assert np.isfinite(rr.sup_laplacian_ratio)
        assert np.isfinite(rr.holder_gradient_ratio)
        vals.append(rr.sup_laplacian_ratio)
    assert abs(vals[2] - vals[1]) / vals[1] < 0.1


def test_regularity_ratio_of_slit_field(slit_solve):
    problem, u, _ = slit_solve
    rr = regularity_ratios(u, center=(0.0, 0.0), scale=0.9)
    assert np.isfinite(rr.sup_laplacian_ratio)
    assert rr.sup_laplacian_ratio > 0


# ---------------------------------------------------------------------------
# failure paths
# ---------------------------------------------------------------------------

def test_nonconvergence_carries_best_iterate():
    problem = problem_interval(0.0, 1.0, 257, g=(1.0, 0.0), slope=(-6.0, 0.0))
    cfg = SolverConfig(max_iterations=2, fallback_iterations=300)
    with pytest.raises(SolverError) as info:
        solve(problem, cfg)
    err = info.value
    assert err.field is not None
    assert err.report is not None
    assert err.report.energy > 0


def test_projected_gradient_method_agrees_on_small_problem():
    problem = problem_interval(0.0, 1.0, 65, g=(1.0, 0.0), slope=(-6.0, 0.0))
    u1, _ = solve(problem)
    cfg = SolverConfig(method="projected-gradient", fallback_iterations=400000, kkt_tol=1e-6)
    u2, report2 = solve(problem, cfg)
    assert report2.fallback_used
    assert np.nanmax(np.abs(u1.values - u2.values)) < 1e-3


def test_halfspace_contact_mass_is_chord_length():
    # Lap^2 of (1/6)(x2)_+^3 is arc measure on {x2 = 0} with unit density:
    # over the unit disk the total is the chord length 2
    from biharmlab.operators import bilaplacian

    masses = []
    for n in (129, 257):
        grid = bl.disk_in_rectangle((0.0, 0.0), 1.0, n)
        f = bl.sample(bl.halfspace_cubic((0.0, 1.0)), grid)
        b = bilaplacian(f)
        masses.append(float(np.sum(np.maximum(b.values[b.valid], 0.0)) * grid.h**2))
    assert abs(masses[-1] - 2.0) <= 8 * bl.disk_in_rectangle((0, 0), 1.0, 257).h
    assert abs(masses[-1] - 2.0) < abs(masses[0] - 2.0)


def test_energy_decreases_across_accepted_iterations(one_dim_solve):
    _, _, report = one_dim_solve
    assert report.energy_decreasing
