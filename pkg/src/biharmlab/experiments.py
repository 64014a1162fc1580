"""Batch experiment drivers: validated JSON configs in, summary JSON + CSV
tables + field files out, deterministic for a fixed (config, seed).
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
from pathlib import Path

import numpy as np

from . import __version__
from . import freeboundary as fb
from . import nta as nta_mod
from .grid import ScalarField, ball, disk_in_rectangle, interval, sample_field, save_field, square
from .operators import laplacian, norm_sup
from .oracles import (
    HalfspaceCubic,
    OneDimSolution,
    RadialBump,
    SlitExample,
    slit_measure_pairing,
)
from .solver import (
    SolverConfig,
    SolverError,
    assemble,
    contact_mask,
    kkt_residuals,
    problem_from_boundary_data,
    problem_from_oracle,
    problem_interval,
    solve,
    transfer_mask,
)

__all__ = ["ConfigError", "validate_config", "run", "convergence_study", "KINDS"]

KINDS = (
    "solve-1d",
    "solve-2d",
    "oracle-verify",
    "blowup",
    "membership",
    "nta",
    "exponent",
    "measure-identity",
    "convergence-study",
)


class ConfigError(ValueError):
    """Invalid experiment configuration."""


def _need(cfg: dict, key: str, typ, kind: str):
    if key not in cfg:
        raise ConfigError(f"{kind}: missing required key {key!r}")
    v = cfg[key]
    if typ is float:
        if not isinstance(v, (int, float)) or isinstance(v, bool):
            raise ConfigError(f"{kind}: key {key!r} must be a number")
        return float(v)
    if typ is int:
        if not isinstance(v, int) or isinstance(v, bool):
            raise ConfigError(f"{kind}: key {key!r} must be an integer")
        return v
    if not isinstance(v, typ):
        raise ConfigError(f"{kind}: key {key!r} must be {typ.__name__}")
    return v


def validate_config(cfg: dict) -> str:
    """Check structure per experiment kind; returns the kind."""
    if not isinstance(cfg, dict) or not cfg:
        raise ConfigError("config must be a non-empty JSON object")
    kind = cfg.get("kind")
    if kind not in KINDS:
        raise ConfigError(f"unknown kind {kind!r}; expected one of {KINDS}")
    if kind == "solve-1d":
        lam = _need(cfg, "lam", float, kind)
        if lam >= -3:
            raise ConfigError("solve-1d: need lam < -3")
        n = _need(cfg, "n", int, kind)
        if n < 9:
            raise ConfigError("solve-1d: n too small")
    elif kind == "solve-2d":
        oracle = _need(cfg, "oracle", str, kind)
        if oracle not in ("slit", "halfspace", "halfspace-rotated", "perturbed", "arrays"):
            raise ConfigError(f"solve-2d: unknown oracle {oracle!r}")
        if _need(cfg, "n", int, kind) < 17:
            raise ConfigError("solve-2d: n too small")
        if oracle == "arrays":
            _need(cfg, "g", list, kind)
            _need(cfg, "f", list, kind)
            if cfg.get("domain", "disk") not in ("disk", "square"):
                raise ConfigError("solve-2d: domain must be disk or square")
            if cfg.get("warm_ladder"):
                raise ConfigError("solve-2d: warm_ladder is not meaningful for explicit arrays")
    elif kind == "oracle-verify":
        if _need(cfg, "oracle", str, kind) not in ("one-dim", "halfspace", "slit"):
            raise ConfigError("oracle-verify: unknown oracle")
    elif kind == "blowup":
        src = _need(cfg, "source", str, kind)
        if src not in ("halfspace", "halfspace-rotated", "one-dim-embedded", "perturbed"):
            raise ConfigError(f"blowup: unknown source {src!r}")
        s = _need(cfg, "s", float, kind)
        if not (0.25 < s < 0.5):
            raise ConfigError("blowup: s must lie in (1/4, 1/2)")
        if _need(cfg, "K", int, kind) < 1:
            raise ConfigError("blowup: K must be >= 1")
    elif kind == "membership":
        if _need(cfg, "instance", str, kind) not in ("halfspace", "halfspace-rotated", "slit"):
            raise ConfigError("membership: unknown instance")
        for key in ("kappa", "rho", "epsilon", "t"):
            _need(cfg, key, float, kind)
    elif kind == "nta":
        if _need(cfg, "mask", str, kind) not in ("halfplane", "slit", "disk"):
            raise ConfigError("nta: unknown mask")
        _need(cfg, "M", float, kind)
    elif kind == "exponent":
        tgt = _need(cfg, "target", str, kind)
        if tgt not in ("slit-laplacian", "halfspace-laplacian", "solved-slit-laplacian", "radial"):
            raise ConfigError(f"exponent: unknown target {tgt!r}")
        r0, r1 = _need(cfg, "r_min", float, kind), _need(cfg, "r_max", float, kind)
        if not 0 < r0 < r1:
            raise ConfigError("exponent: need 0 < r_min < r_max")
    elif kind == "measure-identity":
        if _need(cfg, "n", int, kind) < 65:
            raise ConfigError("measure-identity: n too small")
    elif kind == "convergence-study":
        prob = _need(cfg, "problem", str, kind)
        if prob not in ("solve-1d", "solve-2d-slit", "solve-2d-halfspace"):
            raise ConfigError(f"convergence-study: unknown problem {prob!r}")
        levels = _need(cfg, "levels", list, kind)
        if len(levels) < 3:
            raise ConfigError("convergence-study: need at least 3 grid sizes")
        if any(not isinstance(v, int) for v in levels):
            raise ConfigError("convergence-study: levels must be integers")
        if any(b <= a for a, b in zip(levels, levels[1:])):
            raise ConfigError("convergence-study: levels must be strictly increasing")
        if prob == "solve-1d" and cfg.get("lam", -6.0) >= -3:
            raise ConfigError("convergence-study: need lam < -3")
    return kind


def config_hash(cfg: dict) -> str:
    return hashlib.sha256(json.dumps(cfg, sort_keys=True).encode()).hexdigest()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    return obj


def _write_summary(out: Path, cfg: dict, payload: dict) -> dict:
    summary = {
        "kind": cfg["kind"],
        "config": cfg,
        "config_hash": config_hash(cfg),
        "version": __version__,
    }
    summary.update(_jsonable(payload))
    out.mkdir(parents=True, exist_ok=True)
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return summary


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([f"{v:.17g}" if isinstance(v, float) else v for v in row])


def _perturbation_offsets(seed: int, amplitude: float, half_width: float):
    """Smooth tangential boundary-height perturbation: a seeded trigonometric
    sum a(x) with |a| <= amplitude."""
    rng = np.random.default_rng(seed)
    coeffs = rng.uniform(-1.0, 1.0, size=3)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=3)
    norm = np.sum(np.abs(coeffs)) or 1.0

    def a(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for m, (c, ph) in enumerate(zip(coeffs, phases), start=1):
            out = out + c * np.cos(m * np.pi * x / half_width + ph)
        return amplitude * out / norm

    return a


def perturbed_profile(seed: int, amplitude: float = 0.02, half_width: float = 2.25):
    """Near-1D data: (1/6)((y - a(x))_+)^3 with a seeded smooth graph a(x)."""
    a = _perturbation_offsets(seed, amplitude, half_width)

    def value(x, y):
        t = np.maximum(np.asarray(y, dtype=float) - a(x), 0.0)
        return t**3 / 6.0

    return value



def _solver_config(cfg: dict, tol: float) -> SolverConfig:
    """SolverConfig with optional per-experiment overrides under cfg["solver"]."""
    overrides = cfg.get("solver", {})
    if not isinstance(overrides, dict):
        raise ConfigError("'solver' must be an object of SolverConfig overrides")
    allowed = {"max_iterations", "fallback_iterations", "method", "linear_solver", "start"}
    bad = set(overrides) - allowed
    if bad:
        raise ConfigError(f"unknown solver overrides: {sorted(bad)}")
    return SolverConfig(kkt_tol=tol, **overrides)


# ---------------------------------------------------------------------------
# experiment drivers
# ---------------------------------------------------------------------------

def _gamma_estimate(u: ScalarField) -> float:
    b = fb.extract_free_boundary(u)
    return float(b.points[0, 0])


def _run_solve_1d(cfg: dict, out: Path, seed: int) -> dict:
    lam = float(cfg["lam"])
    n = int(cfg["n"])
    tol = float(cfg.get("tol", 1e-8))
    oracle = OneDimSolution(lam)
    problem = problem_interval(0.0, 1.0, n, g=(1.0, 0.0), slope=(lam, 0.0), label="one-dim")
    t0 = time.perf_counter()
    u, report = solve(problem, _solver_config(cfg, tol))
    elapsed = time.perf_counter() - t0
    gamma_hat = _gamma_estimate(u)
    fb.write_boundary_csv(fb.extract_free_boundary(u), out / "free_boundary.csv")
    ref = sample_field(oracle, problem.grid)
    linf = float(np.nanmax(np.abs(u.values - ref.values)))
    if cfg.get("save_field", True):
        save_field(u, out / "solution", fmt=cfg.get("field_format", "csv"))
    return {
        "lam": lam,
        "n": n,
        "h": problem.grid.h,
        "gamma_hat": gamma_hat,
        "gamma_oracle": oracle.gamma,
        "energy": report.energy,
        "energy_oracle": oracle.energy,
        "linf_error": linf,
        "kkt": report.to_dict(),
        "elapsed_s": elapsed,
    }


def _build_2d(cfg: dict, seed: int):
    name = cfg["oracle"]
    n = int(cfg["n"])
    if name == "slit":
        oracle = SlitExample()
        grid = disk_in_rectangle((0.0, 0.0), 1.0, n)
    elif name == "halfspace":
        oracle = HalfspaceCubic((0.0, 1.0))
        grid = square(float(cfg.get("half_width", 1.5)), n)
    elif name == "halfspace-rotated":
        theta = np.deg2rad(float(cfg.get("theta_deg", 30.0)))
        oracle = HalfspaceCubic((0.0, 1.0)).rotated(theta)
        grid = square(float(cfg.get("half_width", 1.5)), n)
    else:  # perturbed
        oracle = perturbed_profile(seed, float(cfg.get("amplitude", 0.02)),
                                   float(cfg.get("half_width", 2.25)))
        grid = square(float(cfg.get("half_width", 2.25)), n)
    return oracle, grid


def _solve_2d_ladder(cfg: dict, seed: int, levels: list[int], tol: float):
    """Solve at each level, warm-starting the contact set from the previous."""
    results = []
    prev = None
    for n in levels:
        oracle, grid = _build_2d({**cfg, "n": n}, seed)
        problem = problem_from_oracle(grid, oracle, label=str(cfg["oracle"]))
        start = transfer_mask(prev[0], prev[1], grid) if prev is not None else None
        t0 = time.perf_counter()
        u, report = solve(problem, _solver_config(cfg, tol), start_active=start)
        elapsed = time.perf_counter() - t0
        if cfg["oracle"] != "perturbed":
            ref = sample_field(oracle, grid)
            err = float(np.nanmax(np.abs(u.values - ref.values)[u.valid & ref.valid]))
        else:
            err = float("nan")
        results.append({"n": n, "h": grid.h, "linf_error": err, "energy": report.energy,
                        "kkt": report.to_dict(), "elapsed_s": elapsed})
        prev = (contact_mask(u, problem), grid)
        last = (u, problem, report)
    return results, last


def _run_solve_2d(cfg: dict, out: Path, seed: int) -> dict:
    tol = float(cfg.get("tol", 1e-8))
    n = int(cfg["n"])
    if cfg["oracle"] == "arrays":
        if cfg.get("domain", "disk") == "disk":
            grid = disk_in_rectangle((0.0, 0.0), float(cfg.get("radius", 1.0)), n)
        else:
            grid = square(float(cfg.get("half_width", 1.0)), n)
        g_arr = np.asarray(cfg["g"], dtype=float)
        f_arr = np.asarray(cfg["f"], dtype=float)
        try:
            problem = problem_from_boundary_data(grid, g_arr, f_arr, label="arrays")
        except ValueError as exc:
            raise ConfigError(f"solve-2d arrays: {exc}") from exc
        u, report = solve(problem, _solver_config(cfg, tol))
        results = [{"n": n, "h": grid.h, "linf_error": float("nan"),
                    "energy": report.energy, "kkt": report.to_dict()}]
    else:
        ladder = cfg.get("warm_ladder")
        levels = [int(v) for v in ladder] + [n] if ladder else [n]
        results, (u, problem, report) = _solve_2d_ladder(cfg, seed, levels, tol)
    if cfg.get("save_field", True):
        save_field(u, out / "solution", fmt=cfg.get("field_format", "csv"))
    try:
        bdry = fb.extract_free_boundary(u)
        fb.write_boundary_csv(bdry, out / "free_boundary.csv")
    except ValueError:
        pass  # no interior free boundary (e.g. strictly positive data)
    return {"levels": results, "n": n, "kkt": report.to_dict(),
            "linf_error": results[-1]["linf_error"], "energy": report.energy}


def _run_oracle_verify(cfg: dict, out: Path, seed: int) -> dict:
    name = cfg["oracle"]
    if name == "one-dim":
        lam = float(cfg.get("lam", -6.0))
        n = int(cfg.get("n", 1025))
        oracle = OneDimSolution(lam)
        grid = interval(0.0, 1.0, n)
        u = sample_field(oracle, grid)
        problem = problem_interval(0.0, 1.0, n, g=(1.0, 0.0), slope=(lam, 0.0))
        report = kkt_residuals(u, problem)
        return {"lam": lam, "gamma": oracle.gamma, "energy_formula": oracle.energy,
                "energy_discrete": report.energy, "measure_mass": report.measure_mass,
                "mass_formula": oracle.third_derivative_jump(), "kkt": report.to_dict()}
    if name == "halfspace":
        n = int(cfg.get("n", 181))
        grid = square(1.3, n)
        u = sample_field(HalfspaceCubic((0.0, 1.0)), grid)
        from .oracles import omega_norm

        d3 = fb.d3_norm(u, ball(1.0))
        return {"d3_b1": d3, "omega_n": omega_norm(2), "rel_err": abs(d3 - omega_norm(2)) / omega_norm(2)}
    # slit
    n = int(cfg.get("n", 257))
    grid = disk_in_rectangle((0.0, 0.0), 1.0, n)
    sl = SlitExample()
    u = sample_field(sl, grid)
    lap = laplacian(u)
    x, y = grid.coords()
    probe = lap.values.flat[np.argmin(np.abs(x - 0.25) + np.abs(y))]
    return {"u_at_1_0": float(sl.value(1.0, 0.0)), "lap_probe_quarter": float(probe),
            "lap_formula_quarter": 3.0}


def _run_blowup(cfg: dict, out: Path, seed: int) -> dict:
    src_name = cfg["source"]
    s = float(cfg["s"])
    K = int(cfg["K"])
    lam_w = float(cfg.get("lambda_weight", 1.0))
    n_work = int(cfg.get("n_work", 181))
    work = square(2.25, n_work)
    x0 = None
    if src_name == "halfspace":
        src = HalfspaceCubic((0.0, 1.0))
    elif src_name == "halfspace-rotated":
        src = HalfspaceCubic((0.0, 1.0)).rotated(np.deg2rad(float(cfg.get("theta_deg", 30.0))))
    elif src_name == "one-dim-embedded":
        oracle = OneDimSolution(float(cfg.get("lam", -6.0)))

        def src(x, y):
            return oracle.value(oracle.gamma + y)
    else:  # perturbed: solve, then blow up at the free-boundary point nearest the origin
        n = int(cfg.get("n", 257))
        oracle, grid = _build_2d({"oracle": "perturbed", "n": n, **cfg}, seed)
        problem = problem_from_oracle(grid, oracle, label="perturbed")
        u, _ = solve(problem, SolverConfig(kkt_tol=float(cfg.get("tol", 1e-8))))
        bdry = fb.extract_free_boundary(u)
        i0 = int(np.argmin(np.linalg.norm(bdry.points, axis=1)))
        x0 = bdry.points[i0]
        src = u
    trace = fb.blowup_sequence(src, s, K, lambda_weight=lam_w, work=work, x0=x0)
    _write_csv(out / "trace.csv", ["k", "A", "used_in_fit"] + [f"eta_{i}" for i in range(trace.directions.shape[1])],
               [[k, float(trace.values[k]), bool(trace.fit_used[k])] + [float(v) for v in trace.directions[k]]
                for k in range(len(trace.values))])
    payload = {"trace": trace.to_dict()}
    if x0 is not None:
        payload["x0"] = [float(v) for v in x0]
    return payload


def _run_membership(cfg: dict, out: Path, seed: int) -> dict:
    inst = cfg["instance"]
    n = int(cfg.get("n", 181))
    if inst == "slit":
        grid = disk_in_rectangle((0.0, 0.0), 1.0, n)
        u = sample_field(SlitExample(), grid)
    else:
        grid = square(2.3, n)
        hc = HalfspaceCubic((0.0, 1.0))
        if inst == "halfspace-rotated":
            hc = hc.rotated(np.deg2rad(float(cfg.get("theta_deg", 10.0))))
        u = sample_field(hc, grid)
    report = fb.class_membership(u, kappa=float(cfg["kappa"]), rho=float(cfg["rho"]),
                                 epsilon=float(cfg["epsilon"]), t=float(cfg["t"]))
    return {"report": report.to_dict()}


def _run_nta(cfg: dict, out: Path, seed: int) -> dict:
    name = cfg["mask"]
    n = int(cfg.get("n", 257))
    params = nta_mod.NTAParams(M=float(cfg["M"]), r0=float(cfg.get("r0", 0.5)))
    if name == "halfplane":
        grid = square(1.0, n)
        x, y = grid.coords()
        mask = y > 0
        x0s = cfg.get("x0", [[0.0, 0.0]])
    elif name == "disk":
        grid = square(1.0, n)
        x, y = grid.coords()
        mask = x**2 + y**2 < 0.5**2
        x0s = cfg.get("x0", [[0.5, 0.0]])
    else:  # slit positivity mask
        grid = disk_in_rectangle((0.0, 0.0), 1.0, n)
        u = sample_field(SlitExample(), grid)
        mask = fb.positivity_set(u)
        x0s = cfg.get("x0", [[-0.5, 0.0]])
    h = grid.h
    radii = cfg.get("radii") or [4 * h, 8 * h, 0.1, 0.25]
    dist_in = nta_mod.distance_to_complement(mask, grid)
    comp = grid.mask & ~mask
    dist_out = nta_mod.distance_to_complement(comp, grid)
    rows = []
    for x0 in x0s:
        for r in radii:
            ck = nta_mod.corkscrew(mask, grid, x0, float(r), params, dist=dist_in)
            ckc = nta_mod.corkscrew_complement(mask, grid, x0, float(r), params, dist=dist_out)
            rows.append({"x0": [float(v) for v in x0], "r": float(r),
                         "interior": ck.to_dict(), "complement": ckc.to_dict()})
    verdict = nta_mod.sampled_nta_verdict(mask, grid, params)
    return {"cases": rows, "sampled_verdict": verdict["verdict"], "details": verdict}


def _run_exponent(cfg: dict, out: Path, seed: int) -> dict:
    target = cfg["target"]
    x0 = tuple(float(v) for v in cfg.get("x0", (0.0, 0.0)))
    rng = (float(cfg["r_min"]), float(cfg["r_max"]))
    n_radii = int(cfg.get("n_radii", 12))
    if target == "slit-laplacian":
        sl = SlitExample()
        fit = fb.holder_exponent(lambda xx, yy: sl.laplacian(xx, yy), x0, rng, n_radii)
        expected = 0.5
    elif target == "halfspace-laplacian":
        hc = HalfspaceCubic((0.0, 1.0))
        fit = fb.holder_exponent(lambda xx, yy: hc.laplacian(xx, yy), x0, rng, n_radii)
        expected = 1.0
    elif target == "radial":
        p = float(cfg.get("power", 2.0))
        fit = fb.holder_exponent(lambda xx, yy: np.hypot(xx, yy) ** p, x0, rng, n_radii)
        expected = p
    else:  # solved-slit-laplacian
        n = int(cfg.get("n", 513))
        ladder = cfg.get("warm_ladder", [129, 257])
        results, (u, problem, report) = _solve_2d_ladder(
            {"oracle": "slit"}, seed, [int(v) for v in ladder] + [n], float(cfg.get("tol", 1e-8)))
        lap = laplacian(u)
        fit = fb.holder_exponent(lap, x0, rng, n_radii)
        expected = 0.5
    _write_csv(out / "ladder.csv", ["r", "sup"], list(zip(map(float, fit.radii), map(float, fit.sups))))
    return {"alpha_hat": fit.alpha, "expected": expected, "r2": fit.r2,
            "dropped_radii": fit.dropped}


def _run_measure_identity(cfg: dict, out: Path, seed: int) -> dict:
    n = int(cfg["n"])
    center = tuple(float(v) for v in cfg.get("bump_center", (-0.5, 0.0)))
    radius = float(cfg.get("bump_radius", 0.3))
    bump = RadialBump(center, radius)
    oracle_value = slit_measure_pairing(bump)
    grid = disk_in_rectangle((0.0, 0.0), 1.0, n)
    sl = SlitExample()
    u = sample_field(sl, grid)
    f = sample_field(bump, grid)
    lap_u = laplacian(u)
    lap_f = laplacian(f)
    sel = lap_u.valid & lap_f.valid
    discrete = float(np.sum(lap_u.values[sel] * lap_f.values[sel]) * grid.h**2)
    return {
        "n": n,
        "oracle_pairing": oracle_value,
        "discrete_pairing": discrete,
        "rel_error": abs(discrete - oracle_value) / abs(oracle_value),
    }


def convergence_study(cfg: dict, out: Path, seed: int) -> dict:
    """Errors against the named oracle on a grid ladder with observed orders."""
    prob = cfg["problem"]
    levels = [int(v) for v in cfg["levels"]]
    tol = float(cfg.get("tol", 1e-8))
    rows = []
    if prob == "solve-1d":
        lam = float(cfg.get("lam", -6.0))
        oracle = OneDimSolution(lam)
        for n in levels:
            problem = problem_interval(0.0, 1.0, n, g=(1.0, 0.0), slope=(lam, 0.0))
            u, report = solve(problem, SolverConfig(kkt_tol=tol))
            ref = sample_field(oracle, problem.grid)
            err = float(np.nanmax(np.abs(u.values - ref.values)))
            e_err = abs(report.energy - oracle.energy)
            rows.append({"n": n, "h": problem.grid.h, "linf_error": err, "energy_error": e_err})
        key = "energy_error"
    else:
        name = "slit" if prob.endswith("slit") else "halfspace"
        results, _ = _solve_2d_ladder({"oracle": name}, seed, levels, tol)
        rows = [{k: r[k] for k in ("n", "h", "linf_error", "energy")} for r in results]
        key = "linf_error"
    for i, row in enumerate(rows):
        if i == 0:
            row["observed_order"] = float("nan")
        else:
            e0, e1 = rows[i - 1][key], row[key]
            h0, h1 = rows[i - 1]["h"], row["h"]
            row["observed_order"] = float(np.log(e0 / e1) / np.log(h0 / h1)) if e1 > 0 else float("inf")
    _write_csv(out / "study.csv",
               ["n", "h", key, "observed_order"],
               [[r["n"], r["h"], r[key], r["observed_order"]] for r in rows])
    return {"rows": rows, "error_key": key}


_RUNNERS = {
    "solve-1d": _run_solve_1d,
    "solve-2d": _run_solve_2d,
    "oracle-verify": _run_oracle_verify,
    "blowup": _run_blowup,
    "membership": _run_membership,
    "nta": _run_nta,
    "exponent": _run_exponent,
    "measure-identity": _run_measure_identity,
    "convergence-study": convergence_study,
}


def run(cfg: dict, out_dir: str | Path, seed: int | None = None) -> dict:
    """Validate and execute one experiment; returns the summary dictionary.

    Raises ConfigError for invalid configs and SolverError when the solver
    fails to certify (the CLI maps these to exit codes 2 and 3).
    """
    kind = validate_config(cfg)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    seed = int(cfg.get("seed", 0)) if seed is None else int(seed)
    try:
        payload = _RUNNERS[kind](cfg, out, seed)
    except SolverError as exc:
        if exc.field is not None:
            save_field(exc.field, out / "best_iterate")
        if exc.report is not None:
            (out / "failure.json").write_text(
                json.dumps(_jsonable({"error": str(exc), "report": exc.report.to_dict()}),
                           indent=2, sort_keys=True) + "\n")
        raise
    payload.setdefault("seed", seed)
    return _write_summary(out, cfg, payload)
