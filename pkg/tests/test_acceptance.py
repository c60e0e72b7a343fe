"""Acceptance criteria, one group of tests per criterion.

Run with ``pytest tests/test_acceptance.py``; the summary at the end of the
run prints one pass/fail line per criterion with the measured numbers.
"""
import math
from pathlib import Path

import mpmath as mp
import numpy as np
import pytest

from dunklflow.asymptotics import (fit_slope, kernel_norm_curve, linear_error_curve, lp_norm,
                                   moment_rate_check, norm_decay_grid, scaling_exponent)
from dunklflow.cli import nonlinear_problem, order_check
from dunklflow.config import ExperimentConfig
from dunklflow.core import (GridFunction, ReflectionConfig, dunkl_inverse_transform, dunkl_kernel,
                            dunkl_transform, make_grid)
from dunklflow.heat import KernelSpec, auto_half_width, auto_spectral_grid, frac_heat_kernel, heat_kernel_on
from dunklflow.nonlinear import MassKind, asymptotic_mass, comparison_check, evolve, nonlinear_error_curve
from dunklflow.presets import bump, make_preset, preset_grid
from dunklflow.translation import dunkl_translate, young_check

RANK_ONE = (0.5, 1.0, 1.5)
TENSOR = ReflectionConfig(2, (0.5, 1.0))
CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def _cfgs(ks):
    return [ReflectionConfig.rank_one(k) for k in ks]


# --------------------------------------------------------------------------
# 1. normalization of h_t


@pytest.mark.criterion(1)
@pytest.mark.parametrize("cfg", _cfgs((0.0,) + RANK_ONE) + [TENSOR], ids=lambda c: f"k={c.k}")
def test_heat_kernel_normalization(cfg, acceptance):
    worst = 0.0
    for t in (0.1, 1.0, 10.0):
        L = max(auto_half_width(t), 6.0)
        grid = make_grid(cfg, L=L, n=32 * math.ceil(L))
        worst = max(worst, abs(heat_kernel_on(grid, t).integral() - 1.0))
    acceptance.note(1, f"k={cfg.k}: {worst:.1e}")
    assert worst <= 1e-6


# --------------------------------------------------------------------------
# 2. transform fidelity


def _fidelity(cfg, f, sg):
    F = dunkl_transform(cfg, f, sg)
    planch = abs(lp_norm(cfg, F, 2.0) / lp_norm(cfg, f, 2.0) - 1.0)
    back = dunkl_inverse_transform(cfg, F, f.grid, check=False)
    return planch, float(np.max(np.abs(back.values - f.values)))


@pytest.mark.criterion(2)
@pytest.mark.parametrize("cfg", _cfgs(RANK_ONE) + [TENSOR], ids=lambda c: f"k={c.k}")
def test_transform_fidelity(cfg, acceptance):
    # quarter-width panels; the compact bump has radius 4 so its spectrum is resolved
    L, per_unit = (10.0, 128) if cfg.d == 1 else (10.0, 32)
    grid = make_grid(cfg, L=L, n=int(L * per_unit))
    sg = auto_spectral_grid(grid)
    mesh = grid.mesh() if cfg.d > 1 else (grid.axes[0].nodes,)
    gauss = GridFunction(grid, np.exp(-sum((x - 0.7) ** 2 for x in mesh)))
    inputs = [gauss] + ([bump(grid, 0.5, 4.0)] if cfg.d == 1 else [])
    planch = trip = 0.0
    for f in inputs:
        p, r = _fidelity(cfg, f, sg)
        planch, trip = max(planch, p), max(trip, r)
    Fh = dunkl_transform(cfg, heat_kernel_on(grid, 1.0), sg)
    heat = float(np.max(np.abs(Fh.values - np.exp(-sg.radius ** 2))))
    acceptance.note(2, f"k={cfg.k}: plancherel {planch:.1e}, round trip {trip:.1e}, F h_1 {heat:.1e}")
    assert planch <= 1e-6 and trip <= 1e-6 and heat <= 1e-6


# --------------------------------------------------------------------------
# 3. kernel against an independent series


def _kernel_series(k, x, y):
    # power series of the solution of T_k E = y E, E(0) = 1: c_n = c_(n-1) / (n + 2k [n odd])
    with mp.workdps(40):
        z = mp.mpf(x) * mp.mpf(y)
        term, total, n = mp.mpf(1), mp.mpf(1), 0
        while True:
            n += 1
            term = term * z / (n + (2 * mp.mpf(k) if n % 2 else 0))
            total += term
            if abs(term) < mp.mpf(10) ** -35 * abs(total) and n > 10:
                return float(total)


@pytest.mark.criterion(3)
@pytest.mark.parametrize("k", RANK_ONE)
def test_kernel_matches_series(k, acceptance):
    cfg = ReflectionConfig.rank_one(k)
    pts = np.linspace(-2.0, 2.0, 5)
    worst = bound = 0.0
    for x in pts:
        closed = np.asarray(dunkl_kernel(cfg, x, pts)).real
        oracle = np.array([_kernel_series(k, x, y) for y in pts])
        worst = max(worst, float(np.max(np.abs(closed - oracle) / np.abs(oracle))))
        bound = max(bound, float(np.max(np.abs(dunkl_kernel(cfg, 1j * x, np.linspace(-40, 40, 81))))))
    acceptance.note(3, f"k={k:g}: rel {worst:.1e}, max|E(ix,y)| {bound:.12f}")
    assert worst <= 1e-10
    assert bound <= 1.0 + 1e-10


# --------------------------------------------------------------------------
# 4. translation


@pytest.mark.criterion(4)
@pytest.mark.parametrize("k", RANK_ONE)
def test_translation(k, acceptance):
    cfg = ReflectionConfig.rank_one(k)
    # wide enough for tau_3 h_1, fine enough (panel width 0.2) for the radius-4 bump
    grid = make_grid(cfg, L=14.0, n=2240)
    sg = auto_spectral_grid(grid)
    routes = floor = mass = ident = 0.0
    for f in (heat_kernel_on(grid, 1.0), bump(grid, 0.0, 4.0)):
        for x in (0.3, 1.0, 3.0):
            a = dunkl_translate(cfg, f, [x], "spectral", spectral_grid=sg)
            b = dunkl_translate(cfg, f, [x], "explicit")
            routes = max(routes, float(np.max(np.abs(a.values - b.values))))
            floor = min(floor, float(a.values.min()), float(b.values.min()))
            mass = max(mass, abs(a.integral().real - f.integral().real))
        zero = dunkl_translate(cfg, f, [0.0], spectral_grid=sg)
        ident = max(ident, float(np.max(np.abs(zero.values - f.values))))
    acceptance.note(4, f"k={k:g}: routes {routes:.1e}, tau_0 {ident:.1e}, min {floor:.1e}, mass {mass:.1e}")
    assert routes <= 1e-5
    assert ident <= 1e-6
    assert floor >= -1e-8
    assert mass <= 1e-6


# --------------------------------------------------------------------------
# 5. fractional kernel


@pytest.mark.criterion(5)
@pytest.mark.parametrize("k", [0.5, 1.0])
def test_fractional_routes(k, acceptance):
    cfg = ReflectionConfig.rank_one(k)
    grid = make_grid(cfg, L=30.0, n=960)
    worst = 0.0
    for alpha in (0.5, 0.75):
        for t in (1.0, 10.0):
            a = frac_heat_kernel(cfg, KernelSpec(t, alpha, "spectral"), grid).values
            b = frac_heat_kernel(cfg, KernelSpec(t, alpha, "subordination"), grid).values
            worst = max(worst, float(np.max(np.abs(a - b))))
    acceptance.note(5, f"k={k:g}: routes {worst:.1e}")
    assert worst <= 1e-4


@pytest.mark.criterion(5)
def test_poisson_profile(acceptance):
    cfg = ReflectionConfig.rank_one(0.0)
    grid = make_grid(cfg, L=30.0, n=960)
    x = grid.axes[0].nodes
    poisson = math.sqrt(2.0 / math.pi) / (1.0 + x * x)
    worst = max(float(np.max(np.abs(frac_heat_kernel(cfg, KernelSpec(1.0, 0.5, r), grid).values - poisson)))
                for r in ("spectral", "subordination"))
    acceptance.note(5, f"Poisson {worst:.1e}")
    assert worst <= 1e-5


# --------------------------------------------------------------------------
# 6. norm decay of h_{t,alpha}


@pytest.mark.criterion(6)
@pytest.mark.parametrize("alpha", [0.5, 1.0])
def test_kernel_norm_decay(alpha, acceptance, k1):
    t = np.logspace(0, 2, 9)
    grid = norm_decay_grid(k1, alpha, float(t[-1]))
    parts = []
    for p in (1.0, 2.0, math.inf):
        _, norms = kernel_norm_curve(k1, alpha, p, t, grid)
        slope = fit_slope(t, norms, 0.0)[0]
        target = -scaling_exponent(k1, alpha, p)
        parts.append(f"p={p:g} {slope:+.4f} ({target:+.4f})")
        assert abs(slope - target) <= (0.01 if p == 1.0 else 0.05)
    acceptance.note(6, f"alpha={alpha:g}: " + ", ".join(parts))


# --------------------------------------------------------------------------
# 7. first-moment rate


@pytest.mark.criterion(7)
def test_first_moment_rate(acceptance):
    config = ExperimentConfig.from_file(CONFIGS / "moment-rate.cfg")
    cfg = config.reflection
    f = make_preset(config.u0_preset, cfg, preset_grid(cfg))
    rep = moment_rate_check(cfg, f, config.times, threads=4)
    # one C per channel bounds every sample, and the ratio error / (N_1 t^-1/2) is nearly
    # flat, so the bound is attained at the t^-1/2 rate rather than being loose
    bound = rep.n1 * rep.t ** -0.5
    spread = []
    for err, c in ((rep.l1_error, rep.constant_l1), (rep.sup_scaled, rep.constant_sup)):
        assert np.all(err <= c * bound * (1 + 1e-12))
        spread.append(float(np.max(err / bound) / np.min(err / bound)))
    acceptance.note(7, f"slopes L1 {rep.slope_l1:+.3f}, sup {rep.slope_sup:+.3f}; C_L1 {rep.constant_l1:.3f}, "
                       f"C_sup {rep.constant_sup:.3f} (max/min ratio {spread[0]:.3f}, {spread[1]:.3f}), "
                       f"N1 {rep.n1:.3f}")
    assert rep.slopes_within(-0.5, 0.1)
    assert max(spread) <= 1.5


# --------------------------------------------------------------------------
# 8. linear long-time limit


@pytest.mark.criterion(8)
@pytest.mark.parametrize("preset", ["bump", "dipole-plus-mass"])
@pytest.mark.parametrize("alpha", [0.5, 1.0])
def test_linear_decade_decay(preset, alpha, acceptance, k1):
    u0 = make_preset(preset, k1, preset_grid(k1))
    t = np.logspace(0, 3, 31)
    parts = []
    for p in (1.0, 2.0, math.inf):
        curve = linear_error_curve(k1, u0, alpha, p, t, threads=4)
        parts.append(f"p={p:g} ratio {curve.decade_ratio:.3f} final {curve.scaled[-1]:.1e}")
        assert curve.decade_ratio <= 0.2
        assert curve.scaled[-1] <= 0.1
    acceptance.note(8, f"{preset} alpha={alpha:g}: " + "; ".join(parts))


# --------------------------------------------------------------------------
# 9. absorbing nonlinear flow


@pytest.fixture(scope="module")
def nonlinear_run():
    config = ExperimentConfig.from_file(CONFIGS / "nonlinear.cfg")
    problem = nonlinear_problem(config)
    trace = evolve(problem)
    return config, problem, trace, asymptotic_mass(trace)


@pytest.mark.criterion(9)
def test_nonlinear_mass(nonlinear_run, acceptance):
    _, _, trace, est = nonlinear_run
    res = float(trace.residual.max())
    acceptance.note(9, f"M_inf {est.value:.5f} +- {est.relative_error:.1e} rel, residual {res:.1e}")
    assert est.kind is MassKind.CONCLUSIVE
    assert est.value > 0
    assert est.relative_error <= 0.05
    assert trace.mass_nonincreasing
    assert res <= 1e-4


@pytest.mark.criterion(9)
def test_nonlinear_residual_order(nonlinear_run, acceptance):
    config = nonlinear_run[0]
    order = order_check(config)
    acceptance.note(9, f"residual ratio dt/(dt/2) {order['ratio']:.2f}")
    assert 3.0 <= order["ratio"] <= 5.0


@pytest.mark.criterion(9)
def test_nonlinear_comparison(nonlinear_run, acceptance):
    _, problem, trace, _ = nonlinear_run
    rep = comparison_check(trace, problem, slack=1e-6)
    acceptance.note(9, f"comparison excess {max(rep.excess):.1e}")
    assert rep.holds


@pytest.mark.criterion(9)
@pytest.mark.parametrize("q", [1.0, 2.0])
def test_nonlinear_profile(nonlinear_run, acceptance, q):
    _, problem, trace, est = nonlinear_run
    curve = nonlinear_error_curve(trace, problem, q, est.value)
    acceptance.note(9, f"q={q:g} decade ratio {curve.decade_ratio:.3f}")
    assert curve.decreasing_by_decade()


# --------------------------------------------------------------------------
# 10. Young's inequality


YOUNG = ((1.0, 1.0, 1.0), (1.0, 2.0, 2.0), (2.0, 1.0, 2.0), (1.0, math.inf, math.inf),
         (2.0, 2.0, math.inf), (4.0 / 3.0, 4.0 / 3.0, 2.0))


@pytest.mark.criterion(10)
@pytest.mark.parametrize("k", [0.5, 1.0])
def test_young_matrix(k, acceptance):
    cfg = ReflectionConfig.rank_one(k)
    grid = make_grid(cfg, L=10.0, n=1280)
    sg = auto_spectral_grid(grid)
    f, g = bump(grid, 0.5, 1.5), heat_kernel_on(grid, 1.0)
    worst = 0.0
    for p, q, r in YOUNG:
        rep = young_check(cfg, f, g, p, q, r, spectral_grid=sg)
        worst = max(worst, rep.ratio)
        assert rep.holds
    acceptance.note(10, f"k={k:g}: max ||f*g||_r / ||f||_p ||g||_q {worst:.4f}")


@pytest.mark.criterion(10)
def test_young_equality_case(acceptance):
    cfg = ReflectionConfig.rank_one(0.0)
    grid = make_grid(cfg, L=10.0, n=1280)
    rep = young_check(cfg, bump(grid, 0.0, 1.5), heat_kernel_on(grid, 1.0), 1.0, 1.0, 1.0,
                      spectral_grid=auto_spectral_grid(grid))
    acceptance.note(10, f"k=0 equality {abs(rep.ratio - 1):.1e}")
    assert abs(rep.ratio - 1.0) <= 1e-6
