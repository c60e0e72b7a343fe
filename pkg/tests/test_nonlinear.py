import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from dunklflow.core import GridFunction, ReflectionConfig
from dunklflow.errors import DomainError, TruncationError
from dunklflow.heat import heat_kernel_on
from dunklflow.nonlinear import (EvolutionTrace, MassKind, NonlinearProblem, asymptotic_mass,
                                 comparison_check, evolve, nonlinear_error_curve, solver_pair)
from dunklflow.presets import make_preset, preset_grid


def _problem(k=0.5, alpha=0.5, p=2.0, t_end=0.5, dt=1e-2, **kw):
    cfg = ReflectionConfig.rank_one(k)
    return NonlinearProblem(cfg, alpha, p, make_preset("gaussian", cfg), t_end=t_end, dt=dt, **kw)


@pytest.fixture(scope="module")
def short():
    problem = _problem(snapshots=(0.1, 0.25, 0.5))
    return problem, evolve(problem)


@pytest.mark.parametrize("kw", [dict(p=1.5), dict(p=1.2), dict(alpha=1.2), dict(alpha=0.0), dict(t_end=0.0),
                                dict(dt=-1.0), dict(dt_rel=-0.1), dict(q=(1.0, math.inf))])
def test_problem_validation(kw):
    with pytest.raises(DomainError):
        _problem(**kw)


def test_problem_rejects_negative_or_complex_data():
    cfg = ReflectionConfig.rank_one(0.5)
    u0 = make_preset("dipole-plus-mass", cfg)
    with pytest.raises(DomainError):
        NonlinearProblem(cfg, 0.5, 2.0, u0, t_end=1.0)
    h = heat_kernel_on(u0.grid, 1.0)
    with pytest.raises(DomainError):
        NonlinearProblem(cfg, 0.5, 2.0, h.with_values(h.values + 0j), t_end=1.0)


def test_threshold_and_default_snapshots():
    problem = _problem(t_end=1000.0)
    assert problem.threshold == pytest.approx(1.5)
    assert len(problem.snapshots) == 31
    assert problem.snapshots[0] == pytest.approx(1.0)
    assert problem.snapshots[-1] == pytest.approx(1000.0)


def test_solver_pair_is_cached():
    cfg = ReflectionConfig.rank_one(0.5)
    assert solver_pair(cfg, 30.0, 24.0) is solver_pair(cfg, 30.0, 24.0)


def test_short_run_invariants(short):
    problem, trace = short
    assert [s.t for s in trace.snapshots] == pytest.approx([0.1, 0.25, 0.5])
    assert trace.times[-1] == pytest.approx(0.5)
    assert trace.mass_nonincreasing
    assert trace.mass[-1] < trace.initial_mass
    assert trace.initial_mass == pytest.approx(1.0, rel=1e-12)
    assert trace.residual.max() <= 1e-4
    assert trace.min_relative >= -1e-6


def test_comparison_with_linear_flow(short):
    problem, trace = short
    rep = comparison_check(trace, problem)
    assert rep.holds
    assert len(rep.excess) == 3


def test_residual_is_second_order():
    # Strang splitting with trapezoidal bookkeeping: halving dt quarters the residual
    res = [evolve(_problem(t_end=0.5, dt=h)).residual.max() for h in (2e-3, 1e-3)]
    assert 3.0 <= res[0] / res[1] <= 5.0


def _fd_reference(x0, u0, p, t_end):
    # u_t = u_xx - u^p, fourth-order differences, homogeneous far field
    h = x0[1] - x0[0]

    def rhs(_, u):
        pad = np.concatenate([[0.0, 0.0], u, [0.0, 0.0]])
        lap = (-pad[4:] + 16 * pad[3:-1] - 30 * pad[2:-2] + 16 * pad[1:-3] - pad[:-4]) / (12 * h * h)
        return lap - np.maximum(u, 0.0) ** p

    sol = solve_ivp(rhs, (0.0, t_end), u0, method="RK45", rtol=1e-10, atol=1e-13)
    return sol.y[:, -1]


def test_classical_case_against_finite_differences():
    # k = 0, alpha = 1: the equation is u_t = u_xx - u^4 with dx / sqrt(2 pi)
    cfg = ReflectionConfig.rank_one(0.0)
    u0 = GridFunction(preset_grid(cfg), np.exp(-preset_grid(cfg).axes[0].nodes ** 2))
    problem = NonlinearProblem(cfg, 1.0, 4.0, u0, t_end=1.0, dt=2.5e-3, snapshots=(1.0,))
    snap = evolve(problem).snapshots[-1]
    x = np.linspace(-15, 15, 1501)
    ref = _fd_reference(x, np.exp(-x * x), 4.0, 1.0)
    np.testing.assert_allclose(snap.u.evaluate(x), ref, atol=1e-5)


def _synthetic_trace(a, T=1000.0, c=1e-2):
    # int u^p = c t^-a for t >= 1, loss and mass consistent with it
    t = np.concatenate([[0.0], np.logspace(0, math.log10(T), 400)])
    power = np.where(t > 0, c * np.maximum(t, 1.0) ** -a, c)
    loss = np.concatenate([[0.0], np.cumsum(0.5 * np.diff(t) * (power[1:] + power[:-1]))])
    return EvolutionTrace(t, 1.0 - loss, loss, power, [], None, 0.0, 1.0)


def test_asymptotic_mass_extrapolates_tail():
    est = asymptotic_mass(_synthetic_trace(2.0))
    assert est.kind is MassKind.CONCLUSIVE
    assert est.decay == pytest.approx(2.0, rel=1e-6)
    # int_T^inf c t^-2 dt = c / T
    assert est.error_bar == pytest.approx(1e-2 / 1000.0, rel=1e-6)
    # c on [0, 1], then c (1 - 1/T) on [1, T]
    assert est.value == pytest.approx(1.0 - 1e-2 * (2 - 1e-3), rel=1e-5)
    assert est.relative_error < 1e-4


def test_asymptotic_mass_inconclusive_cases():
    slow = asymptotic_mass(_synthetic_trace(1.0))
    assert slow.kind is MassKind.INCONCLUSIVE
    heavy = asymptotic_mass(_synthetic_trace(1.5, c=0.5))
    assert heavy.kind is MassKind.INCONCLUSIVE
    assert "dissipation" in heavy.reason


def test_asymptotic_mass_zero():
    tr = _synthetic_trace(2.0)
    tr.initial_mass = 0.0
    assert asymptotic_mass(tr).kind is MassKind.ZERO


def test_error_curve_q_domain(short):
    problem, trace = short
    with pytest.raises(DomainError):
        nonlinear_error_curve(trace, problem, math.inf, m_inf=0.5)
    curve = nonlinear_error_curve(trace, problem, 1.0, m_inf=trace.mass[-1])
    assert curve.t.size == 3
    assert np.all(curve.raw > 0)


def test_inconclusive_mass_blocks_error_curve(short):
    problem, trace = short
    with pytest.raises(DomainError):
        nonlinear_error_curve(trace, problem, 2.0)


def test_unresolved_spectrum_raises():
    # 3 exp(-x^2) with p = 4 develops complex singularities close to the real axis
    cfg = ReflectionConfig.rank_one(0.0)
    grid = preset_grid(cfg)
    u0 = GridFunction(grid, 3.0 * np.exp(-grid.axes[0].nodes ** 2))
    with pytest.raises(TruncationError) as info:
        evolve(NonlinearProblem(cfg, 1.0, 4.0, u0, t_end=1.0, dt=2.5e-3))
    assert info.value.time > 0
