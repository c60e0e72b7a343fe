"""Absorbing fractional Dunkl heat equation u_t + (-Delta_k)^alpha u = -u^p.

The solution is carried as its Dunkl transform on a spectral grid, so the
linear part of each Strang step is an exact multiplication and the mass
int u d mu_k = F_k u(0) is never lost to the algebraic tails that the
fractional flow develops outside a finite physical window.  The nonlinear
half-steps are done pointwise on the physical grid with the exact solution
of u' = -u^p, and only the decrement u - N(u) is transformed back.
As the solution spreads, both grids are rescaled by powers of two.
"""
from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass

import numpy as np

from .asymptotics import ErrorCurve, fit_slope, lp_norm, scaling_exponent, time_scale
from .core import (PANEL_PHASE, DECAY_TOL, GridFunction, ReflectionConfig, SpectralPair, check_decay,
                   dunkl_transform, make_grid, uniform_edges)
from .errors import DomainError, TruncationError
from .heat import auto_spectral_grid


@dataclass(frozen=True)
class NonlinearProblem:
    cfg: ReflectionConfig
    alpha: float
    p: float
    u0: GridFunction
    t_end: float
    dt: float = 1e-3
    q: tuple = (1.0, 2.0)
    # after the early phase the step grows like dt_rel * t (0 keeps dt fixed)
    dt_rel: float = 0.0
    snapshots: tuple | None = None
    # self-similar grid: physical half-width and spectral half-width
    half_width: float = 30.0
    extent: float = 24.0

    def __post_init__(self):
        if not (0.0 < self.alpha <= 1.0):
            raise DomainError(f"alpha must lie in (0, 1], got {self.alpha}")
        threshold = 1.0 + 2.0 * self.alpha / self.cfg.d_k
        if not self.p > threshold:
            raise DomainError(
                f"p = {self.p} must exceed 1 + 2 alpha / d_k = {threshold:.6g}; "
                "the long-time mass limit is only established above this threshold")
        if np.any(np.asarray(self.u0.values).real < 0) or np.iscomplexobj(self.u0.values):
            raise DomainError("initial datum must be real and nonnegative")
        if not (self.t_end > 0 and self.dt > 0 and self.dt_rel >= 0):
            raise DomainError("t_end and dt must be positive, dt_rel nonnegative")
        for q in self.q:
            if not 1.0 <= q < math.inf:
                raise DomainError(f"error exponents q must lie in [1, inf), got {q}")
        if self.snapshots is None:
            times = np.logspace(math.log10(self.t_end) - 3.0, math.log10(self.t_end), 31)
            object.__setattr__(self, "snapshots", tuple(float(x) for x in times))
        else:
            object.__setattr__(self, "snapshots", tuple(sorted(float(x) for x in self.snapshots)))

    @property
    def threshold(self) -> float:
        return 1.0 + 2.0 * self.alpha / self.cfg.d_k


@dataclass
class Snapshot:
    t: float
    scale: float
    u: GridFunction
    # F_k u on the spectral grid at the same scale
    spectrum: GridFunction


@dataclass
class EvolutionTrace:
    times: np.ndarray
    mass: np.ndarray
    loss: np.ndarray
    # int u^p d mu_k at each stamp
    power: np.ndarray
    snapshots: list
    pair: SpectralPair
    # most negative sample seen, relative to the running maximum
    min_relative: float = 0.0
    initial_mass: float = 0.0

    @property
    def residual(self) -> np.ndarray:
        """|int u0 - M(t) - int_0^t int u^p| at every stamp."""
        return np.abs(self.initial_mass - self.mass - self.loss)

    @property
    def mass_nonincreasing(self) -> bool:
        return bool(np.all(np.diff(self.mass) <= 1e-10))


@functools.lru_cache(maxsize=8)
def solver_pair(cfg: ReflectionConfig, half_width: float, extent: float, order: int = 16) -> SpectralPair:
    panels = int(math.ceil(half_width * extent / (2.0 * PANEL_PHASE * order)))
    physical = make_grid(cfg, edges=uniform_edges(half_width, panels), order=order)
    spectral = auto_spectral_grid(physical, alpha=0.5, out_L=half_width, extent=extent)
    return SpectralPair(physical, spectral)


def _spectral_edge_ratio(U: np.ndarray) -> float:
    a = np.abs(U)
    peak = float(np.max(a))
    if peak == 0.0:
        return 0.0
    edge = max(float(np.max(np.take(a, i, axis=j))) for j in range(a.ndim) for i in (0, -1))
    return edge / peak


def _regrid_matrices(pair: SpectralPair):
    # values on the spectral grid at scale 2s, read off the grid at scale s
    return [ax.interpolation_matrix(ax.nodes / 2.0) for ax in pair.spectral.axes]


def _apply_axiswise(values, mats):
    out = values
    for j, m in enumerate(mats):
        out = np.moveaxis(np.moveaxis(out, j, -1) @ m.T, -1, j)
    return out


def evolve(problem: NonlinearProblem) -> EvolutionTrace:
    """Strang splitting N(dt/2) L(dt) N(dt/2), recorded at every step."""
    cfg, alpha, p = problem.cfg, problem.alpha, problem.p
    pair = solver_pair(cfg, problem.half_width, problem.extent)
    u0 = problem.u0
    check_decay(u0, what="initial datum")
    scale = 1.0
    U = dunkl_transform(cfg, u0, pair.spectral_at(scale), check=False).values
    m0 = float(np.real(u0.integral()))
    r2a = pair.spectral.radius ** (2.0 * alpha)
    regrid = _regrid_matrices(pair)
    weights = pair.physical.weights

    def physical(U, s):
        return pair.inverse(U, s).real

    def power_of(u, s):
        return float(np.sum(np.maximum(u, 0.0) ** p * weights)) * s ** cfg.d_k

    def half_step(U, s, h):
        u = physical(U, s)
        v = np.zeros_like(u)
        pos = u > 0
        with np.errstate(over="ignore"):
            v[pos] = (u[pos] ** (1.0 - p) + (p - 1.0) * h) ** (-1.0 / (p - 1.0))
        delta = np.where(pos, u - v, 0.0)
        drop = float(np.sum(delta * weights)) * s ** cfg.d_k
        return U - pair.forward(delta, s), u, v, drop

    times, mass, loss, power = [0.0], [m0], [0.0], [power_of(physical(U, scale), scale)]
    snaps, pending = [], list(problem.snapshots)
    min_rel = 0.0
    t = 0.0
    while t < problem.t_end * (1 - 1e-12):
        dt = max(problem.dt, problem.dt_rel * t)
        target = min(problem.t_end, pending[0]) if pending else problem.t_end
        if t + dt > target * (1 - 1e-12):
            dt = target - t
        U, _, _, d1 = half_step(U, scale, 0.5 * dt)
        U = U * np.exp(-dt * r2a * scale ** (-2.0 * alpha))
        U, u_b, v_b, d2 = half_step(U, scale, 0.5 * dt)
        t = t + dt if t + dt < target * (1 - 1e-12) else target
        peak = float(np.max(np.abs(u_b)))
        if peak > 0:
            min_rel = min(min_rel, float(np.min(u_b)) / peak)
        times.append(t)
        mass.append(mass[-1] - d1 - d2)
        power.append(power_of(v_b, scale))
        loss.append(loss[-1] + 0.5 * dt * (power[-2] + power[-1]))
        if _spectral_edge_ratio(U) > DECAY_TOL:
            raise TruncationError(
                f"spectrum not resolved at t = {t:.6g} (edge ratio {_spectral_edge_ratio(U):.2e})",
                boundary=_spectral_edge_ratio(U), time=t)
        if pending and abs(t - pending[0]) <= 1e-12 * max(1.0, t):
            pending.pop(0)
            snaps.append(Snapshot(t, scale, GridFunction(pair.physical_at(scale), v_b),
                                  GridFunction(pair.spectral_at(scale), U.copy())))
        while time_scale(t, alpha) >= 2.0 * scale:
            U = _apply_axiswise(U, regrid)
            scale *= 2.0
    return EvolutionTrace(np.array(times), np.array(mass), np.array(loss), np.array(power),
                          snaps, pair, min_rel, m0)


# --------------------------------------------------------------------------
# checks on a trace


@dataclass(frozen=True)
class ComparisonReport:
    times: tuple
    # max over samples of u - h_{t,alpha} *_k u0, per snapshot
    excess: tuple
    slack: float = 1e-6

    @property
    def holds(self) -> bool:
        return all(e <= self.slack for e in self.excess)


def linear_flow_on(problem: NonlinearProblem, pair: SpectralPair, t: float, scale: float) -> np.ndarray:
    """h_{t,alpha} *_k u0 on the physical grid at ``scale``."""
    F = dunkl_transform(problem.cfg, problem.u0, pair.spectral_at(scale), check=False).values
    mult = np.exp(-t * (pair.spectral.radius / scale) ** (2.0 * problem.alpha))
    return pair.inverse(F * mult, scale).real


def comparison_check(trace: EvolutionTrace, problem: NonlinearProblem, slack: float = 1e-6) -> ComparisonReport:
    """u(., t) <= h_{t,alpha} *_k u0 samplewise at every snapshot."""
    excess = []
    for snap in trace.snapshots:
        lin = linear_flow_on(problem, trace.pair, snap.t, snap.scale)
        excess.append(float(np.max(snap.u.values - lin)))
    return ComparisonReport(tuple(s.t for s in trace.snapshots), tuple(excess), slack)


class MassKind(str, enum.Enum):
    CONCLUSIVE = "conclusive"
    INCONCLUSIVE = "inconclusive"
    ZERO = "zero"


@dataclass(frozen=True)
class MassEstimate:
    kind: MassKind
    value: float
    error_bar: float = math.nan
    # int_{T/2}^T int u^p and the fitted decay exponent of int u^p
    tail: float = math.nan
    decay: float = math.nan
    reason: str = ""

    @property
    def relative_error(self) -> float:
        return self.error_bar / self.value if self.value > 0 else math.inf


def asymptotic_mass(trace: EvolutionTrace, tail_tol: float = 1e-3) -> MassEstimate:
    """M(t_end) as the limit mass, with the extrapolated remaining dissipation as error bar.

    int u^p is fitted as C t^(-a) over the last decade; the error bar is
    int_T^inf C t^(-a) dt.  Returns an inconclusive estimate when the
    dissipation over [T/2, T] is not below tail_tol * M(T) or a <= 1.
    """
    T = float(trace.times[-1])
    M = float(trace.mass[-1])
    if trace.initial_mass == 0.0:
        return MassEstimate(MassKind.ZERO, 0.0, 0.0, 0.0)
    tail = float(trace.loss[-1] - np.interp(0.5 * T, trace.times, trace.loss))
    if not tail <= tail_tol * M:
        return MassEstimate(MassKind.INCONCLUSIVE, M, math.nan, tail,
                            reason=f"dissipation over [T/2, T] is {tail:.3e}, above {tail_tol:g} M(T)")
    sel = (trace.times >= 0.1 * T) & (trace.power > 0)
    if np.count_nonzero(sel) < 4:
        return MassEstimate(MassKind.INCONCLUSIVE, M, math.nan, tail, reason="too few samples in the last decade")
    slope, _ = fit_slope(trace.times[sel], trace.power[sel], 0.0)
    a = -slope
    if not a > 1.0:
        return MassEstimate(MassKind.INCONCLUSIVE, M, math.nan, tail, a,
                            reason=f"int u^p decays like t^-{a:.3f}, not integrable")
    remaining = float(trace.power[-1]) * T / (a - 1.0)
    return MassEstimate(MassKind.CONCLUSIVE, M, remaining, tail, a)


def nonlinear_error_curve(trace: EvolutionTrace, problem: NonlinearProblem, q: float,
                          m_inf: float | None = None, t_min: float = 0.0) -> ErrorCurve:
    """t^(d_k/(2 alpha q')) ||u(., t) - M_inf h_{t,alpha}||_q at the snapshots."""
    if not 1.0 <= q < math.inf:
        raise DomainError(f"q must lie in [1, inf), got {q}")
    if m_inf is None:
        est = asymptotic_mass(trace)
        if est.kind is MassKind.INCONCLUSIVE:
            raise DomainError(f"limit mass is inconclusive: {est.reason}")
        m_inf = est.value
    cfg, alpha = problem.cfg, problem.alpha
    pair = trace.pair
    ts, raw = [], []
    for snap in trace.snapshots:
        if snap.t < t_min:
            continue
        mult = np.exp(-snap.t * (pair.spectral.radius / snap.scale) ** (2.0 * alpha))
        diff = pair.inverse(snap.spectrum.values - m_inf * mult, snap.scale).real
        ts.append(snap.t)
        raw.append(lp_norm(cfg, GridFunction(pair.physical_at(snap.scale), diff), q))
    t = np.array(ts)
    raw = np.array(raw)
    e = scaling_exponent(cfg, alpha, q)
    return ErrorCurve(alpha, q, t, raw, raw * t ** e, m_inf, e)
