"""Weighted norms, error curves and rate fits for the linear fractional flow.

Error curves are evaluated in self-similar variables: at time t the
physical grid is scaled by t^(1/(2 alpha)) and the spectral grid by its
inverse, so every sample uses the same transform matrices and the kernel
always occupies the same portion of the grid.
"""
from __future__ import annotations

import functools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import (PANEL_PHASE, Grid, GridFunction, ReflectionConfig, SpectralPair, check_decay,
                   dunkl_transform, make_grid, stretched_edges, uniform_edges)
from .errors import DomainError
from .heat import (KernelSpec, Route, auto_spectral_grid, eta_floor, eta_rule,
                   frac_heat_kernel)

# e^-30 ~ 1e-13: where the scaled multiplier exp(-|xi|^(2 alpha)) is cut
SCALED_CUTOFF = 30.0


def _check_p(p: float) -> float:
    p = float(p)
    if not p >= 1.0:
        raise DomainError(f"exponent p must be >= 1 or inf, got {p}")
    return p


def conjugate_inverse(p: float) -> float:
    """1/p' for the Hoelder conjugate p' of p."""
    p = _check_p(p)
    return 1.0 if math.isinf(p) else 1.0 - 1.0 / p


def scaling_exponent(cfg: ReflectionConfig, alpha: float, p: float) -> float:
    """d_k / (2 alpha p')."""
    return cfg.d_k / (2.0 * alpha) * conjugate_inverse(p)


def lp_norm(cfg: ReflectionConfig, f: GridFunction, p: float) -> float:
    """||f||_{L^p(d mu_k)}; the grid max of |f| for p = inf."""
    p = _check_p(p)
    a = np.abs(np.asarray(f.values))
    if math.isinf(p):
        return float(np.max(a)) if a.size else 0.0
    if p == 1.0:
        return float(np.sum(a * f.grid.weights))
    peak = float(np.max(a)) if a.size else 0.0
    if peak == 0.0:
        return 0.0
    # factor out the peak so |f|^p cannot underflow
    return peak * float(np.sum((a / peak) ** p * f.grid.weights)) ** (1.0 / p)


def first_moment(cfg: ReflectionConfig, f: GridFunction) -> float:
    """N_1(f) = int |f(x)| |x| d mu_k(x)."""
    return float(np.sum(np.abs(f.values) * f.grid.radius * f.grid.weights))


def fit_slope(t, y, discard: float = 0.2) -> tuple[float, float]:
    """Least-squares slope and intercept of log y against log t.

    The first ``discard`` fraction of the samples is dropped as transient.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    start = int(math.floor(discard * t.size))
    lt, ly = np.log(t[start:]), np.log(y[start:])
    if lt.size < 2:
        raise DomainError("need at least two samples to fit a slope")
    slope, intercept = np.polyfit(lt, ly, 1)
    return float(slope), float(intercept)


def decade_means(t, y) -> tuple[float, float]:
    """Means of y over the first decade [t_0, 10 t_0] and the last [t_N / 10, t_N]."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    first = y[t <= 10.0 * t[0] * (1 + 1e-12)]
    last = y[t >= t[-1] / 10.0 * (1 - 1e-12)]
    return float(np.mean(first)), float(np.mean(last))


def decade_sequence(t, y) -> np.ndarray:
    """Means of y over consecutive decades [10^j t_0, 10^(j+1) t_0] (last one may be partial)."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    idx = np.floor(np.log10(t / t[0]) + 1e-9).astype(int)
    # a lone endpoint at exactly 10^j t_0 belongs to the decade it closes
    idx[-1] = min(idx[-1], max(idx[-2], 0)) if t.size > 1 else idx[-1]
    return np.array([np.mean(y[idx == j]) for j in range(idx.max() + 1) if np.any(idx == j)])


@dataclass(frozen=True)
class ErrorCurve:
    alpha: float
    p: float
    t: np.ndarray
    raw: np.ndarray
    scaled: np.ndarray
    mass: float
    exponent: float

    @property
    def decade_ratio(self) -> float:
        first, last = decade_means(self.t, self.scaled)
        return last / first if first > 0 else math.inf

    def decreasing_by_decade(self) -> bool:
        means = decade_sequence(self.t, self.scaled)
        return means.size >= 2 and bool(np.all(np.diff(means) < 0))

    def slope(self, discard: float = 0.2) -> float:
        return fit_slope(self.t, self.scaled, discard)[0]

    def decade_decay(self, ratio: float = 0.2, final_max: float = 0.1) -> bool:
        """Final-decade mean <= ratio * first-decade mean and final value <= final_max."""
        return self.decade_ratio <= ratio and float(self.scaled[-1]) <= final_max


# --------------------------------------------------------------------------
# grids in self-similar variables


def scaled_extent(alpha: float) -> float:
    """Scaled spectral half-width where exp(-|xi|^(2 alpha)) < e^-30."""
    return SCALED_CUTOFF ** (1.0 / (2.0 * alpha))


@functools.lru_cache(maxsize=16)
def scaled_pair(cfg: ReflectionConfig, alpha: float, half_width: float | None = None,
                order: int = 16) -> SpectralPair:
    """Reference grids for the self-similar variables of the alpha-flow.

    For alpha < 1 the kernel has algebraic tails, so the physical window is
    wider (40 scaled units against 12 for alpha = 1).
    """
    extent = scaled_extent(alpha)
    L = half_width if half_width is not None else (12.0 if alpha == 1.0 else 40.0)
    # panel width that integrates exp(i xi x) for |xi| <= extent
    panels = int(math.ceil(L * extent / (2.0 * PANEL_PHASE * order)))
    physical = make_grid(cfg, edges=uniform_edges(L, panels), order=order)
    spectral = auto_spectral_grid(physical, alpha=alpha, out_L=L, extent=extent)
    return SpectralPair(physical, spectral)


def time_scale(t: float, alpha: float) -> float:
    return t ** (1.0 / (2.0 * alpha))


def _multiplier_scaled(pair: SpectralPair, alpha: float) -> np.ndarray:
    return np.exp(-pair.spectral.radius ** (2.0 * alpha))


def flow_error(cfg: ReflectionConfig, u0: GridFunction, mass: float, alpha: float, t: float,
               pair: SpectralPair | None = None) -> GridFunction:
    """h_{t,alpha} *_k u0 - M h_{t,alpha}, sampled on the scaled physical grid.

    Computed as F_k^{-1}(exp(-t|xi|^(2 alpha)) (F_k u0 - M)); this is the
    semigroup applied to u0 minus M times the kernel, with both terms
    sharing one inversion.
    """
    pair = pair or scaled_pair(cfg, alpha)
    s = time_scale(t, alpha)
    F = dunkl_transform(cfg, u0, pair.spectral_at(s), check=False)
    g = _multiplier_scaled(pair, alpha) * (F.values - mass)
    vals = pair.inverse(g, s)
    vals = vals.real if np.isrealobj(u0.values) else vals
    return GridFunction(pair.physical_at(s), vals)


def _mass_of(u0: GridFunction) -> float:
    m = u0.integral()
    return float(np.real(m))


def _map(func, items, threads: int):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(func, items))
    return [func(x) for x in items]


def linear_error_curve(cfg: ReflectionConfig, u0: GridFunction, alpha: float, p: float,
                       t_values, threads: int = 1, pair: SpectralPair | None = None) -> ErrorCurve:
    """Raw and scaled errors ||h_{t,alpha} *_k u0 - M h_{t,alpha}||_p over ``t_values``."""
    p = _check_p(p)
    if not (0.0 < alpha <= 1.0):
        raise DomainError(f"alpha must lie in (0, 1], got {alpha}")
    t = np.asarray(sorted(float(x) for x in t_values))
    if t.size == 0 or t[0] <= 0:
        raise DomainError("t-values must be positive")
    check_decay(u0, what="initial datum")
    mass = _mass_of(u0)
    if abs(mass) <= 1e-10:
        raise DomainError("the initial datum has zero mass; the limit profile needs M != 0")
    pair = pair or scaled_pair(cfg, alpha)
    raw = np.array(_map(lambda s: lp_norm(cfg, flow_error(cfg, u0, mass, alpha, s, pair), p), t, threads))
    e = scaling_exponent(cfg, alpha, p)
    return ErrorCurve(alpha, p, t, raw, raw * t ** e, mass, e)


# --------------------------------------------------------------------------
# first-moment rate


@dataclass(frozen=True)
class MomentRateReport:
    t: np.ndarray
    n1: float
    l1_error: np.ndarray
    sup_scaled: np.ndarray
    slope_l1: float
    slope_sup: float
    # error / (N_1 t^(-1/2)), one per sample
    ratio_l1: np.ndarray
    ratio_sup: np.ndarray

    @property
    def constant_l1(self) -> float:
        return float(np.max(self.ratio_l1))

    @property
    def constant_sup(self) -> float:
        return float(np.max(self.ratio_sup))

    def slopes_within(self, target: float = -0.5, tol: float = 0.1) -> bool:
        return abs(self.slope_l1 - target) <= tol and abs(self.slope_sup - target) <= tol


def moment_rate_check(cfg: ReflectionConfig, f: GridFunction, t_values, threads: int = 1,
                      discard: float = 0.2) -> MomentRateReport:
    """Rate of ||h_t *_k f - M h_t|| against N_1(f) t^(-1/2) for the heat flow."""
    t = np.asarray(sorted(float(x) for x in t_values))
    if t.size < 4:
        raise DomainError("the moment-rate fit needs at least 4 t-values")
    n1 = first_moment(cfg, f)
    if not math.isfinite(n1):
        raise DomainError("first moment is not finite on the grid")
    l1 = linear_error_curve(cfg, f, 1.0, 1.0, t, threads)
    sup = linear_error_curve(cfg, f, 1.0, math.inf, t, threads)
    bound = n1 * t ** -0.5
    return MomentRateReport(
        t=t, n1=n1, l1_error=l1.raw, sup_scaled=sup.scaled,
        slope_l1=fit_slope(t, l1.raw, discard)[0],
        slope_sup=fit_slope(t, sup.scaled, discard)[0],
        ratio_l1=l1.raw / bound, ratio_sup=sup.scaled / bound)


# --------------------------------------------------------------------------
# kernel norms


def norm_decay_grid(cfg: ReflectionConfig, alpha: float, t_max: float, order: int = 16) -> Grid:
    """One fixed grid for ||h_{t,alpha}||_p over t in [~1, t_max].

    Uniform panels of width 0.5 out to 20, then panels growing by 1.5 out
    to 10 t_max^(1/2) (alpha = 1) or 1e6 t_max^(1/(2 alpha)) for the
    algebraic tails of alpha < 1.
    """
    far = 10.0 * math.sqrt(t_max) if alpha == 1.0 else 1e6 * time_scale(t_max, alpha)
    edges = stretched_edges(20.0, 40, max(far, 40.0))
    return make_grid(cfg, edges=edges, order=order)


def kernel_norm_curve(cfg: ReflectionConfig, alpha: float, p: float, t_values,
                      grid: Grid | None = None) -> tuple[np.ndarray, np.ndarray]:
    """||h_{t,alpha}||_p on a fixed grid (closed form for alpha = 1, subordination otherwise)."""
    t = np.asarray(sorted(float(x) for x in t_values))
    grid = grid or norm_decay_grid(cfg, alpha, float(t[-1]))
    route = Route.CLOSED_FORM if alpha == 1.0 else Route.SUBORDINATION
    norms = np.array([lp_norm(cfg, frac_heat_kernel(cfg, KernelSpec(s, alpha, route), grid), p) for s in t])
    return t, norms


# --------------------------------------------------------------------------
# subordination split


@dataclass(frozen=True)
class SplitReport:
    t: float
    alpha: float
    p: float
    I: float
    J: float
    scaled_error: float
    # sup over s >= t of s^(d_k/(2p')) ||h_s * u0 - M h_s||_p
    eps: float
    # t^(beta/alpha) int_t^inf s^(-beta) eta_{t,alpha}(s) ds, beta = d_k/(2p')
    K: float
    slack: float = 1e-4

    @property
    def minkowski_holds(self) -> bool:
        return self.I + self.J >= self.scaled_error - self.slack

    @property
    def tail_bound_holds(self) -> bool:
        return self.J <= self.eps * self.K * (1.0 + 1e-6)


def subordination_split_check(cfg: ReflectionConfig, u0: GridFunction, alpha: float, p: float,
                              t: float, per_decade: int = 4, order: int = 8,
                              threads: int = 1) -> SplitReport:
    """I_t and J_t: the scaled heat errors averaged against eta_{t,alpha} below and above s = t."""
    if not t > 1:
        raise DomainError("the split is taken for t > 1")
    if not (0.0 < alpha < 1.0):
        raise DomainError("the split needs 0 < alpha < 1")
    p = _check_p(p)
    check_decay(u0, what="initial datum")
    mass = _mass_of(u0)
    beta = cfg.d_k / 2.0 * conjugate_inverse(p)
    scale = t ** (1.0 / alpha)
    lo = scale * eta_floor(alpha)
    hi = scale * 10.0 ** math.ceil(13.0 / (alpha + 0.5 * cfg.d_k))
    pair = scaled_pair(cfg, 1.0)
    heat_error = lambda s: lp_norm(cfg, flow_error(cfg, u0, mass, 1.0, s, pair), p)

    def part(a, b):
        if b <= a:
            return np.empty(0), np.empty(0), np.empty(0)
        rule = eta_rule(alpha, t, a, b, per_decade, order)
        errs = np.array(_map(heat_error, rule.s, threads))
        return rule.s, rule.weights, errs

    s_lo, w_lo, e_lo = part(lo, t)
    s_hi, w_hi, e_hi = part(max(lo, t), hi)
    pre = t ** (beta / alpha)
    I = pre * float(np.sum(w_lo * e_lo))
    J = pre * float(np.sum(w_hi * e_hi))
    eps = float(np.max(s_hi ** beta * e_hi)) if s_hi.size else 0.0
    K = pre * float(np.sum(w_hi * s_hi ** -beta))
    frac = lp_norm(cfg, flow_error(cfg, u0, mass, alpha, t), p) * t ** scaling_exponent(cfg, alpha, p)
    return SplitReport(t, alpha, p, I, J, frac, eps, K)


def young_bound(cfg: ReflectionConfig, u0: GridFunction, curve: ErrorCurve,
                kernel_norms: np.ndarray) -> np.ndarray:
    """(||u0||_1 + |M|) ||h_{t,alpha}||_p: the triangle-plus-Young bound on raw errors."""
    return (lp_norm(cfg, u0, 1.0) + abs(curve.mass)) * np.asarray(kernel_norms)
