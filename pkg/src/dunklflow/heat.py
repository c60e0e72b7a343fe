"""Dunkl heat kernel, fractional heat kernel and the fractional semigroup."""
from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass

import numpy as np

from .core import (PANEL_PHASE, Grid, GridFunction, ReflectionConfig, _transform_axis,
                   dunkl_inverse_transform, dunkl_transform, make_grid, uniform_edges)
from .errors import DomainError
from .specfun import Strategy, SubordinatorSpec, stable_density

# exp(-37) ~ 1e-16: multiplier level at which the spectral grid is cut
SPECTRAL_CUTOFF = 37.0


class Route(str, enum.Enum):
    CLOSED_FORM = "closed-form"
    SPECTRAL = "spectral"
    SUBORDINATION = "subordination"


@dataclass(frozen=True)
class KernelSpec:
    t: float
    alpha: float = 1.0
    route: Route = Route.SPECTRAL

    def __post_init__(self):
        if not self.t > 0:
            raise DomainError(f"t must be positive, got {self.t}")
        if not (0.0 < self.alpha <= 1.0):
            raise DomainError(f"alpha must lie in (0, 1], got {self.alpha}")
        object.__setattr__(self, "route", Route(self.route))
        if self.route is Route.CLOSED_FORM and self.alpha != 1.0:
            raise DomainError("the closed-form route exists only for alpha = 1")


def auto_half_width(t: float, alpha: float = 1.0, factor: float = 10.0) -> float:
    """Physical half-width that keeps h_{t,alpha} resolved: factor * t^(1/(2 alpha))."""
    return factor * t ** (1.0 / (2.0 * alpha))


def spectral_extent(t: float, alpha: float = 1.0) -> float:
    """|xi| beyond which exp(-t |xi|^(2 alpha)) < exp(-37)."""
    return (SPECTRAL_CUTOFF / t) ** (1.0 / (2.0 * alpha))


def _resolvable_band(grid: Grid) -> float:
    band = math.inf
    for ax in grid.axes:
        widths = np.diff(ax.edges)
        band = min(band, 2.0 * PANEL_PHASE * ax.order / float(np.median(widths)))
    return band


def auto_spectral_grid(physical: Grid, t: float | None = None, alpha: float = 1.0,
                       out_L: float | None = None, extent: float | None = None) -> Grid:
    """Spectral grid matched to a physical grid (and optionally to a multiplier).

    The extent is the smaller of what the physical grid can integrate and
    where exp(-t |xi|^(2 alpha)) has died out; the panel width resolves
    oscillations exp(i xi x) for |x| up to ``out_L``.
    """
    if extent is None:
        extent = _resolvable_band(physical)
        if t is not None:
            extent = min(extent, spectral_extent(t, alpha))
    out_L = max(physical.L) if out_L is None else out_L
    order = physical.axes[0].order
    h = 2.0 * PANEL_PHASE * order / out_L
    panels = max(4, int(math.ceil(extent / h)))
    # refine toward 0 where |xi|^(2 alpha) is not smooth
    refine = 0 if alpha == 1.0 else 6
    edges = uniform_edges(extent, panels, refine)
    return make_grid(physical.cfg, edges=edges, order=order)


# --------------------------------------------------------------------------
# heat kernel


def heat_kernel(cfg: ReflectionConfig, t: float, x):
    """h_t(x) = (2t)^(-d_k/2) exp(-|x|^2 / (4t)); x has shape (..., d) (any shape if d = 1)."""
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    x = np.asarray(x, dtype=float)
    r2 = x * x if cfg.d == 1 else np.sum(x * x, axis=-1)
    return (2.0 * t) ** (-0.5 * cfg.d_k) * np.exp(-r2 / (4.0 * t))


def heat_kernel_on(grid: Grid, t: float) -> GridFunction:
    cfg = grid.cfg
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    vals = (2.0 * t) ** (-0.5 * cfg.d_k) * np.exp(-grid.radius ** 2 / (4.0 * t))
    return GridFunction(grid, vals, "even")


def _radius_sq(spectral: Grid) -> np.ndarray:
    return spectral.radius ** 2


def multiplier(spectral: Grid, t: float, alpha: float) -> np.ndarray:
    return np.exp(-t * _radius_sq(spectral) ** alpha)


# --------------------------------------------------------------------------
# subordination


@dataclass(frozen=True)
class SubordinationRule:
    """Quadrature s_j, W_j with sum_j W_j g(s_j) ~ int g(s) eta_{t,alpha}(s) ds."""

    s: np.ndarray
    weights: np.ndarray


def eta_rule(alpha: float, t: float, lo: float, hi: float, per_decade: int = 8,
             order: int = 16) -> SubordinationRule:
    """Gauss-Legendre panels in log s on [lo, hi], weighted by eta_{t,alpha}(s)."""
    if not (0.0 < alpha < 1.0):
        raise DomainError("eta_rule needs 0 < alpha < 1")
    if not 0 < lo < hi:
        raise DomainError(f"need 0 < lo < hi, got {(lo, hi)}")
    a, b = math.log10(lo), math.log10(hi)
    panels = max(1, int(math.ceil((b - a) * per_decade)))
    x, w = np.polynomial.legendre.leggauss(order)
    e = np.linspace(a, b, panels + 1) * math.log(10.0)
    mid = 0.5 * (e[1:] + e[:-1])[:, None]
    rad = 0.5 * (e[1:] - e[:-1])[:, None]
    s = np.exp((mid + rad * x).ravel())
    strategy = Strategy.CLOSED_FORM_HALF if alpha == 0.5 else Strategy.ZOLOTAREV
    eta = stable_density(SubordinatorSpec(alpha, t, strategy), s)
    return SubordinationRule(s, (rad * w).ravel() * s * eta)


def eta_floor(alpha: float) -> float:
    """sigma where the exponential factor of eta_{1,alpha} reaches e^-45.

    The algebraic prefactor can lift eta itself above e^-45 there, but the
    mass of eta_{1,alpha} on (0, sigma) stays far below 1e-15.
    """
    c = (1.0 - alpha) * alpha ** (alpha / (1.0 - alpha))
    return (45.0 / c) ** (-(1.0 - alpha) / alpha)


@functools.lru_cache(maxsize=128)
def _unit_rule(alpha: float, sigma_hi: float, per_decade: int, order: int):
    rule = eta_rule(alpha, 1.0, eta_floor(alpha), sigma_hi, per_decade, order)
    return rule.s, rule.weights


def subordination_rule(alpha: float, t: float, d_k: float, x_max: float = 0.0,
                       per_decade: int = 8, order: int = 16) -> SubordinationRule:
    """Log-panel rule on s in (0, S) for the subordinator at time t.

    The window is [sigma_lo, sigma_hi] * t^(1/alpha): the lower end where
    eta_{1,alpha} is below e^-45, the upper end far enough out that the
    neglected part, bounded by P(S > sigma) (2 sigma)^(-d_k/2), is ~1e-13
    relative, and past 100 x_max^2 so every h_s(x) peak is inside.
    """
    if not (0.0 < alpha < 1.0):
        raise DomainError("subordination needs 0 < alpha < 1")
    scale = t ** (1.0 / alpha)
    m = 13.0 / (alpha + 0.5 * d_k)
    sigma_hi = max(10.0 ** m, 100.0 * x_max ** 2 / scale)
    sigma_hi = 10.0 ** math.ceil(math.log10(sigma_hi))
    s, w = _unit_rule(alpha, sigma_hi, per_decade, order)
    return SubordinationRule(s * scale, w)


def _frac_kernel_subordinated(grid: Grid, t: float, alpha: float) -> np.ndarray:
    cfg = grid.cfg
    r2 = grid.radius ** 2
    rule = subordination_rule(alpha, t, cfg.d_k, x_max=math.sqrt(float(np.max(r2))))
    flat = r2.ravel()
    out = np.empty_like(flat)
    coef = rule.weights * (2.0 * rule.s) ** (-0.5 * cfg.d_k)
    inv4s = 1.0 / (4.0 * rule.s)
    for i in range(0, flat.size, 4096):
        chunk = flat[i:i + 4096, None]
        out[i:i + 4096] = np.exp(-chunk * inv4s[None, :]) @ coef
    return out.reshape(grid.shape)


def frac_heat_kernel(cfg: ReflectionConfig, spec: KernelSpec, grid: Grid,
                     spectral_grid: Grid | None = None) -> GridFunction:
    """h_{t,alpha} sampled on ``grid``.

    spectral: F_k^{-1}(exp(-t|xi|^(2 alpha))); subordination:
    int_0^inf h_s eta_{t,alpha}(s) ds; closed-form: h_t (alpha = 1 only).
    At alpha = 1 the subordination route is the closed form as well.
    """
    if spec.route is Route.CLOSED_FORM or (spec.alpha == 1.0 and spec.route is Route.SUBORDINATION):
        return heat_kernel_on(grid, spec.t)
    if spec.route is Route.SUBORDINATION:
        return GridFunction(grid, _frac_kernel_subordinated(grid, spec.t, spec.alpha), "even")
    sg = spectral_grid or auto_spectral_grid(grid, spec.t, spec.alpha, extent=spectral_extent(spec.t, spec.alpha))
    g = GridFunction(sg, multiplier(sg, spec.t, spec.alpha), "even")
    out = dunkl_inverse_transform(cfg, g, grid, check=False)
    return GridFunction(grid, out.values.real, "even")


def semigroup_apply(cfg: ReflectionConfig, f: GridFunction, spec: KernelSpec,
                    out_grid: Grid | None = None, spectral_grid: Grid | None = None) -> GridFunction:
    """exp(-t (-Delta_k)^alpha) f = F_k^{-1}(exp(-t|xi|^(2 alpha)) F_k f).

    ``spec.route`` selects how the multiplier is realized: directly
    (spectral/closed-form), or as the Bochner average
    int exp(-s |xi|^2) eta_{t,alpha}(s) ds of heat multipliers (subordination).
    """
    out_grid = f.grid if out_grid is None else out_grid
    sg = spectral_grid or auto_spectral_grid(f.grid, spec.t, spec.alpha, out_L=max(out_grid.L))
    F = dunkl_transform(cfg, f, sg)
    if spec.route is Route.SUBORDINATION and spec.alpha < 1.0:
        rule = subordination_rule(spec.alpha, spec.t, cfg.d_k)
        r2 = _radius_sq(sg)
        mult = np.zeros(sg.shape)
        for s, w in zip(rule.s, rule.weights):
            mult += w * np.exp(-s * r2)
    else:
        mult = multiplier(sg, spec.t, spec.alpha)
    out = dunkl_inverse_transform(cfg, F.with_values(F.values * mult), out_grid, check=False)
    vals = out.values.real if np.isrealobj(f.values) else out.values
    return GridFunction(out_grid, vals, f.parity)


def bochner_apply(cfg: ReflectionConfig, f: GridFunction, t: float, alpha: float,
                  out_grid: Grid | None = None, spectral_grid: Grid | None = None,
                  chunk: int = 64) -> GridFunction:
    """int_0^inf exp(s Delta_k) f eta_{t,alpha}(s) ds, summing one heat flow per quadrature node."""
    out_grid = f.grid if out_grid is None else out_grid
    sg = spectral_grid or auto_spectral_grid(f.grid, t, alpha, out_L=max(out_grid.L))
    F = dunkl_transform(cfg, f, sg)
    rule = subordination_rule(alpha, t, cfg.d_k)
    r2 = _radius_sq(sg)
    out = np.zeros(out_grid.shape, dtype=complex)
    for i in range(0, rule.s.size, chunk):
        s, w = rule.s[i:i + chunk], rule.weights[i:i + chunk]
        # heat flows for this block of nodes, node index leading
        flows = np.exp(-np.multiply.outer(s, r2)) * F.values[None, ...]
        for j in range(cfg.d):
            flows = _transform_axis(flows, j + 1, cfg.k[j], sg.axes[j], out_grid.axes[j], 1.0)
        out += np.tensordot(w, flows, axes=1)
    vals = out.real if np.isrealobj(f.values) else out
    return GridFunction(out_grid, vals, f.parity)
