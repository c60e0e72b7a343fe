"""Z_2^d reflection setup: weighted measure, quadrature grids, Dunkl kernel
and Dunkl transform.

Roots are the normalized vectors +-sqrt(2) e_j, so the rank-one Dunkl
operator on axis j reads f' + k_j (f(x) - f(-x)) / x.  The weight is
v_k(x) = prod_j (2 x_j^2)^k_j and d mu_k = c_k v_k dx.

Grids are composite Gauss rules on [-L, L] with a panel break at 0, so no
node sits on a coordinate hyperplane.  The two panels touching 0 use
Gauss-Jacobi nodes for the weight |x|^(2k), which is not smooth there unless
2k is an integer; all other panels are Gauss-Legendre.  All transforms work axis by
axis: the kernel factorizes, and each axis is split into even and odd parts,
which turns the transform into a pair of real Hankel-type matrices acting on
the positive half of the grid.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from scipy.special import roots_jacobi

from .errors import DomainError, TruncationError
from .specfun import bessel_j_norm, gamma_fn

DECAY_TOL = 1e-10
# 16-point Gauss-Legendre panels of width h integrate exp(i w x) to about
# 1e-16 while w h / 2 <= PANEL_PHASE * order
PANEL_PHASE = 0.5


@dataclass(frozen=True)
class ReflectionConfig:
    d: int
    k: tuple

    def __post_init__(self):
        k = tuple(float(v) for v in np.atleast_1d(self.k))
        if self.d < 1:
            raise DomainError(f"dimension must be >= 1, got {self.d}")
        if len(k) == 1 and self.d > 1:
            k = k * self.d
        if len(k) != self.d:
            raise DomainError(f"need {self.d} multiplicities, got {len(k)}")
        if any(not (v >= 0) for v in k):
            raise DomainError(f"multiplicities must be >= 0, got {k}")
        object.__setattr__(self, "k", k)

    @classmethod
    def rank_one(cls, k: float) -> "ReflectionConfig":
        return cls(1, (k,))

    @property
    def gamma_k(self) -> float:
        # two roots (+-) per axis, each carrying k_j
        return 2.0 * sum(self.k)

    @property
    def d_k(self) -> float:
        return self.d + self.gamma_k

    @property
    def c_k(self) -> float:
        return normalization_c(self)

    def axis_d_k(self, j: int) -> float:
        return 1.0 + 2.0 * self.k[j]


def axis_normalization(k: float) -> float:
    """Per-axis factor of c_k: 1 / (2^(2k+1/2) Gamma(k+1/2))."""
    return 1.0 / (2.0 ** (2.0 * k + 0.5) * gamma_fn(k + 0.5))


def normalization_c(cfg: ReflectionConfig) -> float:
    return math.prod(axis_normalization(kj) for kj in cfg.k)


def weight_v(cfg: ReflectionConfig, x):
    """v_k(x) = prod over roots of |<x, lambda>|^k(lambda); x has shape (..., d)."""
    x = np.asarray(x, dtype=float)
    if cfg.d == 1 and (x.ndim == 0 or x.shape[-1] != 1):
        x = x[..., None]
    out = np.ones(x.shape[:-1])
    root = math.sqrt(2.0)
    for j, kj in enumerate(cfg.k):
        if kj == 0:
            continue
        for sign in (1.0, -1.0):
            out = out * np.abs(sign * root * x[..., j]) ** kj
    return out


# --------------------------------------------------------------------------
# grids


@functools.lru_cache(maxsize=64)
def _jacobi_rule(order: int, k: float):
    if k == 0.0:
        return np.polynomial.legendre.leggauss(order)
    return roots_jacobi(order, 0.0, 2.0 * k)


def _reference_nodes(order: int, k: float) -> np.ndarray:
    return _jacobi_rule(order, k)[0]


def _barycentric_of(nodes) -> np.ndarray:
    bw = np.array([1.0 / np.prod(nodes[j] - np.delete(nodes, j)) for j in range(nodes.size)])
    return bw / np.max(np.abs(bw))


@functools.lru_cache(maxsize=64)
def _barycentric(order: int, k: float) -> np.ndarray:
    return _barycentric_of(_reference_nodes(order, k))


@dataclass(frozen=True, eq=False)
class Grid1D:
    """Symmetric composite Gauss rule for c v_k dx on one axis.

    ``edges`` are the panel breakpoints on [0, L] (starting at 0); the rule
    is mirrored onto [-L, 0].  Weights already contain the axis part of
    c_k v_k.  The panel [0, e_1] carries Gauss-Jacobi nodes for x^(2k), so
    smooth functions integrate to full accuracy for every k.
    """

    k: float
    edges: tuple
    order: int = 16
    nodes: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        edges = tuple(float(e) for e in self.edges)
        if edges[0] != 0.0 or any(b <= a for a, b in zip(edges[:-1], edges[1:])):
            raise DomainError("panel edges must start at 0 and increase")
        object.__setattr__(self, "edges", edges)
        x, w = np.polynomial.legendre.leggauss(self.order)
        e = np.asarray(edges)
        mid = 0.5 * (e[1:] + e[:-1])[:, None]
        rad = 0.5 * (e[1:] - e[:-1])[:, None]
        pos = (mid + rad * x).ravel()
        wpos = (rad * w).ravel() * axis_normalization(self.k) * (2.0 * pos * pos) ** self.k
        # first panel: int_0^e1 x^(2k) g dx = (e1/2)^(2k+1) int (1+u)^(2k) g du
        xj, wj = _jacobi_rule(self.order, self.k)
        h = 0.5 * e[1]
        pos[:self.order] = h * (1.0 + xj)
        wpos[:self.order] = wj * h ** (2.0 * self.k + 1.0) * axis_normalization(self.k) * 2.0 ** self.k
        nodes = np.concatenate([-pos[::-1], pos])
        weights = np.concatenate([wpos[::-1], wpos])
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    @property
    def L(self) -> float:
        return self.edges[-1]

    @property
    def n(self) -> int:
        return self.nodes.size

    @property
    def half(self) -> int:
        return self.nodes.size // 2

    @property
    def positive(self) -> np.ndarray:
        return self.nodes[self.half:]

    @property
    def positive_weights(self) -> np.ndarray:
        return self.weights[self.half:]

    def _key(self):
        return (self.k, self.edges, self.order)

    def __eq__(self, other):
        return isinstance(other, Grid1D) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def scaled(self, s: float) -> "Grid1D":
        return Grid1D(self.k, tuple(s * e for e in self.edges), self.order)

    def interpolation_weights(self, points):
        """Panel-wise Lagrange interpolation data at ``points``.

        Returns ``(start, rows)``: the interpolant at point i is
        ``rows[i] @ values[start[i]:start[i] + order]``.  Points outside
        [-L, L] get zero rows (functions on a grid vanish beyond it).
        """
        pts = np.asarray(points, dtype=float).ravel()
        e = np.asarray(self.edges)
        full_edges = np.concatenate([-e[:0:-1], e])
        npan = full_edges.size - 1
        idx = np.clip(np.searchsorted(full_edges, pts, side="right") - 1, 0, npan - 1)
        centre = npan // 2
        ref = np.broadcast_to(_reference_nodes(self.order, 0.0), (pts.size, self.order)).copy()
        bw = np.broadcast_to(_barycentric(self.order, 0.0), (pts.size, self.order)).copy()
        xj = _reference_nodes(self.order, self.k)
        for panel, nodes in ((centre, xj), (centre - 1, -xj[::-1])):
            sel = idx == panel
            ref[sel] = nodes
            bw[sel] = _barycentric_of(nodes)
        a = full_edges[idx]
        b = full_edges[idx + 1]
        u = (2.0 * pts - a - b) / (b - a)
        diff = u[:, None] - ref
        exact = diff == 0.0
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = bw / diff
            rows = terms / np.sum(terms, axis=1, keepdims=True)
        hit = exact.any(axis=1)
        rows[hit] = exact[hit].astype(float)
        rows[np.abs(pts) > self.L] = 0.0
        return idx * self.order, rows

    def interpolation_matrix(self, points) -> np.ndarray:
        """Dense matrix whose rows evaluate the interpolant at ``points``."""
        start, rows = self.interpolation_weights(points)
        mat = np.zeros((start.size, self.n))
        cols = start[:, None] + np.arange(self.order)[None, :]
        mat[np.arange(start.size)[:, None], cols] = rows
        return mat


def uniform_edges(L: float, panels: int, zero_refine: int = 0) -> tuple:
    """Uniform panels on [0, L]; optionally split the first one geometrically."""
    e = list(np.linspace(0.0, L, panels + 1))
    if zero_refine:
        h = e[1]
        extra = [h * 2.0 ** -m for m in range(zero_refine, 0, -1)]
        e = [0.0] + extra + e[1:]
    return tuple(e)


def stretched_edges(L_core: float, core_panels: int, L_far: float, ratio: float = 1.5) -> tuple:
    """Uniform panels up to L_core, then geometrically growing ones to L_far."""
    e = list(np.linspace(0.0, L_core, core_panels + 1))
    h = e[1] - e[0]
    while e[-1] < L_far:
        h *= ratio
        e.append(min(e[-1] + h, L_far) if L_far - e[-1] > 0.5 * h else L_far)
        if e[-1] == L_far:
            break
    return tuple(e)


@dataclass(frozen=True, eq=False)
class Grid:
    """Tensor-product grid: one :class:`Grid1D` per axis."""

    cfg: ReflectionConfig
    axes: tuple

    def __post_init__(self):
        if len(self.axes) != self.cfg.d:
            raise DomainError("one axis grid per dimension is required")
        for kj, ax in zip(self.cfg.k, self.axes):
            if ax.k != kj:
                raise DomainError("axis grid multiplicity does not match config")

    def __eq__(self, other):
        return isinstance(other, Grid) and self.axes == other.axes

    def __hash__(self):
        return hash(self.axes)

    @property
    def shape(self) -> tuple:
        return tuple(ax.n for ax in self.axes)

    @property
    def L(self) -> tuple:
        return tuple(ax.L for ax in self.axes)

    @functools.cached_property
    def weights(self) -> np.ndarray:
        w = self.axes[0].weights
        for ax in self.axes[1:]:
            w = np.multiply.outer(w, ax.weights)
        return w

    @functools.cached_property
    def radius(self) -> np.ndarray:
        r2 = np.zeros(self.shape)
        for j, ax in enumerate(self.axes):
            shape = [1] * self.cfg.d
            shape[j] = ax.n
            r2 = r2 + ax.nodes.reshape(shape) ** 2
        return np.sqrt(r2)

    def mesh(self) -> list:
        return np.meshgrid(*[ax.nodes for ax in self.axes], indexing="ij")

    def scaled(self, s: float) -> "Grid":
        return Grid(self.cfg, tuple(ax.scaled(s) for ax in self.axes))

    def sample(self, func: Callable, parity: str = "none") -> "GridFunction":
        """Evaluate ``func(*coords)`` on the mesh."""
        vals = func(*self.mesh()) if self.cfg.d > 1 else func(self.axes[0].nodes)
        return GridFunction(self, np.broadcast_to(vals, self.shape).copy(), parity)


def make_grid(cfg: ReflectionConfig, L: float = 20.0, n: int = 512, order: int = 16,
              edges: Sequence | None = None, zero_refine: int = 0) -> Grid:
    """Grid with ``n`` nodes per axis on [-L, L] (or explicit panel edges)."""
    if edges is None:
        panels, rem = divmod(n, 2 * order)
        if rem or panels < 1:
            raise DomainError(f"n must be a positive multiple of {2 * order}")
        edges = uniform_edges(L, panels, zero_refine)
    return Grid(cfg, tuple(Grid1D(kj, tuple(edges), order) for kj in cfg.k))


def measure_of_box(cfg: ReflectionConfig, L) -> float:
    """Closed form of mu_k([-L, L]^d)."""
    Ls = np.broadcast_to(np.asarray(L, dtype=float), (cfg.d,))
    return math.prod(2.0 * axis_normalization(kj) * 2.0 ** kj * Lj ** (2 * kj + 1) / (2 * kj + 1)
                     for kj, Lj in zip(cfg.k, Ls))


# --------------------------------------------------------------------------
# sampled functions

_PARITIES = ("even", "odd", "none")


@dataclass(frozen=True, eq=False)
class GridFunction:
    grid: Grid
    values: np.ndarray
    parity: str = "none"

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.shape != self.grid.shape:
            raise DomainError(f"expected {self.grid.shape} samples, got {vals.shape}")
        if self.parity not in _PARITIES:
            raise DomainError(f"parity must be one of {_PARITIES}")
        if self.parity != "none":
            mirrored = vals[tuple(slice(None, None, -1) for _ in vals.shape)]
            sign = 1.0 if self.parity == "even" else -1.0
            scale = max(1.0, float(np.max(np.abs(vals))) if vals.size else 1.0)
            if np.max(np.abs(mirrored - sign * vals)) > 1e-12 * scale:
                raise DomainError(f"samples are not {self.parity}")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def cfg(self) -> ReflectionConfig:
        return self.grid.cfg

    def with_values(self, values, parity: str | None = None) -> "GridFunction":
        return GridFunction(self.grid, values, self.parity if parity is None else parity)

    def __add__(self, other):
        return self.with_values(self.values + _vals(other), _combine_parity(self, other))

    def __sub__(self, other):
        return self.with_values(self.values - _vals(other), _combine_parity(self, other))

    def __mul__(self, c):
        return self.with_values(self.values * c)

    __rmul__ = __mul__

    def __neg__(self):
        return self.with_values(-self.values)

    @property
    def real(self) -> "GridFunction":
        return self.with_values(np.real(self.values))

    def reflected(self) -> "GridFunction":
        """x -> -x applied to the samples."""
        return self.with_values(self.values[tuple(slice(None, None, -1) for _ in self.values.shape)])

    def integral(self) -> complex:
        return np.sum(self.values * self.grid.weights)

    def evaluate(self, points) -> np.ndarray:
        """Interpolate at arbitrary points (rank one only)."""
        if self.cfg.d != 1:
            raise DomainError("pointwise interpolation is implemented for d = 1")
        pts = np.asarray(points, dtype=float)
        mat = self.grid.axes[0].interpolation_matrix(pts)
        return (mat @ self.values).reshape(pts.shape)


def _vals(other):
    return other.values if isinstance(other, GridFunction) else other


def _combine_parity(a, b):
    if isinstance(b, GridFunction) and a.parity == b.parity:
        return a.parity
    return "none"


# --------------------------------------------------------------------------
# Dunkl kernel


def _rank_one_kernel(k, a, b):
    w = np.asarray(a) * np.asarray(b)
    z = 1j * w
    even = bessel_j_norm(k - 0.5, z)
    odd = w / (2.0 * k + 1.0) * bessel_j_norm(k + 0.5, z)
    return even + odd


def dunkl_kernel(cfg: ReflectionConfig, x, y):
    """E_k(x, y) as the product of rank-one kernels

        E_k(x_j, y_j) = j_{k-1/2}(i x_j y_j) + x_j y_j / (2k+1) j_{k+1/2}(i x_j y_j).

    ``x`` and ``y`` may be complex (e.g. ``1j * x`` for E_k(ix, y)) and carry
    the coordinate on their last axis; for d = 1 plain scalars or arrays work.
    """
    x = np.asarray(x)
    y = np.asarray(y)
    if cfg.d == 1:
        out = _rank_one_kernel(cfg.k[0], x, y)
    else:
        out = 1.0
        for j, kj in enumerate(cfg.k):
            out = out * _rank_one_kernel(kj, x[..., j], y[..., j])
    out = np.asarray(out)
    return out.item() if out.ndim == 0 else out


# --------------------------------------------------------------------------
# Dunkl transform


@functools.lru_cache(maxsize=64)
def _hankel_pair(k: float, target: Grid1D, source: Grid1D):
    # rows: positive target nodes, cols: positive source nodes
    prod = np.multiply.outer(target.positive, source.positive)
    even = bessel_j_norm(k - 0.5, prod)
    odd = prod / (2.0 * k + 1.0) * bessel_j_norm(k + 0.5, prod)
    even.setflags(write=False)
    odd.setflags(write=False)
    return even, odd


def _real_matmul(a, K):
    # a @ K.T without promoting the real matrix K to complex; contiguous
    # operands keep the product on the BLAS path
    if np.iscomplexobj(a):
        return np.ascontiguousarray(a.real) @ K.T + 1j * (np.ascontiguousarray(a.imag) @ K.T)
    return np.ascontiguousarray(a) @ K.T


def _transform_axis(values, axis, k, source: Grid1D, target: Grid1D, sign: float):
    """Apply int f(x) E_k(sign * i xi, x) d mu_k(x) along one axis."""
    v = np.moveaxis(values, axis, -1)
    h = source.half
    pos = v[..., h:]
    neg = v[..., h - 1::-1]
    w = source.positive_weights
    even = (pos + neg) * (0.5 * w)
    odd = (pos - neg) * (0.5 * w)
    K_e, K_o = _hankel_pair(k, target, source)
    fe = 2.0 * _real_matmul(even, K_e)
    fo = (2.0 * sign) * 1j * _real_matmul(odd, K_o)
    out = np.concatenate([(fe - fo)[..., ::-1], fe + fo], axis=-1)
    return np.moveaxis(out, -1, axis)


def _decay_ratio(values) -> float:
    a = np.abs(values)
    peak = float(np.max(a)) if a.size else 0.0
    if peak == 0.0:
        return 0.0
    edge = 0.0
    for axis in range(a.ndim):
        first = np.take(a, 0, axis=axis)
        last = np.take(a, -1, axis=axis)
        edge = max(edge, float(np.max(first)), float(np.max(last)))
    return edge / peak


def check_decay(f: GridFunction, tol: float = DECAY_TOL, what: str = "function", time=None):
    ratio = _decay_ratio(f.values)
    if ratio > tol:
        raise TruncationError(
            f"{what} has relative magnitude {ratio:.3e} at the grid boundary (limit {tol:.1e})",
            boundary=ratio, time=time)


def _apply_axes(values, cfg, source: Grid, target: Grid, sign):
    out = np.asarray(values, dtype=complex)
    for j in range(cfg.d):
        out = _transform_axis(out, j, cfg.k[j], source.axes[j], target.axes[j], sign)
    return out


def dunkl_transform(cfg: ReflectionConfig, f: GridFunction, spectral_grid: Grid,
                    check: bool = True, tol: float = DECAY_TOL) -> GridFunction:
    """F_k f(xi) = int f(x) E_k(-i xi, x) d mu_k(x), sampled on ``spectral_grid``."""
    if check:
        check_decay(f, tol, "transform input")
    out = _apply_axes(f.values, cfg, f.grid, spectral_grid, -1.0)
    return GridFunction(spectral_grid, out, f.parity)


def dunkl_inverse_transform(cfg: ReflectionConfig, g: GridFunction, physical_grid: Grid,
                            check: bool = True, tol: float = DECAY_TOL) -> GridFunction:
    """F_k^{-1} g(x) = int g(xi) E_k(i xi, x) d mu_k(xi), sampled on ``physical_grid``."""
    if check:
        check_decay(g, tol, "inverse transform input")
    out = _apply_axes(g.values, cfg, g.grid, physical_grid, 1.0)
    return GridFunction(physical_grid, out, g.parity)


class SpectralPair:
    """A physical grid and a spectral grid used together at many scales.

    Scale ``s`` stands for the physical grid scaled by ``s`` and the
    spectral grid scaled by ``1/s``; transforms between them reuse the
    matrices of the reference pair, since those only depend on xi * x.
    """

    def __init__(self, physical: Grid, spectral: Grid):
        self.physical = physical
        self.spectral = spectral
        self.cfg = physical.cfg

    def physical_at(self, s: float) -> Grid:
        return self.physical.scaled(s)

    def spectral_at(self, s: float) -> Grid:
        return self.spectral.scaled(1.0 / s)

    def spectral_nodes(self, s: float) -> list:
        return [ax.nodes / s for ax in self.spectral.axes]

    def inverse(self, g_values, s: float) -> np.ndarray:
        """Samples of F_k^{-1} g on the scaled physical grid, given the
        samples of g on the scaled spectral grid."""
        out = np.asarray(g_values, dtype=complex)
        for j in range(self.cfg.d):
            out = _transform_axis(out, j, self.cfg.k[j], self.spectral.axes[j],
                                  self.physical.axes[j], 1.0)
        return out * s ** (-self.cfg.d_k)

    def forward(self, f_values, s: float) -> np.ndarray:
        out = np.asarray(f_values, dtype=complex)
        for j in range(self.cfg.d):
            out = _transform_axis(out, j, self.cfg.k[j], self.physical.axes[j],
                                  self.spectral.axes[j], -1.0)
        return out * s ** self.cfg.d_k


# --------------------------------------------------------------------------
# diagnostics


def roots(cfg: ReflectionConfig):
    """The normalized root system +-sqrt(2) e_j with multiplicities."""
    out = []
    for j, kj in enumerate(cfg.k):
        for sign in (1.0, -1.0):
            lam = np.zeros(cfg.d)
            lam[j] = sign * math.sqrt(2.0)
            out.append((lam, kj))
    return out


def dunkl_laplacian_apply(cfg: ReflectionConfig, f: Callable, x) -> float:
    """Delta_k f(x) from the explicit expansion over the roots.

    Derivatives are central differences; ``f`` takes a length-d array.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.size != cfg.d:
        raise DomainError(f"point must have {cfg.d} coordinates")
    if np.any(x == 0):
        raise DomainError("point lies on a coordinate hyperplane")
    eps = np.finfo(float).eps
    fx = f(x)
    grad = np.empty(cfg.d)
    lap = 0.0
    for j in range(cfg.d):
        e = np.zeros(cfg.d)
        h1 = eps ** (1 / 3) * (1 + abs(x[j]))
        e[j] = h1
        grad[j] = (f(x + e) - f(x - e)) / (2 * h1)
        # second differences have their optimum at eps^(1/4)
        h2 = eps ** (1 / 4) * (1 + abs(x[j]))
        e[j] = h2
        lap += (f(x + e) - 2 * fx + f(x - e)) / (h2 * h2)
    total = lap
    for lam, kl in roots(cfg):
        if kl == 0:
            continue
        lx = float(lam @ x)
        reflected = x - lx * lam
        total += kl * (float(grad @ lam) / lx - 0.5 * float(lam @ lam) * (fx - f(reflected)) / lx ** 2)
    return float(total)


def _axis_measure(k, a, b):
    # int_a^b c v dx on one axis, from the antiderivative sign(x)|x|^(2k+1)/(2k+1)
    F = lambda x: np.sign(x) * np.abs(x) ** (2 * k + 1) / (2 * k + 1)
    return axis_normalization(k) * 2.0 ** k * (F(b) - F(a))


def _ball_recursive(ks, center, r, order=48):
    if len(ks) == 1:
        return _axis_measure(ks[0], center[0] - r, center[0] + r)
    # x_0 = c_0 + r sin(theta) removes the square-root edge behaviour
    k0, c0 = ks[0], center[0]
    cuts = [-math.pi / 2, math.pi / 2]
    if abs(c0) < r:
        cuts.insert(1, math.asin(-c0 / r))
    gx, gw = np.polynomial.legendre.leggauss(order)
    total = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        for sa, sb in zip(np.linspace(a, b, 5)[:-1], np.linspace(a, b, 5)[1:]):
            th = 0.5 * (sa + sb) + 0.5 * (sb - sa) * gx
            wt = 0.5 * (sb - sa) * gw
            x0 = c0 + r * np.sin(th)
            inner = np.array([_ball_recursive(ks[1:], center[1:], r * math.cos(t)) for t in th])
            dens = axis_normalization(k0) * (2.0 * x0 * x0) ** k0
            total += float(np.sum(wt * r * np.cos(th) * dens * inner))
    return total


def ball_volume(cfg: ReflectionConfig, center, r: float) -> float:
    """mu_k(B(center, r)), by nested quadrature in d > 1."""
    if not r > 0:
        raise DomainError("radius must be positive")
    c = np.atleast_1d(np.asarray(center, dtype=float))
    if c.size != cfg.d:
        raise DomainError(f"center must have {cfg.d} coordinates")
    return float(_ball_recursive(cfg.k, c, float(r)))


def ball_volume_model(cfg: ReflectionConfig, center, r: float) -> float:
    """r^d prod_lambda (|<center, lambda>| + r)^k(lambda): the two-sided size model."""
    c = np.atleast_1d(np.asarray(center, dtype=float))
    out = r ** cfg.d
    for lam, kl in roots(cfg):
        out *= (abs(float(lam @ c)) + r) ** kl
    return out
