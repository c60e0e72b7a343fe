"""Gamma, normalized Bessel and one-sided stable subordinator densities.

Everything here is vectorized over numpy arrays and free of state, so the
functions may be called from several threads at once.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "gamma_fn",
    "bessel_j_norm",
    "Strategy",
    "SubordinatorSpec",
    "PointMass",
    "stable_density",
]

# Lanczos approximation, g = 7, nine terms (relative error ~1e-15).
_LANCZOS_G = 7.0
_LANCZOS_COEF = np.array([
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
])

_SERIES_RADIUS = 16.0

# the Lanczos sum tends to its first coefficient, 1 - 1.9e-13, so large x use Stirling
_STIRLING_FROM = 10.0
# B_2n / (2n (2n - 1))
_STIRLING_COEF = (1.0 / 12.0, -1.0 / 360.0, 1.0 / 1260.0, -1.0 / 1680.0, 1.0 / 1188.0,
                  -691.0 / 360360.0, 1.0 / 156.0, -3617.0 / 122400.0)


def _lanczos(x):
    # valid for x >= 0.5
    z = x - 1.0
    acc = np.full_like(z, _LANCZOS_COEF[0])
    for i in range(1, len(_LANCZOS_COEF)):
        acc = acc + _LANCZOS_COEF[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    # pow in two halves: exp of a large argument would cost |arg| ulps, a single pow overflows early
    half = np.power(t, 0.5 * (z + 0.5))
    return half * (half * np.exp(-t)) * math.sqrt(2.0 * math.pi) * acc


def _stirling(x):
    inv2 = 1.0 / (x * x)
    corr = np.zeros_like(x)
    for c in reversed(_STIRLING_COEF):
        corr = corr * inv2 + c
    half = np.power(x, 0.5 * (x - 0.5))
    return half * (half * np.exp(-x)) * math.sqrt(2.0 * math.pi) * np.exp(corr / x)


def gamma_fn(x):
    """Gamma function for positive real ``x`` (scalar or array)."""
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError("gamma_fn is only defined here for x > 0")
    out = np.empty_like(arr)
    small = arr < 0.5
    if np.any(small):
        xs = arr[small]
        # reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        out[small] = math.pi / (np.sin(math.pi * xs) * _lanczos(1.0 - xs))
    mid = ~small & (arr < _STIRLING_FROM)
    if np.any(mid):
        out[mid] = _lanczos(arr[mid])
    big = arr >= _STIRLING_FROM
    if np.any(big):
        out[big] = _stirling(arr[big])
    return out.item() if out.ndim == 0 else out


def _bessel_series(order, z):
    """Power series of j_order(z); z may be complex."""
    w = -(z * z) / 4.0
    zmax = float(np.max(np.abs(z))) if np.size(z) else 0.0
    # enough terms for the tail to drop below 1e-17 of the leading term
    nterms = int(30 + 1.5 * zmax)
    term = np.ones_like(w)
    total = np.ones_like(w)
    for n in range(1, nterms):
        term = term * w / (n * (n + order))
        total = total + term
    return total


def _bessel_asymptotic(order, z):
    """Hankel expansion of j_order for real |z| > _SERIES_RADIUS."""
    az = np.abs(z)
    mu = 4.0 * order * order
    omega = az - 0.5 * order * math.pi - 0.25 * math.pi
    p = np.ones_like(az)
    q = np.zeros_like(az)
    coef = 1.0
    inv = 1.0 / az
    power = np.ones_like(az)
    for k in range(1, 26):
        coef *= (mu - (2 * k - 1) ** 2) / (k * 8.0)
        if coef == 0.0:
            break
        power = power * inv
        sign = (-1) ** (k // 2)
        if k % 2:
            q = q + sign * coef * power
        else:
            p = p + sign * coef * power
    jnu = np.sqrt(2.0 / (math.pi * az)) * (p * np.cos(omega) - q * np.sin(omega))
    return gamma_fn(order + 1.0) * (2.0 * inv) ** order * jnu


def bessel_j_norm(order, z):
    """Normalized Bessel function j_a(z) = Gamma(a+1) (2/z)^a J_a(z).

    Even in ``z`` with j_a(0) = 1.  Real arguments use the power series for
    |z| <= 16 and the Hankel asymptotic expansion beyond.  Complex arguments
    always go through the series, which is accurate for the purely imaginary
    arguments the Dunkl kernel needs.
    """
    if order < -0.5:
        raise DomainError(f"bessel_j_norm needs order >= -1/2, got {order}")
    arr = np.asarray(z)
    if np.iscomplexobj(arr) and np.any(arr.imag != 0):
        out = _bessel_series(order, arr.astype(complex))
        return out.item() if out.ndim == 0 else out
    x = np.asarray(arr.real if np.iscomplexobj(arr) else arr, dtype=float)
    out = np.empty_like(x)
    near = np.abs(x) <= _SERIES_RADIUS
    if np.any(near):
        # the alternating series cancels down from ~e^|z| / |z|; extended precision absorbs that
        out[near] = _bessel_series(order, x[near].astype(np.longdouble)).astype(float)
    far = ~near
    if np.any(far):
        out[far] = _bessel_asymptotic(order, x[far])
    return out.item() if out.ndim == 0 else out


class Strategy(str, enum.Enum):
    CLOSED_FORM_HALF = "closed-form-half"
    ZOLOTAREV = "zolotarev-integral"


@dataclass(frozen=True)
class SubordinatorSpec:
    alpha: float
    t: float = 1.0
    strategy: Strategy = Strategy.ZOLOTAREV

    def __post_init__(self):
        if not (0.0 < self.alpha <= 1.0):
            raise DomainError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not self.t > 0:
            raise DomainError(f"t must be positive, got {self.t}")
        object.__setattr__(self, "strategy", Strategy(self.strategy))
        if self.strategy is Strategy.CLOSED_FORM_HALF and self.alpha != 0.5:
            raise DomainError("closed-form-half strategy requires alpha = 1/2")


@dataclass(frozen=True)
class PointMass:
    """The alpha = 1 subordinator: a Dirac mass at ``location``."""

    location: float


# The Zolotarev integrand is g exp(-g) with g = s^(-a/(1-a)) A(phi) and A
# increasing on (0, pi).  As alpha -> 1 it becomes a spike of width ~ 1 - alpha,
# so panel edges sit at level sets of g: log g in _LOG_LEVELS below the peak,
# g = g* + _G_STEPS above it (g* = max(1, g(0))), where g exp(-g) falls to e^-46.
# Fixed edges graded toward 0 and pi catch the steep rise of A for small alpha.
_LOG_LEVELS = np.array([-45.0, -30.0, -20.0, -14.0, -10.0, -7.0, -5.0, -3.5, -2.5, -1.5, -0.75, 0.0])
_G_STEPS = np.array([0.5, 1.0, 2.0, 3.5, 6.0, 10.0, 16.0, 24.0, 34.0, 46.0])
_FIXED_EDGES = np.concatenate([math.pi * 2.0 ** -np.arange(1.0, 13.0),
                               math.pi * (1.0 - 2.0 ** -np.arange(2.0, 13.0))])
_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


def _zolotarev_log_a(alpha, phi):
    # log A(phi), A = (sin(a phi)/sin phi)^(1/(1-a)) * sin((1-a) phi)/sin(a phi)
    sa = np.sin(alpha * phi)
    return ((np.log(sa) - np.log(np.sin(phi))) / (1.0 - alpha)
            + np.log(np.sin((1.0 - alpha) * phi)) - np.log(sa))


def _zolotarev_log_a0(alpha):
    # log A(0+) = log(alpha^(alpha/(1-alpha)) (1 - alpha))
    return alpha / (1.0 - alpha) * math.log(alpha) + math.log(1.0 - alpha)


def _zolotarev_phi(alpha, level):
    """phi in [0, pi) with log A(phi) = level (0 where level <= log A(0+))."""
    lo = np.zeros_like(level)
    hi = np.full_like(level, math.pi)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        below = _zolotarev_log_a(alpha, mid) < level
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return np.where(level <= _zolotarev_log_a0(alpha), 0.0, 0.5 * (lo + hi))


def _eta1_zolotarev(alpha, s):
    c = -alpha / (1.0 - alpha) * np.log(s)
    g_star = np.maximum(1.0, np.exp(c + _zolotarev_log_a0(alpha)))
    log_g = np.concatenate([np.broadcast_to(_LOG_LEVELS, (s.size, _LOG_LEVELS.size)),
                            np.log(g_star[:, None] + _G_STEPS)], axis=1)
    edges = _zolotarev_phi(alpha, log_g - c[:, None])
    # no fixed edge past the last level: beyond it the integrand is below e^-46
    fixed = np.where(_FIXED_EDGES[None, :] < edges[:, -1:], _FIXED_EDGES[None, :], 0.0)
    edges = np.sort(np.concatenate([edges, fixed], axis=1), axis=1)
    mid = 0.5 * (edges[:, 1:] + edges[:, :-1])
    rad = 0.5 * (edges[:, 1:] - edges[:, :-1])
    phi = mid[..., None] + rad[..., None] * _GL_X
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        lg = c[:, None, None] + _zolotarev_log_a(alpha, phi)
        vals = np.where(rad[..., None] > 0, np.exp(lg - np.exp(lg)), 0.0)
    integral = np.sum(vals * rad[..., None] * _GL_W, axis=(1, 2))
    return alpha / ((1.0 - alpha) * math.pi * s) * integral


# beyond this value of s^(-alpha) the Zolotarev integrand peaks too close to pi
_SERIES_SWITCH = 0.1


def _eta1_series(alpha, s, terms=40):
    # eta_1(s) = (1/pi) sum_n (-1)^(n+1) Gamma(n a + 1) sin(n pi a) / n! * s^(-n a - 1)
    x = s ** -alpha
    total = np.zeros_like(s)
    power = np.ones_like(s)
    for n in range(1, terms + 1):
        power = power * x
        c = (-1) ** (n + 1) * gamma_fn(n * alpha + 1.0) * math.sin(n * math.pi * alpha) / math.factorial(n)
        total = total + c * power
    return total / (math.pi * s)


def _eta1_half(s):
    return np.exp(-1.5 * np.log(s) - 0.25 / s) / (2.0 * math.sqrt(math.pi))


def _eta1(spec, s):
    if spec.strategy is Strategy.CLOSED_FORM_HALF:
        return _eta1_half(s)
    out = np.empty_like(s)
    far = s ** -spec.alpha <= _SERIES_SWITCH
    if np.any(far):
        out[far] = _eta1_series(spec.alpha, s[far])
    if np.any(~far):
        out[~far] = _eta1_zolotarev(spec.alpha, s[~far])
    return out


def stable_density(spec: SubordinatorSpec, s):
    """Density eta_{t,alpha}(s) of the one-sided alpha-stable subordinator.

    Normalized by its Laplace transform, int exp(-lam s) eta_{t,alpha}(s) ds
    = exp(-t lam^alpha).  Evaluated as t^(-1/alpha) eta_{1,alpha}(s t^(-1/alpha)).
    For alpha = 1 a :class:`PointMass` at s = t is returned instead.
    """
    if spec.alpha == 1.0:
        return PointMass(spec.t)
    arr = np.asarray(s, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError("stable_density needs s > 0")
    scale = spec.t ** (-1.0 / spec.alpha)
    flat = arr.reshape(-1) * scale
    out = scale * _eta1(spec, flat)
    out = np.maximum(out, 0.0).reshape(arr.shape)
    return out.item() if out.ndim == 0 else out
