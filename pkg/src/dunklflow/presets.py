"""Initial data used by the experiments and the command line."""
from __future__ import annotations

import numpy as np

from .core import Grid, GridFunction, ReflectionConfig, make_grid
from .errors import DomainError
from .heat import heat_kernel_on

PRESETS = ("gaussian", "bump", "dipole-plus-mass", "zero-mass")


def bump_profile(x, center: float = 0.0, radius: float = 1.0):
    """exp(-1 / (1 - ((x - center)/radius)^2)) inside the support, 0 outside."""
    u = (np.asarray(x, dtype=float) - center) / radius
    inside = np.abs(u) < 1.0
    out = np.zeros_like(u)
    out[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2))
    return out


def bump(grid: Grid, center: float = 0.5, radius: float = 1.0, mass: float = 1.0) -> GridFunction:
    """Tensor product of 1-D bumps (same center and radius on every axis), scaled to ``mass``."""
    vals = None
    for j, ax in enumerate(grid.axes):
        shape = [1] * grid.cfg.d
        shape[j] = ax.n
        b = bump_profile(ax.nodes, center, radius).reshape(shape)
        vals = b if vals is None else vals * b
    vals = np.broadcast_to(vals, grid.shape).copy()
    total = float(np.sum(vals * grid.weights))
    parity = "even" if center == 0.0 else "none"
    return GridFunction(grid, vals * (mass / total), parity)


def preset_grid(cfg: ReflectionConfig, L: float = 6.0, n: int = 768) -> Grid:
    """Grid on [-6, 6]^d with panels of width 1/4: resolves the presets up to |xi| ~ 38."""
    return make_grid(cfg, L=L, n=n)


def make_preset(name: str, cfg: ReflectionConfig, grid: Grid | None = None) -> GridFunction:
    """Named initial datum.

    gaussian          unit-mass h_{1/4}
    bump              unit-mass compact bump centred at 0.5, radius 1 (asymmetric)
    dipole-plus-mass  bump minus 0.6 x a narrower bump centred at -0.8 (mass 0.4)
    zero-mass         bump minus its mirror image (mass 0)
    """
    grid = grid or preset_grid(cfg)
    if name == "gaussian":
        return heat_kernel_on(grid, 0.25)
    if name == "bump":
        return bump(grid)
    if name == "dipole-plus-mass":
        return GridFunction(grid, bump(grid).values - bump(grid, -0.8, 0.6, 0.6).values)
    if name == "zero-mass":
        return GridFunction(grid, bump(grid).values - bump(grid, -0.5).values)
    raise DomainError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
