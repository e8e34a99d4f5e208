"""Deterministic Volterra system for the mean square of the perturbed equation.

With ``x = x0 + x1`` the deterministic solution, the mean square obeys

    E[X^2] = x^2 + Z,        Z = gamma + G^2(r) * Z,
    gamma  = r^2 * (g + G(x))^2,
    E[Y^2] = (g + G(x))^2 + G^2(r) * E[Y^2],

for a deterministic initial segment. ``Z`` is also ``gamma + rho*gamma`` and
``r^2 * E[Y^2]``; :func:`consistency_check` compares the three routes.
"""

from dataclasses import dataclass

import numpy as np

from . import _quad
from .grid import FunctionTable
from .kernels import diffusion_kernel
from .measures import functional_table, total_variation
from .resolvent import forced_x1, homogeneous_x0, solve_resolvent

CLAMP = 1e-12


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    nu: object
    mu: object
    f: FunctionTable
    g: FunctionTable
    psi: FunctionTable
    grid: object

    def __post_init__(self):
        self.nu.check_grid(self.grid)
        self.mu.check_grid(self.grid)
        for name in ("f", "g"):
            tab = getattr(self, name)
            if tab.start_index != 0 or tab.stop_index != self.grid.n or tab.grid.h != self.grid.h:
                raise ValueError(f"{name} must be sampled on [0, T] of the instance grid")
        if self.psi.start_index != -self.grid.n_tau or self.psi.stop_index != 0:
            raise ValueError("psi must be sampled on [-tau, 0] of the instance grid")

    def with_forcing(self, f=None, g=None):
        return ProblemInstance(self.nu, self.mu, f or self.f, g or self.g, self.psi, self.grid)


@dataclass(frozen=True, eq=False)
class MeanSquareSolution:
    EX2: FunctionTable
    EY2: FunctionTable
    Z: FunctionTable
    gamma: FunctionTable
    x: FunctionTable
    x0: FunctionTable
    x1: FunctionTable
    used_mu_zero_path: bool
    resolvent: object = None
    kernel: object = None
    G_x: FunctionTable = None
    G_x_vanishes: bool = False

    @property
    def grid(self):
        return self.EX2.grid


@dataclass(frozen=True)
class ConsistencyReport:
    dev_rho_route: float
    dev_ey2_route: float
    tolerance: float
    passed: bool

    def describe(self):
        verdict = "PASS" if self.passed else "FAIL"
        return (
            f"Z vs gamma + rho*gamma: {self.dev_rho_route:.3e}; "
            f"Z vs r^2*E[Y^2]: {self.dev_ey2_route:.3e}; tolerance {self.tolerance:.3e} -> {verdict}"
        )


def _clamp(v):
    return np.where((v < 0.0) & (v > -CLAMP), 0.0, v)


def _r_sq(r):
    rv = r.r
    return rv.values ** 2, rv.left_values ** 2


def forcing_gamma(inst, r, x):
    """``gamma = r^2 * (g + G(x))^2`` where ``G(x_t)`` reads ``psi`` for ``t+u < 0``."""
    grid = inst.grid
    gx = functional_table(inst.mu, x, lo=0)
    forcing = (inst.g.values + gx.values) ** 2
    a_p, a_m = _r_sq(r)
    vals = _quad.convolve(a_p, a_m, forcing, forcing, grid.h)
    return FunctionTable(grid, 0, _clamp(vals))


def solve_Z(gamma, k, grid=None):
    """Second-kind Volterra solve of ``Z = gamma + G^2(r) * Z``."""
    grid = grid or gamma.grid
    kp, km = k.G_sq.values, k.G_sq.left_values
    zp, _ = _quad.volterra_march(gamma.values, gamma.values, kp, km, grid.h)
    return FunctionTable(grid, 0, _clamp(zp))


def mean_square(inst, r=None, k=None):
    """Full pipeline: resolvent, deterministic solution, kernel, ``gamma``, ``Z`` and ``E[Y^2]``."""
    grid = inst.grid
    r = r or solve_resolvent(inst.nu, grid)
    x0 = homogeneous_x0(inst.nu, inst.psi, r, grid)
    x1 = forced_x1(r, inst.f, grid)
    xv = x0.values.copy()
    xv[grid.n_tau:] += x1.values
    x = FunctionTable(grid, -grid.n_tau, xv)
    x_pos = x.values[grid.n_tau:]
    k = k or diffusion_kernel(inst.mu, r)
    a_p, a_m = _r_sq(r)
    if total_variation(inst.mu) == 0.0:
        g2 = inst.g.values ** 2
        z = _clamp(_quad.convolve(a_p, a_m, g2, g2, grid.h))
        Z = FunctionTable(grid, 0, z)
        gamma = Z
        EY2 = FunctionTable(grid, 0, g2)
        gx = FunctionTable(grid, 0, np.zeros(grid.n + 1))
        mu_zero = True
    else:
        gx = functional_table(inst.mu, x, lo=0)
        forcing = (inst.g.values + gx.values) ** 2
        gamma = FunctionTable(grid, 0, _clamp(_quad.convolve(a_p, a_m, forcing, forcing, grid.h)))
        Z = solve_Z(gamma, k, grid)
        kp, km = k.G_sq.values, k.G_sq.left_values
        ey, _ = _quad.volterra_march(forcing, forcing, kp, km, grid.h)
        EY2 = FunctionTable(grid, 0, _clamp(ey))
        mu_zero = False
    EX2 = FunctionTable(grid, 0, x_pos ** 2 + Z.values)
    scale = max(1.0, float(np.max(np.abs(x.values))))
    vanishes = (not mu_zero) and float(np.max(np.abs(gx.values))) <= 1e-13 * scale
    return MeanSquareSolution(
        EX2=EX2,
        EY2=EY2,
        Z=Z,
        gamma=gamma,
        x=x,
        x0=x0,
        x1=x1,
        used_mu_zero_path=mu_zero,
        resolvent=r,
        kernel=k,
        G_x=gx,
        G_x_vanishes=vanishes,
    )


def consistency_check(sol, r, rho, factor=20.0):
    """Compare ``Z`` with ``gamma + rho*gamma`` and with ``r^2 * E[Y^2]``.

    Passes when both deviations are within ``factor * h^2 * max|Z|``.
    """
    grid = sol.grid
    h = grid.h
    g = sol.gamma.values
    rt = rho.rho
    via_rho = g + _quad.convolve(rt.values, rt.left_values, g, g, h)
    a_p, a_m = _r_sq(r)
    ey = sol.EY2.values
    via_ey = _quad.convolve(a_p, a_m, ey, ey, h)
    z = sol.Z.values
    d1 = float(np.max(np.abs(z - via_rho)))
    d2 = float(np.max(np.abs(z - via_ey)))
    tol = factor * h * h * float(np.max(np.abs(z)))
    return ConsistencyReport(d1, d2, tol, d1 <= tol and d2 <= tol)
