import numpy as np

from msfde.grid import FunctionTable, Grid
from msfde.measures import FiniteSignedMeasure
from msfde.volterra_ms import ProblemInstance


def table(grid, func, start=0):
    k = np.arange(start, grid.n + 1)
    return FunctionTable(grid, start, np.broadcast_to(np.asarray(func(k * grid.h), dtype=float), k.shape))


def history(grid, func):
    th = grid.t_history
    return FunctionTable(grid, -grid.n_tau, np.broadcast_to(np.asarray(func(th), dtype=float), th.shape))


def instance(h, T, nu_atoms=(), mu_atoms=(), f=0.0, g=0.0, psi=1.0, tau=1.0, nu_density=(), mu_density=()):
    """Problem instance from atom lists; ``f``, ``g`` and ``psi`` are constants or callables."""
    grid = Grid(h, T, tau)
    lift = lambda v: v if callable(v) else (lambda t, v=v: np.full_like(t, float(v)))  # noqa: E731
    return ProblemInstance(
        FiniteSignedMeasure(tau, nu_atoms, nu_density),
        FiniteSignedMeasure(tau, mu_atoms, mu_density),
        table(grid, lift(f)),
        table(grid, lift(g)),
        history(grid, lift(psi)),
        grid,
    )


def scalar(h=1e-3, T=5.0, a=1.0, c=1.0, **kw):
    return instance(h, T, ((0.0, -a),), ((0.0, c),), **kw)
