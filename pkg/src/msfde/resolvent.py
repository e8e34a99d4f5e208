"""Differential resolvent of the linear delay equation and the deterministic solutions built from it.

The resolvent solves ``r(t) = 1 + int_0^t (r * nu)(s) ds`` with ``r = 0`` on
``[-tau, 0)``. It is marched in this integral form with the trapezoid rule:
the integrand jumps whenever a lagged atom of ``nu`` crosses ``t = 0``, and
the one-sided trapezoid keeps second order through those jumps.
"""

from dataclasses import dataclass

import numpy as np
from scipy import optimize

from . import _quad
from .errors import ConsistencyError, StepSizeError
from .grid import FunctionTable, Grid
from .measures import functional_table, measure_transform

FIT_FLOOR = 1e-14


@dataclass(frozen=True, eq=False)
class ResolventTable:
    r: FunctionTable
    fitted_decay_rate: float
    fit_window: tuple
    fit: _quad.DecayFit = None

    @property
    def grid(self):
        return self.r.grid

    @property
    def values(self):
        return self.r.values

    @property
    def below_floor(self):
        return self.fit is None


@dataclass(frozen=True)
class CharacteristicReport:
    real_root: float
    decay_fit: float
    verdict_stable: bool
    methods: tuple
    below_floor: bool = False

    def describe(self):
        rate = "below numerical floor" if self.below_floor else f"{self.decay_fit:.6g}"
        root = "none in bracket" if self.real_root is None else f"{self.real_root:.10g}"
        return (
            f"rightmost real root of h: {root}; decay fit of log|r|: {rate}; "
            f"stable: {self.verdict_stable} [{'+'.join(self.methods)}]"
        )


def march_delay(lw, grid, hist_plus, hist_minus, y0, forcing=None):
    """March ``y(t) = y(0) + int_0^t [(y * nu)(s) + forcing(s)] ds`` on ``[0, T]``.

    ``hist_plus``/``hist_minus`` give right/left limits on ``[-tau, 0]``
    (``n_tau + 1`` entries, the last one being the left limit at 0 for
    ``hist_minus``); ``y0`` is the right limit at 0.
    """
    n, m, h = grid.n, grid.n_tau, grid.h
    P = np.zeros(m + n + 1)
    M = np.zeros(m + n + 1)
    P[: m + 1] = hist_plus
    M[: m + 1] = hist_minus
    P[m] = y0
    c0 = lw.weight_at_zero
    denom = 1.0 - 0.5 * h * c0
    if denom <= 0.0:
        raise StepSizeError(
            f"implicit resolvent step is singular (1 - h/2*w0 = {denom:.3g}); reduce h"
        )
    lags = [int(j) for j in lw.lags]
    weights = [float(w) for w in lw.weights]
    lagged = [(j, w) for j, w in zip(lags, weights) if j > 0]
    w0 = sum(w for j, w in zip(lags, weights) if j == 0)
    dens = lw.density if lw.has_density else None
    if dens is not None:
        d_rev = dens[::-1].copy()
        d0 = float(dens[0])
        nd = len(dens)
    phi = None if forcing is None else np.asarray(forcing, dtype=float)
    half = 0.5 * h
    y = np.zeros(n + 1)
    y[0] = y0
    for k in range(n):
        ik = k + m
        # right limit of the integrand at t_k
        lp = w0 * P[ik]
        for j, w in lagged:
            lp += w * P[ik - j]
        # left limit at t_{k+1}, excluding the unknown y_{k+1}
        lm = 0.0
        for j, w in lagged:
            lm += w * M[ik + 1 - j]
        if dens is not None:
            dk = half * (np.dot(d_rev, M[ik - nd + 1: ik + 1]) + np.dot(d_rev, P[ik - nd: ik]))
            lp += dk
            # node k+1: i=0 term is d0*(y_{k+1} + P[k]); i>=1 terms are known
            lm += half * (d0 * P[ik] + np.dot(d_rev[:-1], M[ik - nd + 2: ik + 1]) + np.dot(d_rev[:-1], P[ik - nd + 1: ik]))
        rhs = y[k] + half * (lp + lm)
        if phi is not None:
            rhs += half * (phi[k] + phi[k + 1])
        yk1 = rhs / denom
        y[k + 1] = yk1
        P[ik + 1] = yk1
        M[ik + 1] = yk1
    return y


def solve_resolvent(nu, grid):
    """Resolvent table of ``nu`` on ``[0, T]`` with a decay-rate fit on the last quarter."""
    lw = nu.lag_weights(grid)
    zeros = np.zeros(grid.n_tau + 1)
    r = march_delay(lw, grid, zeros, zeros, 1.0)
    left = r.copy()
    left[0] = 0.0
    table = FunctionTable(grid, 0, r, left)
    fit = _quad.fit_decay(grid.t, r, floor_rel=FIT_FLOOR)
    rate = None if fit is None else fit.rate
    window = fit.window if fit is not None else (int(0.75 * grid.n), grid.n)
    return ResolventTable(table, rate, window, fit)


def characteristic_h(nu, lam):
    return lam - measure_transform(nu, lam)


def rightmost_real_root(nu, bracket=(-10.0, 10.0), samples=4001):
    """Rightmost real zero of ``h`` in ``bracket`` by scan plus bisection, or ``None``."""
    lo, hi = bracket
    lam = np.linspace(lo, hi, samples)
    with np.errstate(over="ignore"):
        vals = np.array([characteristic_h(nu, x) for x in lam])
    for i in range(samples - 1, 0, -1):
        a, b = vals[i - 1], vals[i]
        if b == 0.0:
            return float(lam[i])
        if np.isfinite(a) and np.isfinite(b) and a * b < 0.0:
            return float(optimize.bisect(lambda x: characteristic_h(nu, x), lam[i - 1], lam[i], xtol=1e-14))
    return None


def estimate_v0(nu, r, bracket=(-10.0, 10.0)):
    """Evidence on the rightmost characteristic root; never a certificate."""
    root = rightmost_real_root(nu, bracket)
    if r.fit is None:
        stable, methods = True, ("decay-fit",)
        decay = None
    else:
        decay = r.fitted_decay_rate
        stable = decay < 0.0
        methods = ("decay-fit",)
    if root is not None and (root < 0.0) == stable:
        methods = methods + ("real-root",)
    return CharacteristicReport(root, decay, stable, methods, below_floor=r.fit is None)


def _history(psi, grid):
    if psi.start_index != -grid.n_tau or psi.stop_index != 0:
        raise ValueError("psi must be sampled on exactly [-tau, 0]")
    return psi.values


def _voc_x0(nu, psi_vals, r, grid):
    # x0 = r*psi(0) + r * F, where F(t) = int psi(t+s) 1{t+s<0} nu(ds) is the
    # variation-of-constants double integral after exchanging the order.
    m, n = grid.n_tau, grid.n
    hist = np.zeros(m + n + 1)
    hist[:m] = psi_vals[:m]
    H = FunctionTable(grid, -m, hist, _history_left(hist, psi_vals[m], m))
    F = functional_table(nu, H, lo=0)
    rv = r.r
    conv = _quad.convolve(rv.values, rv.left_values, F.values, F.left_values, grid.h)
    return rv.values * psi_vals[m] + conv


def _history_left(hist, psi0, m):
    left = hist.copy()
    left[m] = psi0
    return left


def homogeneous_x0(nu, psi, r, grid, check=True):
    """Solution of the unforced delay equation started from ``psi`` on ``[-tau, T]``.

    Evaluated by the variation-of-constants formula and, when ``check``,
    compared against direct marching of the delay equation. The tolerance is
    ten times a step-halving estimate of the marching error plus an
    ``O(h^2)`` floor.
    """
    psi_vals = np.asarray(_history(psi, grid), dtype=float)
    voc = _voc_x0(nu, psi_vals, r, grid)
    if check:
        direct = _direct_x0(nu, psi_vals, grid)
        scale = max(1.0, float(np.max(np.abs(direct))))
        est = _halving_estimate(nu, psi_vals, grid, direct)
        tol = 10.0 * est + 10.0 * grid.h ** 2 * scale + 1e-12 * scale
        dev = float(np.max(np.abs(voc - direct)))
        if dev > tol:
            raise ConsistencyError(
                f"variation-of-constants x0 and marched x0 differ by {dev:.3e} (> {tol:.3e})"
            )
    return FunctionTable(grid, -grid.n_tau, np.concatenate([psi_vals[:-1], voc]))


def _direct_x0(nu, psi_vals, grid):
    lw = nu.lag_weights(grid)
    return march_delay(lw, grid, psi_vals, psi_vals, psi_vals[-1])


def _halving_estimate(nu, psi_vals, grid, fine):
    if grid.n % 2 or grid.n_tau % 2:
        return 0.0
    coarse_grid = Grid(2 * grid.h, grid.T, grid.tau)
    try:
        coarse = _direct_x0(nu, psi_vals[::2], coarse_grid)
    except Exception:
        return 0.0
    return float(np.max(np.abs(coarse - fine[::2]))) / 3.0


def forced_x1(r, f, grid):
    """``x1 = r * f`` by the trapezoid convolution at every node of ``[0, T]``."""
    if f.start_index != 0 or f.stop_index != grid.n:
        raise ValueError("forcing must be sampled on exactly [0, T]")
    rv = r.r
    vals = _quad.convolve(rv.values, rv.left_values, f.values, f.left_values, grid.h)
    return FunctionTable(grid, 0, vals)


def eigen_history(grid, lam):
    """``psi(t) = exp(lam*t)`` on ``[-tau, 0]``."""
    return FunctionTable(grid, -grid.n_tau, np.exp(lam * grid.t_history))


def exponential_bound_ratio(r, shrink=0.9):
    """``max_k |r(t_k)| exp(-shrink*rate*t_k)``; finite and moderate when the fit is honest."""
    if r.fit is None:
        return float(np.max(np.abs(r.values)))
    t = r.grid.t
    with np.errstate(over="ignore"):
        return float(np.max(np.abs(r.values) * np.exp(-shrink * r.fitted_decay_rate * t)))


__all__ = [
    "ResolventTable",
    "CharacteristicReport",
    "solve_resolvent",
    "characteristic_h",
    "estimate_v0",
    "homogeneous_x0",
    "forced_x1",
    "march_delay",
    "rightmost_real_root",
    "eigen_history",
    "exponential_bound_ratio",
]

