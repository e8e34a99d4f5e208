"""Diffusion kernel ``G(r_t)``, its exponential moments, the critical rate and the renewal resolvent ``rho``."""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import _quad
from .errors import PreconditionError, StepSizeError
from .grid import FunctionTable
from .measures import functional_table

log = logging.getLogger(__name__)

GAMMA_TOL = 1e-8
RHO_CLAMP = 1e-12
FIT_FLOOR = 1e-14


@dataclass(frozen=True, eq=False)
class KernelTable:
    """``G(t) = int r(t+u) mu(du)`` and ``G^2`` on ``[0, T]`` with L2 bookkeeping.

    ``decay_rate`` is the fitted exponential rate of ``|G|`` on the last
    quarter (negative when decaying, ``None`` below the numerical floor).
    ``l2_norm_sq`` is the truncated integral plus the exponential tail
    estimate; ``divergent`` is set when the tail does not decay.
    """

    G: FunctionTable
    G_sq: FunctionTable
    l2_norm_sq_truncated: float
    l2_tail_estimate: float
    l2_norm_sq: float
    decay_rate: float = None
    fit: _quad.DecayFit = None
    divergent: bool = False
    warnings: tuple = field(default_factory=tuple)

    @property
    def grid(self):
        return self.G.grid

    @property
    def is_trivial(self):
        return not np.any(self.G_sq.values) and not np.any(self.G_sq.left_values)

    def tail_amplitude_sq(self):
        """Squared amplitude of ``G`` at ``T`` used by tail corrections."""
        if self.fit is not None and self.fit.oscillating:
            # mean of cos^2 over a period
            return 0.5 * float(self.fit.envelope(self.grid.T)) ** 2
        return float(self.G_sq.values[-1])

    def quadrature_band(self):
        """Half-width of the band around 1 in which ``l2_norm_sq`` cannot be resolved."""
        h = self.grid.h
        rate = abs(self.decay_rate) if self.decay_rate is not None else 1.0
        return max(10.0 * self.l2_tail_estimate, 10.0 * h * h * max(1.0, rate * rate) * self.l2_norm_sq)


@dataclass(frozen=True, eq=False)
class RhoTable:
    rho: FunctionTable
    l1_norm_truncated: float
    clamped: bool = False


def diffusion_kernel(mu, r):
    """Kernel table for ``mu`` against the resolvent ``r`` (zero-extended below 0)."""
    grid = r.grid
    G = functional_table(mu, r.r, lo=0)
    gp = G.values
    gm = G.left_values
    G_sq = FunctionTable(grid, 0, gp * gp, None if G.left is None else gm * gm)
    trunc = _quad.trapz(G_sq.values, G_sq.left_values, grid.h)
    warnings = []
    fit = _quad.fit_decay(grid.t, gp, floor_rel=FIT_FLOOR)
    divergent = False
    if fit is None or trunc == 0.0:
        tail, rate, fit = 0.0, None, None
    elif fit.rate >= 0.0:
        tail, rate, divergent = 0.0, fit.rate, True
        warnings.append("G does not decay over the fit window; L2 norm treated as divergent")
    else:
        rate = fit.rate
        amp_sq = 0.5 * float(fit.envelope(grid.T)) ** 2 if fit.oscillating else float(G_sq.values[-1])
        tail = amp_sq / (2.0 * abs(rate))
    total = math.inf if divergent else trunc + tail
    return KernelTable(G, G_sq, trunc, tail, total, rate, fit, divergent, tuple(warnings))


def gamma_transform(k, lam):
    """``int_0^inf exp(2*lam*s) G^2(s) ds``; ``inf`` when the weighted integrand does not decay."""
    if k.is_trivial:
        return 0.0
    if k.divergent:
        return math.inf
    grid = k.grid
    w = np.exp(2.0 * lam * grid.t)
    trunc = _quad.trapz(w * k.G_sq.values, w * k.G_sq.left_values, grid.h)
    if k.decay_rate is None:
        return trunc
    rate = k.decay_rate + lam  # growth rate of |G| exp(lam t)
    if rate >= 0.0:
        return math.inf
    tail = math.exp(2.0 * lam * grid.T) * k.tail_amplitude_sq() / (2.0 * -rate)
    return trunc + tail


def critical_rate(k, tol=GAMMA_TOL):
    """The unique ``lam >= 0`` with ``gamma_transform(k, lam) == 1``.

    Requires ``0 < Gamma(0) < 1``. Values of ``Gamma(0)`` within the
    quadrature band of 1 are rejected as not subcritical.
    """
    g0 = k.l2_norm_sq
    if k.is_trivial or g0 == 0.0:
        raise PreconditionError("trivial kernel: G(r) vanishes; use the explicit mu = 0 mean square")
    if not g0 < 1.0 - k.quadrature_band():
        raise PreconditionError(f"kernel not subcritical: ||G(r)||^2 = {g0:.10g} is not below 1")
    a = -k.decay_rate if k.decay_rate is not None else 1.0
    cap = 2.0 ** 10 * max(a, 1e-3)
    hi = 0.5 * a if a > 0 else 1.0
    while gamma_transform(k, hi) <= 1.0:
        hi *= 2.0
        if hi > cap:
            raise PreconditionError("Gamma stays below 1 up to the bracket cap")
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        gm = gamma_transform(k, mid)
        if math.isfinite(gm) and abs(gm - 1.0) < tol:
            return mid
        if gm > 1.0:
            hi = mid
        else:
            lo = mid
        if hi - lo < 1e-15 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def renewal_rho(k, grid=None):
    """Solve ``rho = G^2 + G^2 * rho`` by trapezoid marching."""
    grid = grid or k.grid
    kp, km = k.G_sq.values, k.G_sq.left_values
    if 1.0 - 0.5 * grid.h * kp[0] <= 0.0:
        raise StepSizeError("renewal step singular: 1 - h/2*G^2(0) <= 0; reduce h")
    yp, ym = _quad.volterra_march(kp, km, kp, km, grid.h)
    clamped = False
    if min(yp.min(), ym.min()) < -RHO_CLAMP:
        clamped = True
        log.warning("rho dipped below -%g; clamped to zero", RHO_CLAMP)
    yp = np.maximum(yp, 0.0)
    ym = np.maximum(ym, 0.0)
    rho = FunctionTable(grid, 0, yp, None if np.array_equal(yp, ym) else ym)
    return RhoTable(rho, _quad.trapz(yp, ym, grid.h), clamped)


def exp_weighted_rho_integral(rho, eps):
    """``int_0^inf exp(2*eps*s) rho(s) ds`` with an exponential tail; ``inf`` if the integrand grows."""
    table = rho.rho
    grid = table.grid
    w = np.exp(2.0 * eps * grid.t)
    wp, wm = w * table.values, w * table.left_values
    trunc = _quad.trapz(wp, wm, grid.h)
    fit = _quad.fit_decay(grid.t, wp, floor_rel=FIT_FLOOR)
    if fit is None:
        return trunc
    if fit.rate >= 0.0:
        return math.inf
    end = 0.5 * float(fit.envelope(grid.T)) if fit.oscillating else float(wp[-1])
    return trunc + _quad.exp_tail(end, fit.rate)
