"""Independent reference values: closed forms, hand method-of-steps and direct quadrature.

Nothing here imports the package.
"""

import math

import numpy as np
from numpy.polynomial.legendre import leggauss

# rightmost root of lambda + exp(-lambda) = 0, i.e. W_0(-1) (principal Lambert W)
PURE_DELAY_ROOT = complex(-0.31813150520476413, 1.3372357014306895)


def scalar_mean_square(t, a=1.0, c=1.0):
    """E[X^2] for dX = -a X dt + c X dB, X(0) = 1."""
    return np.exp(-(2.0 * a - c * c) * np.asarray(t))


def scalar_rho(t, a=1.0, c=1.0):
    """Renewal resolvent of k(t) = c^2 exp(-2 a t): c^2 exp(-(2a - c^2) t)."""
    return c * c * np.exp(-(2.0 * a - c * c) * np.asarray(t))


def additive_mean_square(t, a=1.0, c0=1.0):
    """E[X^2] for dX = -a X dt + c0 dB, X(0) = 0."""
    return c0 * c0 * (1.0 - np.exp(-2.0 * a * np.asarray(t))) / (2.0 * a)


def pure_delay_resolvent(t):
    """Method of steps for r'(t) = -r(t-1), r(0) = 1, r = 0 before 0."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.zeros_like(t)
    for k in range(int(np.max(t)) + 1):
        s = t - k
        out += np.where(s >= 0, (-1.0) ** k * np.clip(s, 0, None) ** k / math.factorial(k), 0.0)
    return out


def newton_rightmost_root(z0=complex(-0.3, 1.3), iters=50):
    """2-d Newton on lambda + exp(-lambda) = 0 written in real coordinates."""
    x, y = z0.real, z0.imag
    for _ in range(iters):
        e = math.exp(-x)
        F = np.array([x + e * math.cos(y), y - e * math.sin(y)])
        J = np.array([[1 - e * math.cos(y), -e * math.sin(y)], [e * math.sin(y), 1 - e * math.cos(y)]])
        dx, dy = np.linalg.solve(J, -F)
        x, y = x + dx, y + dy
    return complex(x, y)


def chirp_window(alpha, beta, t, delta, absolute=False, order=20):
    """int_t^{t+delta} e^{alpha s} sin(e^{beta s}) ds (or of |.|) by Gauss-Legendre between zeros.

    Substituting u = e^{beta s} gives (1/beta) int u^{alpha/beta - 1} sin(u) du
    whose integrand is smooth between consecutive multiples of pi.
    """
    p = alpha / beta
    a, b = math.exp(beta * t), math.exp(beta * (t + delta))
    inner = np.arange(math.ceil(a / math.pi), math.floor(b / math.pi) + 1) * math.pi
    edges = np.unique(np.concatenate([[a], inner, [b]]))
    x, w = leggauss(order)
    lo, hi = edges[:-1], edges[1:]
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    u = mid[:, None] + half[:, None] * x[None, :]
    s = np.sin(u)
    vals = u ** (p - 1.0) * (np.abs(s) if absolute else s)
    # sum segment by segment with math.fsum to contain cancellation
    return math.fsum(half * (vals @ w)) / beta


def chirp_running(alpha, beta, eta, t):
    """int_0^t e^{eta s} e^{alpha s} sin(e^{beta s}) ds."""
    return chirp_window(alpha + eta, beta, 0.0, t)
