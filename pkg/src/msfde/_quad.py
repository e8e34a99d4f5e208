"""Trapezoid quadrature, convolution and Volterra marching on uniform grids.

Every routine takes right limits (``plus``) and left limits (``minus``) at the
nodes so that functions with jumps exactly at nodes are integrated with the
one-sided values of each sub-interval. For continuous functions pass the same
array twice.
"""

from dataclasses import dataclass

import numpy as np

from .errors import StepSizeError


def trapz(plus, minus, h):
    plus = np.asarray(plus, dtype=float)
    minus = np.asarray(minus, dtype=float)
    if len(plus) < 2:
        return 0.0
    return 0.5 * h * float(np.sum(plus[:-1] + minus[1:]))


def cumtrapz(plus, minus, h):
    """Running integral from the first node; continuous, so a single array."""
    plus = np.asarray(plus, dtype=float)
    minus = np.asarray(minus, dtype=float)
    out = np.zeros(len(plus))
    out[1:] = np.cumsum(0.5 * h * (plus[:-1] + minus[1:]))
    return out


def convolve(a_plus, a_minus, b_plus, b_minus, h):
    """Trapezoid approximation of ``(a*b)(t_k) = int_0^{t_k} a(t_k-s) b(s) ds``.

    On the sub-interval ``[s_i, s_{i+1}]`` the factor ``b`` takes its right
    limit at ``s_i`` and left limit at ``s_{i+1}``; ``a`` is evaluated at the
    mirrored one-sided limits.
    """
    a_plus = np.asarray(a_plus, dtype=float)
    a_minus = np.asarray(a_minus, dtype=float)
    b_plus = np.asarray(b_plus, dtype=float)
    b_minus = np.asarray(b_minus, dtype=float)
    n1 = len(b_plus)
    first = np.convolve(a_minus, b_plus)[:n1] - a_minus[0] * b_plus
    if a_plus is a_minus and b_plus is b_minus:
        second = first + a_minus[0] * b_plus - a_plus[:n1] * b_minus[0]
    else:
        second = np.convolve(a_plus, b_minus)[:n1] - a_plus[:n1] * b_minus[0]
    return 0.5 * h * (first + second)


def volterra_march(f_plus, f_minus, k_plus, k_minus, h):
    """Solve ``y = F + K*y`` (second kind) with the trapezoid rule.

    The diagonal term ``(h/2) K(0+) y(t_k)`` is solved exactly at each step.
    Returns right and left limits of ``y``; the convolution term is
    continuous, so ``y`` jumps exactly where ``F`` does.
    """
    f_plus = np.asarray(f_plus, dtype=float)
    f_minus = np.asarray(f_minus, dtype=float)
    k_plus = np.asarray(k_plus, dtype=float)
    k_minus = np.asarray(k_minus, dtype=float)
    n = len(f_plus) - 1
    denom = 1.0 - 0.5 * h * k_plus[0]
    if denom <= 0.0:
        raise StepSizeError(
            f"implicit Volterra step is singular (1 - h/2*K(0) = {denom:.3g}); reduce h"
        )
    kp_rev = k_plus[::-1].copy()
    km_rev = k_minus[::-1].copy()
    y_plus = np.zeros(n + 1)
    y_minus = np.zeros(n + 1)
    y_plus[0] = f_plus[0]
    y_minus[0] = f_minus[0]
    for k in range(1, n + 1):
        # K_minus[k..1] . y_plus[0..k-1]  +  K_plus[k-1..1] . y_minus[1..k-1]
        acc = np.dot(km_rev[n - k:n], y_plus[:k])
        if k > 1:
            acc += np.dot(kp_rev[n - k + 1:n], y_minus[1:k])
        y_minus[k] = (f_minus[k] + 0.5 * h * acc) / denom
        y_plus[k] = y_minus[k] + (f_plus[k] - f_minus[k])
    return y_plus, y_minus


@dataclass(frozen=True)
class DecayFit:
    """Least-squares fit ``log|v(t)| ~ log_amp + rate*t`` on a tail window."""

    rate: float
    log_amp: float
    window: tuple
    n_points: int
    oscillating: bool

    def envelope(self, t):
        return np.exp(self.log_amp + self.rate * np.asarray(t))


def fit_decay(t, v, fraction=0.25, floor_rel=1e-14):
    """Fit an exponential rate to the last ``fraction`` of ``|v|``.

    Nodes with ``|v|`` below ``floor_rel`` times the peak are skipped. When
    ``|v|`` has at least three interior local maxima in the window (an
    oscillating tail), only those maxima enter the fit so that zero crossings
    do not bias the slope. Returns ``None`` when every node is below the floor.
    """
    t = np.asarray(t, dtype=float)
    a = np.abs(np.asarray(v, dtype=float))
    n = len(a)
    i0 = min(int(np.floor((1.0 - fraction) * (n - 1))), n - 2)
    peak = float(np.max(a)) if n else 0.0
    tw, aw = t[i0:], a[i0:]
    floor = floor_rel * peak
    oscillating = False
    if len(aw) >= 5:
        inner = aw[1:-1]
        is_max = (inner >= aw[:-2]) & (inner > aw[2:]) & (inner > floor)
        idx = np.flatnonzero(is_max) + 1
        if len(idx) >= 3:
            tw, aw = tw[idx], aw[idx]
            oscillating = True
    mask = aw > floor
    if peak == 0.0 or np.count_nonzero(mask) < 2:
        return None
    slope, intercept = np.polyfit(tw[mask], np.log(aw[mask]), 1)
    return DecayFit(float(slope), float(intercept), (i0, n - 1), int(np.count_nonzero(mask)), oscillating)


def exp_tail(value_at_end, rate):
    """``int_T^inf value_at_end * exp(rate*(t-T)) dt`` for ``rate < 0``."""
    if rate >= 0.0:
        return float("inf")
    return value_at_end / (-rate)
