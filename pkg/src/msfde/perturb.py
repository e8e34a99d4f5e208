"""Forcing families and finite-horizon evidence for the stability conditions on ``f`` and ``g``.

The conditions are limits at infinity, so no finite table decides them. Every
checker here reduces a statistic to its maxima (or integrals) over the four
quarters of the horizon and returns PASS, FAIL or INCONCLUSIVE together with
the numbers it looked at.
"""

import csv
import enum
import math
from dataclasses import dataclass, field

import mpmath
import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import signal

from . import _quad
from .errors import AliasingError, GridAlignmentError, InsufficientHorizonError
from .grid import FunctionTable, steps_of

DEFAULT_DELTAS = (0.125, 0.25, 0.5, 1.0)
DEFAULT_BETAS = (0.05, 0.1, 0.2, 0.3, 0.4)
MIN_HORIZON = 8.0
REL_TOL = 1e-3


class Verdict(str, enum.Enum):
    PASS = "PASS"
    FAIL = "FAIL"
    INCONCLUSIVE = "INCONCLUSIVE"

    def __str__(self):
        return self.value


def conjunction(verdicts):
    """FAIL dominates, then INCONCLUSIVE, then PASS."""
    verdicts = list(verdicts)
    if Verdict.FAIL in verdicts:
        return Verdict.FAIL
    if Verdict.INCONCLUSIVE in verdicts:
        return Verdict.INCONCLUSIVE
    return Verdict.PASS


@dataclass(frozen=True)
class ConditionResult:
    verdict: Verdict
    evidence: dict = field(default_factory=dict)
    note: str = ""

    def describe(self):
        parts = ", ".join(f"{k}={_fmt(v)}" for k, v in self.evidence.items())
        note = f" ({self.note})" if self.note else ""
        return f"{self.verdict}{note}: {parts}"


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    return str(v)


# --------------------------------------------------------------------------
# forcing families


def spike_schedule(n_start, n_stop, height_exp=1.0, area_exp=1.0):
    """Spikes of height ``n**height_exp`` and area ``n**-area_exp`` on ``[n, n+1]``.

    Returns ``{n: (a_n, h_n)}`` with ``w_n = 1/2 - a_n``; requires ``w_n < 1/2``.
    """
    out = {}
    for n in range(n_start, n_stop + 1):
        h_n = float(n) ** height_exp
        w_n = float(n) ** (-area_exp) / h_n
        if not 0.0 < w_n < 0.5:
            raise ValueError(f"spike {n}: half-width {w_n} must lie in (0, 1/2)")
        out[n] = (0.5 - w_n, h_n)
    return out


@dataclass(frozen=True, eq=False)
class ForcingSpec:
    """A forcing function declared by kind and parameters.

    Kinds: ``zero``, ``constant(c)``, ``csv(path)``, ``chirp(alpha, beta)``
    for ``exp(alpha t) sin(exp(beta t))``, ``spikes(schedule)`` with a
    ``{n: (a_n, h_n)}`` schedule, and ``exp_decay(scale, rate)``.
    """

    kind: str
    params: dict = field(default_factory=dict)

    KINDS = ("zero", "constant", "csv", "chirp", "spikes", "exp_decay")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown forcing kind {self.kind!r}; expected one of {self.KINDS}")

    @classmethod
    def zero(cls):
        return cls("zero")

    @classmethod
    def constant(cls, c):
        return cls("constant", {"c": float(c)})

    @classmethod
    def chirp(cls, alpha, beta):
        return cls("chirp", {"alpha": float(alpha), "beta": float(beta)})

    @classmethod
    def exp_decay(cls, scale, rate):
        return cls("exp_decay", {"scale": float(scale), "rate": float(rate)})

    @classmethod
    def spikes(cls, schedule):
        return cls("spikes", {"schedule": dict(schedule)})

    @classmethod
    def from_csv(cls, path):
        return cls("csv", {"path": str(path)})

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        p = self.params
        if self.kind == "zero":
            return np.zeros_like(t)
        if self.kind == "constant":
            return np.full_like(t, p["c"])
        if self.kind == "exp_decay":
            return p["scale"] * np.exp(-p["rate"] * t)
        if self.kind == "chirp":
            return np.exp(p["alpha"] * t) * np.sin(np.exp(p["beta"] * t))
        if self.kind == "spikes":
            return _spikes(t, p["schedule"])
        raise ValueError("csv forcing has no closed form; use sample()")

    def min_period(self, T):
        """Shortest local oscillation period on ``[0, T]`` (``inf`` for non-oscillating kinds)."""
        if self.kind != "chirp":
            return math.inf
        beta = self.params["beta"]
        return 2.0 * math.pi / (beta * math.exp(beta * T))

    def sample(self, grid):
        """Realize on the nodes of ``[0, T]``.

        Raises :class:`AliasingError` when a chirp oscillates with a local
        period below four steps.
        """
        if self.kind == "csv":
            return _read_forcing_csv(self.params["path"], grid)
        period = self.min_period(grid.T)
        if period < 4.0 * grid.h:
            raise AliasingError(
                f"chirp period {period:.3g} at T={grid.T} is below 4h={4 * grid.h:.3g}; refine the check grid"
            )
        return FunctionTable(grid, 0, self(grid.t))


def _spikes(t, schedule):
    out = np.zeros_like(t)
    n = np.floor(t).astype(int)
    for k, (a, hgt) in schedule.items():
        sel = n == k
        if not np.any(sel):
            continue
        s = t[sel] - k
        w = 0.5 - a
        up = hgt * (s - a) / w
        down = hgt * (1.0 - a - s) / w
        out[sel] = np.clip(np.minimum(up, down), 0.0, None)
    return out


def _read_forcing_csv(path, grid):
    ts, vs = [], []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].lstrip().startswith("#"):
                continue
            try:
                ts.append(float(row[0]))
                vs.append(float(row[1]))
            except ValueError:
                if ts:
                    raise
                continue  # header
    ts = np.array(ts)
    if len(ts) != grid.n + 1 or np.max(np.abs(ts - grid.t)) > 1e-9 * max(1.0, grid.T):
        raise GridAlignmentError(f"{path}: times must be exactly the {grid.n + 1} grid nodes of [0, T]")
    return FunctionTable(grid, 0, np.array(vs))


# --------------------------------------------------------------------------
# oracles for the chirp (independent of any grid)


def chirp_window_integral(alpha, beta, t, delta):
    """Exact ``int_t^{t+delta} exp(alpha s) sin(exp(beta s)) ds`` via incomplete gamma functions."""
    p = alpha / beta
    return _u_power_sin(p, math.exp(beta * t), math.exp(beta * (t + delta))) / beta


def chirp_running_integral(alpha, beta, eta, t):
    """Exact ``int_0^t exp(eta s) f(s) ds`` for the chirp ``f``."""
    q = (eta + alpha) / beta
    return _u_power_sin(q, 1.0, math.exp(beta * t)) / beta


def _u_power_sin(p, a, b):
    # int_a^b u^(p-1) sin(u) du = Im( i^p [Gamma(p, -i a) - Gamma(p, -i b)] )
    with mpmath.workdps(30):
        val = mpmath.power(1j, p) * (mpmath.gammainc(p, -1j * a) - mpmath.gammainc(p, -1j * b))
        return float(mpmath.im(val))


def chirp_abs_window_integral(alpha, beta, t, delta, order=16):
    """``int_t^{t+delta} |f(s)| ds`` by Gauss-Legendre on the arcs between zeros of ``sin``."""
    p = alpha / beta
    a, b = math.exp(beta * t), math.exp(beta * (t + delta))
    k0, k1 = math.ceil(a / math.pi), math.floor(b / math.pi)
    edges = np.concatenate([[a], np.arange(k0, k1 + 1) * math.pi, [b]])
    edges = np.unique(edges)
    x, w = leggauss(order)
    lo, hi = edges[:-1], edges[1:]
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    u = mid[:, None] + half[:, None] * x[None, :]
    vals = u ** (p - 1.0) * np.abs(np.sin(u))
    return float(np.sum(half * (vals @ w))) / beta


# --------------------------------------------------------------------------
# transforms of sampled forcing


def _grid_of(f, grid):
    return grid if grid is not None else f.grid


def sectional_average(f, delta, grid=None):
    """``int_t^{t+delta} f(s) ds`` at every node with ``t + delta <= T``."""
    grid = _grid_of(f, grid)
    m = steps_of(delta, grid.h, "delta")
    if m <= 0:
        raise GridAlignmentError("delta must be a positive multiple of h")
    if f.start_index != 0:
        raise ValueError("forcing table must start at t=0")
    c = _quad.cumtrapz(f.values, f.left_values, grid.h)
    return FunctionTable(grid, 0, c[m:] - c[:-m])


def exp_filter(f, beta, grid=None):
    """Solution of ``u' = -beta u + f``, ``u(0) = 0``, with an exact integrating factor per step."""
    grid = _grid_of(f, grid)
    if not beta > 0:
        raise ValueError("beta must be positive")
    h = grid.h
    q = math.exp(-beta * h)
    fv = f.values
    # u_{k+1} = q u_k + h/2 (q f_k + f_{k+1}); the filter starts from y_0 = h/2 f_0
    y = signal.lfilter([0.5 * h, 0.5 * h * q], [1.0, -q], fv)
    u = y - 0.5 * h * fv[0] * q ** np.arange(len(fv))
    return FunctionTable(grid, f.start_index, u)


def running_exp_integral(f, beta, grid=None):
    """``int_0^t exp(beta s) f(s) ds`` at every node."""
    grid = _grid_of(f, grid)
    w = np.exp(beta * grid.t[: len(f.values)])
    return _quad.cumtrapz(w * f.values, w * f.left_values, grid.h)


def envelope_rate(t, values, t_start=0.0, t_stop=None, block=1.0):
    """Slope of ``log max|v|`` over consecutive blocks of length ``block``.

    Robust rate estimate for rapidly oscillating statistics.
    """
    t = np.asarray(t)
    a = np.abs(np.asarray(values))
    t_stop = t[-1] if t_stop is None else t_stop
    centres, peaks = [], []
    lo = t_start
    while lo + block <= t_stop + 1e-12:
        sel = (t >= lo) & (t < lo + block)
        if np.any(sel) and a[sel].max() > 0:
            centres.append(lo + 0.5 * block)
            peaks.append(a[sel].max())
        lo += block
    if len(centres) < 2:
        return float("nan")
    slope, _ = np.polyfit(centres, np.log(peaks), 1)
    return float(slope)


# --------------------------------------------------------------------------
# tail verdicts


def _quarters(n_nodes):
    edges = np.linspace(0, n_nodes, 5).astype(int)
    return [slice(edges[i], max(edges[i + 1], edges[i] + 1)) for i in range(4)]


def decay_verdict(values):
    """Evidence that a statistic tends to zero.

    PASS when the last quarter is below ``1e-3`` times the first-quarter peak
    and not increasing, or when the quarter maxima are nonincreasing from the
    second quarter on and have at least halved. FAIL when the last quarter
    stays above the tolerance and does not decrease. Otherwise INCONCLUSIVE.
    """
    a = np.abs(np.asarray(values, dtype=float))
    m = [float(a[s].max()) for s in _quarters(len(a))]
    tol = REL_TOL * m[0]
    ev = {"quarter_max": m, "tol_abs": tol, "tail_stat": m[3]}
    if m[3] <= tol and m[3] <= m[2]:
        return ConditionResult(Verdict.PASS, ev, "tail below tolerance")
    if m[1] >= m[2] >= m[3] and m[3] <= 0.5 * m[1]:
        return ConditionResult(Verdict.PASS, ev, "quarter maxima decreasing")
    if m[3] > tol and m[3] >= m[2] * (1.0 - 1e-9):
        return ConditionResult(Verdict.FAIL, ev, "tail bounded away from zero")
    return ConditionResult(Verdict.INCONCLUSIVE, ev)


def integrability_verdict(integrand, h):
    """Evidence that a nonnegative integrand has a finite integral on ``[0, inf)``."""
    w = np.asarray(integrand, dtype=float)
    q = [_quad.trapz(w[s.start:s.stop + 1], w[s.start:s.stop + 1], h) for s in _quarters(len(w) - 1)]
    total = float(sum(q))
    ev = {"quarter_integrals": q, "truncated_integral": total}
    if total == 0.0 or q[3] <= 1e-10 * total:
        return ConditionResult(Verdict.PASS, ev, "negligible tail")
    if q[3] <= 0.5 * q[2] and q[2] <= 0.5 * q[1]:
        return ConditionResult(Verdict.PASS, ev, "quarter increments shrinking geometrically")
    r3 = q[2] / q[1] if q[1] > 0 else math.inf
    r4 = q[3] / q[2] if q[2] > 0 else math.inf
    if r3 <= 0.9 and r4 <= 0.9 and r4 <= 1.05 * r3:
        return ConditionResult(Verdict.PASS, ev, "quarter increments shrinking at a steady ratio")
    if q[3] >= 0.9 * q[2]:
        return ConditionResult(Verdict.FAIL, ev, "quarter increments not shrinking")
    return ConditionResult(Verdict.INCONCLUSIVE, ev)


def boundedness_verdict(values):
    """Evidence that ``|R(t)|`` stays bounded."""
    a = np.abs(np.asarray(values, dtype=float))
    n = len(a)
    m = [float(a[s].max()) for s in _quarters(n)]
    arg = int(np.argmax(a))
    late = arg >= int(0.95 * (n - 1))
    d3, d4 = m[2] - m[1], m[3] - m[2]
    ev = {"bound": float(a.max()), "argmax_t_fraction": arg / max(n - 1, 1), "quarter_max": m}
    if not late:
        return ConditionResult(Verdict.PASS, ev, "maximum attained before the final 5%")
    if d4 <= 0.5 * max(d3, 0.0):
        return ConditionResult(Verdict.PASS, ev, "growth decelerating geometrically")
    if d3 > 0.0 and d4 >= 0.9 * d3:
        return ConditionResult(Verdict.FAIL, ev, "still growing at the horizon")
    return ConditionResult(Verdict.INCONCLUSIVE, ev)


def _require_horizon(grid):
    if grid.T < MIN_HORIZON:
        raise InsufficientHorizonError(f"horizon T={grid.T} is shorter than {MIN_HORIZON} time units")


def _worst(results):
    return conjunction(r.verdict for r in results)


# --------------------------------------------------------------------------
# theorem checkers


def check_thm2_conditions(f, g, grid=None, delta_set=DEFAULT_DELTAS):
    """Sectional averages of ``f`` and unit-window energy of ``g`` tending to zero.

    Returns a dict with ``iii`` and ``iv`` verdicts plus informational entries:
    per-delta results, the exponential-filter cross-check, and the same
    test applied to ``|f|``.
    """
    grid = _grid_of(f, grid)
    _require_horizon(grid)
    per_delta, per_delta_abs = {}, {}
    fabs = f.map(np.abs)
    for d in delta_set:
        if not 0.0 < d <= 1.0:
            raise ValueError(f"delta={d} outside (0, 1]")
        per_delta[d] = decay_verdict(sectional_average(f, d, grid).values)
        per_delta_abs[d] = decay_verdict(sectional_average(fabs, d, grid).values)
    sectional = _worst(per_delta.values())
    filt = decay_verdict(exp_filter(f, 1.0, grid).values)
    if filt.verdict in (sectional, Verdict.INCONCLUSIVE):
        verdict = sectional
        note = f"filter cross-check {filt.verdict}"
    else:
        verdict = Verdict.INCONCLUSIVE
        note = f"sectional averages {sectional} but exponential filter {filt.verdict}"
    iii = ConditionResult(
        verdict,
        {
            "tail_stat_by_delta": [per_delta[d].evidence["tail_stat"] for d in delta_set],
            "verdict_by_delta": [str(per_delta[d].verdict) for d in delta_set],
            "filter_tail": filt.evidence["tail_stat"],
        },
        note,
    )
    g_sq = g.map(np.square)
    iv = decay_verdict(sectional_average(g_sq, 1.0, grid).values)
    abs_iii = ConditionResult(
        _worst(per_delta_abs.values()),
        {"tail_stat_by_delta": [per_delta_abs[d].evidence["tail_stat"] for d in delta_set]},
        "same test on |f|; informational",
    )
    return {
        "iii": iii,
        "iv": iv,
        "per_delta": per_delta,
        "filter": filt,
        "abs_iii": abs_iii,
        "abs_per_delta": per_delta_abs,
    }


def check_thm3_conditions(f, g, grid=None, beta_grid=DEFAULT_BETAS):
    """Exponential integrability of ``g^2`` and bounded exponentially weighted integrals of ``f``."""
    grid = _grid_of(f, grid)
    betas = [float(b) for b in beta_grid]
    if not betas:
        raise ValueError("beta_grid is empty")
    if any(b <= 0 for b in betas) or betas != sorted(betas):
        raise ValueError("beta_grid must be positive and ascending")
    f_res, g_res = {}, {}
    g2 = g.values ** 2
    for b in betas:
        f_res[b] = boundedness_verdict(running_exp_integral(f, b, grid))
        g_res[b] = integrability_verdict(np.exp(2.0 * b * grid.t) * g2, grid.h)

    def summarize(res, label):
        passing = [b for b in betas if res[b].verdict is Verdict.PASS]
        if passing:
            v = Verdict.PASS
        elif all(res[b].verdict is Verdict.FAIL for b in betas):
            v = Verdict.FAIL
        else:
            v = Verdict.INCONCLUSIVE
        ev = {
            "largest_passing_beta": max(passing) if passing else float("nan"),
            "verdict_by_beta": [str(res[b].verdict) for b in betas],
        }
        if label == "f":
            ev["bound_by_beta"] = [res[b].evidence["bound"] for b in betas]
        return ConditionResult(v, ev)

    violations = beta_monotonicity_violations(betas, f_res)
    iv = summarize(f_res, "f")
    if violations:
        iv = ConditionResult(iv.verdict, {**iv.evidence, "monotonicity_violations": violations}, "2B bound violated")
    return {"iii": summarize(g_res, "g"), "iv": iv, "f_by_beta": f_res, "g_by_beta": g_res, "violations": violations}


def beta_monotonicity_violations(betas, f_res, rel_tol=1e-6):
    """Pairs ``(beta, beta2)`` where a passing ``beta2`` with bound ``B`` is not matched by ``beta <= beta2`` with bound ``<= 2B``."""
    out = []
    for i, b2 in enumerate(betas):
        r2 = f_res[b2]
        if r2.verdict is not Verdict.PASS:
            continue
        B = r2.evidence["bound"]
        for b in betas[:i]:
            r = f_res[b]
            if r.verdict is not Verdict.PASS or r.evidence["bound"] > 2.0 * B * (1.0 + rel_tol) + rel_tol:
                out.append((b, b2))
    return out


def check_thm4_conditions(f, g, grid=None, delta_set=DEFAULT_DELTAS):
    """Square integrability of the exponential filter of ``f`` and of ``g``.

    Also reports, without asserting anything, the same test applied to
    ``f_delta^2`` for each delta.
    """
    grid = _grid_of(f, grid)
    u = exp_filter(f, 1.0, grid).values
    iii = integrability_verdict(u * u, grid.h)
    iv = integrability_verdict(g.values ** 2, grid.h)
    side = {}
    for d in delta_set:
        fd = sectional_average(f, d, grid).values
        side[d] = integrability_verdict(fd * fd, grid.h)
    return {"iii": iii, "iv": iv, "sectional_l2": side}


# --------------------------------------------------------------------------
# classification


@dataclass(frozen=True, eq=False)
class TheoremVerdict:
    """Conditions (i)-(iv) for one theorem; ``overall`` is their conjunction."""

    cond_i: ConditionResult
    cond_ii: ConditionResult
    cond_iii: ConditionResult
    cond_iv: ConditionResult

    @property
    def overall(self):
        return conjunction(c.verdict for c in (self.cond_i, self.cond_ii, self.cond_iii, self.cond_iv))


_LABELS = {
    2: ("sectional averages of f -> 0", "int_t^{t+1} g^2 -> 0"),
    3: ("int exp(2 b s) g^2 finite", "|int_0^t exp(b s) f| bounded"),
    4: ("exp filter of f in L2", "g in L2"),
}


@dataclass(frozen=True, eq=False)
class StabilityReport:
    theorem2: TheoremVerdict
    theorem3: TheoremVerdict
    theorem4: TheoremVerdict
    details: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)

    @property
    def cond_i(self):
        return self.theorem2.cond_i

    @property
    def cond_ii(self):
        return self.theorem2.cond_ii

    def theorem(self, n):
        return {2: self.theorem2, 3: self.theorem3, 4: self.theorem4}[n]

    def to_text(self):
        lines = [
            "(i)   r in L2:            " + self.cond_i.describe(),
            "(ii)  ||G(r)||^2 < 1:     " + self.cond_ii.describe(),
        ]
        for n in (2, 3, 4):
            th = self.theorem(n)
            lines.append("")
            lines.append(f"Theorem {n}: overall {th.overall}")
            lines.append(f"  (iii) {_LABELS[n][0]}: " + th.cond_iii.describe())
            lines.append(f"  (iv)  {_LABELS[n][1]}: " + th.cond_iv.describe())
        if self.extras:
            lines.append("")
            lines.append("Side-by-side statistics (informational):")
            for key, val in self.extras.items():
                text = val.describe() if isinstance(val, ConditionResult) else _fmt(val)
                lines.append(f"  {key}: {text}")
        return "\n".join(lines)


def condition_i(char):
    ev = {"decay_fit": char.decay_fit if char.decay_fit is not None else "below floor",
          "real_root": char.real_root if char.real_root is not None else "none"}
    note = "+".join(char.methods)
    if char.decay_fit is not None and abs(char.decay_fit) < 1e-3:
        return ConditionResult(Verdict.INCONCLUSIVE, ev, note + "; decay rate indistinguishable from 0")
    return ConditionResult(Verdict.PASS if char.verdict_stable else Verdict.FAIL, ev, note)


def condition_ii(k):
    ev = {
        "l2_norm_sq": k.l2_norm_sq,
        "truncated": k.l2_norm_sq_truncated,
        "tail_estimate": k.l2_tail_estimate,
    }
    if k.divergent:
        return ConditionResult(Verdict.FAIL, ev, "G(r) does not decay")
    band = k.quadrature_band()
    ev["margin_band"] = band
    if abs(k.l2_norm_sq - 1.0) <= band:
        return ConditionResult(Verdict.INCONCLUSIVE, ev, "within the numerical band of 1")
    return ConditionResult(Verdict.PASS if k.l2_norm_sq < 1.0 else Verdict.FAIL, ev)


def classify(inst, r, k, f_check=None, g_check=None, delta_set=DEFAULT_DELTAS, beta_grid=DEFAULT_BETAS):
    """Per-theorem verdicts for an instance.

    ``f_check``/``g_check`` optionally replace the instance forcing for the
    condition checks (e.g. a chirp sampled on a finer grid).
    """
    f = f_check if f_check is not None else inst.f
    g = g_check if g_check is not None else inst.g
    return classify_parts(inst.nu, r, k, f, g, delta_set, beta_grid)


def classify_parts(nu, r, k, f, g, delta_set=DEFAULT_DELTAS, beta_grid=DEFAULT_BETAS):
    """:func:`classify` from its ingredients; ``f`` and ``g`` may live on a finer grid than ``r``."""
    from .resolvent import estimate_v0

    c1 = condition_i(estimate_v0(nu, r))
    c2 = condition_ii(k)
    if f.grid != g.grid:
        raise ValueError("f and g must be sampled on the same grid")
    grid = f.grid
    t2 = check_thm2_conditions(f, g, grid, delta_set)
    t3 = check_thm3_conditions(f, g, grid, beta_grid)
    t4 = check_thm4_conditions(f, g, grid, delta_set)
    extras = {
        "sectional averages of f vs of |f|": f"{t2['iii'].verdict} vs {t2['abs_iii'].verdict}",
        "sectional averages of |f|": t2["abs_iii"],
        "exponential filter of f -> 0": t2["filter"],
        "f_delta in L2 by delta": [str(v.verdict) for v in t4["sectional_l2"].values()],
    }
    return StabilityReport(
        TheoremVerdict(c1, c2, t2["iii"], t2["iv"]),
        TheoremVerdict(c1, c2, t3["iii"], t3["iv"]),
        TheoremVerdict(c1, c2, t4["iii"], t4["iv"]),
        {2: t2, 3: t3, 4: t4},
        extras,
    )
