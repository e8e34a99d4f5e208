"""Euler-Maruyama paths of the perturbed delay equation and their mean square.

Random numbers come from a counter-based generator: path ``p`` of a run
with seed ``s`` uses ``numpy.random.Philox(key=[s, p])`` and draws
``n + 1`` standard normals in order. Entry 0 is the amplitude of a random
initial segment (drawn but unused for a deterministic one); entries
``1..n`` scale the Brownian increments of steps ``0..n-1``. Paths are
grouped in fixed chunks of ``CHUNK`` indices whose moments are merged in
chunk order, so the result does not depend on the number of worker threads.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .grid import FunctionTable

CHUNK = 1024
BLOWUP = 1e150
LOW_POWER_PATHS = 100
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class McConfig:
    paths: int
    seed: int = 0
    psi_mode: str = "deterministic"

    def __post_init__(self):
        if int(self.paths) != self.paths or self.paths < 2:
            raise ValueError(f"paths must be an integer >= 2, got {self.paths!r}")
        if self.psi_mode not in ("deterministic", "random"):
            raise ValueError(f"psi_mode must be 'deterministic' or 'random', got {self.psi_mode!r}")


@dataclass(frozen=True, eq=False)
class McEstimate:
    mean_sq: FunctionTable
    std_err: FunctionTable
    paths: int
    seed: int
    exploded: bool = False
    blowup_time: float = None

    @property
    def grid(self):
        return self.mean_sq.grid


@dataclass(frozen=True)
class CompareRow:
    t: float
    mc: float
    volterra: float
    std_err: float
    allowance: float
    z: float


@dataclass(frozen=True)
class CompareReport:
    rows: tuple
    passed: bool
    low_power: bool
    z_max: float = 4.0

    def describe(self):
        head = "PASS" if self.passed else "FAIL"
        if self.low_power:
            head += " (low power: too few paths for a meaningful test)"
        lines = [f"Monte Carlo vs Volterra: {head}"]
        for r in self.rows:
            lines.append(
                f"  t={r.t:g}: mc={r.mc:.6g} volterra={r.volterra:.6g} "
                f"se={r.std_err:.3g} allowance={r.allowance:.3g} z={r.z:.3g}"
            )
        return "\n".join(lines)


def worker_count():
    """Worker threads from ``MSFDE_THREADS`` (unset or 0 means one per CPU)."""
    raw = os.environ.get("MSFDE_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"MSFDE_THREADS must be a non-negative integer, got {raw!r}") from None
    if n < 0:
        raise ValueError(f"MSFDE_THREADS must be a non-negative integer, got {raw!r}")
    return n or (os.cpu_count() or 1)


def path_normals(seed, path, n):
    """The ``n + 1`` standard normals assigned to one path."""
    bitgen = np.random.Philox(key=[int(seed) & _MASK64, int(path) & _MASK64])
    return np.random.Generator(bitgen).standard_normal(n + 1)


def _stencil(measure, grid):
    """Coefficients ``c[j]`` with ``int X(t_k+s) m(ds) ~ sum_j c[j] X(t_{k-j})``."""
    lw = measure.lag_weights(grid)
    c = np.zeros(grid.n_tau + 1)
    for j, w in zip(lw.lags, lw.weights):
        c[j] += w
    if lw.has_density:
        half = 0.5 * grid.h * lw.density
        c[:-1] += half
        c[1:] += half
    nz = np.flatnonzero(c)
    return nz, c[nz]


def _simulate_chunk(inst, cfg, first, count):
    grid = inst.grid
    n, m, h = grid.n, grid.n_tau, grid.h
    normals = np.stack([path_normals(cfg.seed, p, n) for p in range(first, first + count)])
    X = np.empty((count, m + n + 1))
    amp = normals[:, :1] if cfg.psi_mode == "random" else 1.0
    X[:, : m + 1] = amp * inst.psi.values[None, :]
    dB = math.sqrt(h) * normals[:, 1:]
    nu_lags, nu_w = _stencil(inst.nu, grid)
    mu_lags, mu_w = _stencil(inst.mu, grid)
    f, g = inst.f.values, inst.g.values
    blow = None
    for k in range(n):
        i = k + m
        drift = f[k] + X[:, i - nu_lags] @ nu_w if len(nu_lags) else np.full(count, f[k])
        diff = g[k] + X[:, i - mu_lags] @ mu_w if len(mu_lags) else np.full(count, g[k])
        X[:, i + 1] = X[:, i] + drift * h + diff * dB[:, k]
        if not np.all(np.abs(X[:, i + 1]) <= BLOWUP):
            # once any path leaves the representable range the moments are meaningless
            blow = k + 1
            X[:, i + 1:] = np.inf
            break
    with np.errstate(over="ignore", invalid="ignore"):
        sq = X[:, m:] ** 2
        mean = sq.mean(axis=0)
        m2 = ((sq - mean) ** 2).sum(axis=0)
    return count, mean, m2, blow


def _merge(a, b):
    # Chan et al. pairwise update of (count, mean, M2)
    na, ma, sa, ba = a
    nb, mb, sb, bb = b
    nt = na + nb
    with np.errstate(over="ignore", invalid="ignore"):
        d = mb - ma
        mean = ma + d * (nb / nt)
        m2 = sa + sb + d * d * (na * nb / nt)
    blows = [x for x in (ba, bb) if x is not None]
    return nt, mean, m2, min(blows) if blows else None


def simulate(inst, cfg, threads=None):
    """Mean and standard error of ``X^2`` over ``cfg.paths`` Euler-Maruyama paths."""
    grid = inst.grid
    starts = list(range(0, cfg.paths, CHUNK))
    sizes = [min(CHUNK, cfg.paths - s) for s in starts]
    threads = worker_count() if threads is None else max(1, int(threads))
    if threads == 1 or len(starts) == 1:
        parts = [_simulate_chunk(inst, cfg, s, c) for s, c in zip(starts, sizes)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda sc: _simulate_chunk(inst, cfg, *sc), zip(starts, sizes)))
    acc = parts[0]
    for p in parts[1:]:
        acc = _merge(acc, p)
    count, mean, m2, blow = acc
    with np.errstate(over="ignore", invalid="ignore"):
        se = np.sqrt(np.maximum(m2, 0.0) / (count - 1)) / math.sqrt(count)
    if blow is not None:
        mean = np.where(np.arange(grid.n + 1) >= blow, np.inf, mean)
        se = np.where(np.arange(grid.n + 1) >= blow, np.inf, se)
    return McEstimate(
        FunctionTable(grid, 0, mean),
        FunctionTable(grid, 0, se),
        cfg.paths,
        cfg.seed,
        exploded=blow is not None,
        blowup_time=None if blow is None else blow * grid.h,
    )


def compare(est, sol, checkpoints, kappa=5.0, z_max=4.0):
    """z-scores ``|mc - EX2| / (se + kappa*h*EX2)`` at the checkpoints; PASS when all are ``<= z_max``."""
    grid = sol.grid
    if est.grid.h != grid.h or est.grid.n != grid.n:
        raise ValueError("Monte Carlo estimate and Volterra solution live on different grids")
    rows = []
    for t in checkpoints:
        k = grid.index(t, "checkpoint")
        mc = float(est.mean_sq.values[k])
        vol = float(sol.EX2.values[k])
        se = float(est.std_err.values[k])
        allow = kappa * grid.h * abs(vol)
        diff = abs(mc - vol)
        scale = se + allow
        if not math.isfinite(diff):
            z = math.inf
        elif scale > 0:
            z = diff / scale
        else:
            z = 0.0 if diff == 0.0 else math.inf
        rows.append(CompareRow(float(t), mc, vol, se, allow, z))
    passed = all(r.z <= z_max for r in rows)
    return CompareReport(tuple(rows), passed, est.paths < LOW_POWER_PATHS, z_max)
