"""Finite signed measures on ``[-tau, 0]`` built from atoms and a piecewise-constant density."""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, GridAlignmentError
from .grid import FunctionTable, steps_of

_LOC_TOL = 1e-12


@dataclass(frozen=True)
class FiniteSignedMeasure:
    """Signed measure ``sum_i w_i delta_{s_i} + d(s) ds`` on ``[-tau, 0]``.

    Parameters
    ----------
    tau : float
        Length of the delay window.
    atoms : sequence of (location, weight)
        Point masses; locations lie in ``[-tau, 0]``.
    density : sequence of (left, right, value)
        Constant density ``value`` on ``[left, right]``. Overlapping pieces add.
    """

    tau: float
    atoms: tuple = ()
    density: tuple = ()

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError(f"tau must be positive, got {self.tau!r}")
        atoms = tuple((float(s), float(w)) for s, w in self.atoms)
        density = tuple((float(a), float(b), float(v)) for a, b, v in self.density)
        tol = _LOC_TOL * max(1.0, self.tau)
        for s, _ in atoms:
            if s > tol or s < -self.tau - tol:
                raise ValueError(f"atom location {s} outside [-{self.tau}, 0]")
        for a, b, _ in density:
            if not a < b or a < -self.tau - tol or b > tol:
                raise ValueError(f"density piece [{a}, {b}] is not a sub-interval of [-{self.tau}, 0]")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "density", density)

    @classmethod
    def zero(cls, tau):
        return cls(tau)

    @classmethod
    def dirac(cls, tau, location=0.0, weight=1.0):
        return cls(tau, atoms=((location, weight),))

    def scaled(self, c):
        return FiniteSignedMeasure(
            self.tau,
            tuple((s, c * w) for s, w in self.atoms),
            tuple((a, b, c * v) for a, b, v in self.density),
        )

    @property
    def is_zero(self):
        return total_variation(self) == 0.0

    def total_mass(self):
        return sum(w for _, w in self.atoms) + sum(v * (b - a) for a, b, v in self.density)

    def check_grid(self, grid):
        if abs(self.tau - grid.tau) > _LOC_TOL * max(1.0, grid.tau):
            raise GridAlignmentError(f"measure tau={self.tau} differs from grid tau={grid.tau}")
        for s, _ in self.atoms:
            steps_of(-s, grid.h, f"lag of the atom at {s}")
        for a, b, _ in self.density:
            steps_of(-a, grid.h, f"lag of the density edge {a}")
            steps_of(-b, grid.h, f"lag of the density edge {b}")

    def lag_weights(self, grid):
        """Discretize on ``grid``; see :class:`LagWeights`."""
        self.check_grid(grid)
        m = grid.n_tau
        atoms = {}
        for s, w in self.atoms:
            j = steps_of(-s, grid.h)
            atoms[j] = atoms.get(j, 0.0) + w
        dens = np.zeros(m)
        for a, b, v in self.density:
            jb, ja = steps_of(-b, grid.h), steps_of(-a, grid.h)
            dens[jb:ja] += v
        lags = np.array(sorted(j for j, w in atoms.items() if w != 0.0), dtype=int)
        weights = np.array([atoms[j] for j in lags], dtype=float)
        return LagWeights(grid.h, m, lags, weights, dens)


@dataclass(frozen=True, eq=False)
class LagWeights:
    """A measure discretized on a grid of step ``h``.

    ``lags[i]`` (in steps) carries atom weight ``weights[i]``; ``density[i]``
    is the density on the lag sub-interval ``[i*h, (i+1)*h]``, i.e. on
    ``s in [-(i+1)h, -ih]``. The density part is integrated by the trapezoid
    rule with one-sided limits of the integrand on each sub-interval.
    """

    h: float
    n_tau: int
    lags: np.ndarray
    weights: np.ndarray
    density: np.ndarray

    @property
    def has_density(self):
        return bool(np.any(self.density != 0.0))

    @property
    def weight_at_zero(self):
        """Coefficient multiplying ``y(t)`` itself: atom at 0 plus the density's first node."""
        w0 = float(self.weights[self.lags == 0].sum()) if len(self.lags) else 0.0
        d0 = 0.5 * self.h * self.density[0] if self.n_tau else 0.0
        return w0 + d0

    def apply(self, plus, minus, offset, ks):
        """Right and left limits of ``int y(t_k + s) m(ds)`` for each ``k`` in ``ks``.

        ``plus``/``minus`` hold limits of ``y`` with ``plus[k + offset]`` at
        node ``k``; all nodes ``k - n_tau - 1 .. k`` must be present.
        """
        ks = np.asarray(ks, dtype=int)
        idx = ks + offset
        if len(ks) and (idx.min() - self.n_tau - 1 < 0 or idx.max() >= len(plus)):
            raise DomainError("measure window leaves the supplied table")
        lp = np.zeros(len(ks))
        lm = np.zeros(len(ks))
        for j, w in zip(self.lags, self.weights):
            lp += w * plus[idx - j]
            lm += w * minus[idx - j]
        if self.has_density:
            # sum_i d_i * (minus[k-i] + plus[k-i-1]) via full convolutions
            cm = np.convolve(minus, self.density)
            cp = np.convolve(plus, self.density)
            dens = 0.5 * self.h * (cm[idx] + cp[idx - 1])
            lp += dens
            lm += dens
        return lp, lm


def total_variation(m):
    return sum(abs(w) for _, w in m.atoms) + sum(abs(v) * (b - a) for a, b, v in m.density)


def measure_transform(m, lam):
    """``int exp(lam*s) m(ds)`` with exact integration of the density pieces."""
    out = sum(w * math.exp(lam * s) for s, w in m.atoms)
    for a, b, v in m.density:
        if lam == 0.0:
            out += v * (b - a)
        else:
            out += v * (math.exp(lam * b) - math.exp(lam * a)) / lam
    return out


def functional_table(m, f, lo=0):
    """Apply ``y -> int y(t+s) m(ds)`` to table ``f`` at every node from ``lo`` to its end.

    ``f`` is extended by zero below its domain. Returns a table carrying left
    limits whenever the result has jumps.
    """
    grid = f.grid
    lw = m.lag_weights(grid)
    base = lo - lw.n_tau - 1
    plus, minus = f.extended(base, f.stop_index)
    ks = np.arange(lo, f.stop_index + 1)
    lp, lm = lw.apply(plus, minus, -base, ks)
    left = None if np.array_equal(lp, lm) else lm
    return FunctionTable(grid, lo, lp, left)


def convolve_measure(m, f, t_index):
    """``(f * m)(t) = int f(t+s) m(ds)`` at node ``t_index`` (right limit)."""
    if t_index > f.stop_index:
        raise DomainError(f"node {t_index} beyond table end {f.stop_index}")
    lw = m.lag_weights(f.grid)
    base = t_index - lw.n_tau - 1
    plus, minus = f.extended(base, t_index)
    lp, _ = lw.apply(plus, minus, -base, [t_index])
    return float(lp[0])
