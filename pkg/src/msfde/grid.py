"""Uniform time mesh and sampled functions living on it."""

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, GridAlignmentError

_ALIGN_RTOL = 1e-9


def steps_of(length, h, name="value"):
    """Return ``length / h`` as an int, raising if it is not integral."""
    q = length / h
    k = int(round(q))
    if abs(q - k) > _ALIGN_RTOL * max(1.0, abs(q)):
        raise GridAlignmentError(f"{name}={length!r} is not an integer multiple of h={h!r}")
    return k


@dataclass(frozen=True)
class Grid:
    """Uniform mesh ``t_k = k*h`` on ``[-tau, T]``.

    Both ``tau/h`` and ``T/h`` must be integers.
    """

    h: float
    T: float
    tau: float
    n: int = field(init=False, repr=False)
    n_tau: int = field(init=False, repr=False)

    def __post_init__(self):
        if not self.h > 0:
            raise GridAlignmentError(f"h must be positive, got {self.h!r}")
        if not self.tau > 0:
            raise GridAlignmentError(f"tau must be positive, got {self.tau!r}")
        if not self.T > 0:
            raise GridAlignmentError(f"T must be positive, got {self.T!r}")
        object.__setattr__(self, "n", steps_of(self.T, self.h, "T"))
        object.__setattr__(self, "n_tau", steps_of(self.tau, self.h, "tau"))

    @property
    def t(self):
        """Nodes of ``[0, T]``."""
        return np.arange(self.n + 1) * self.h

    @property
    def t_history(self):
        """Nodes of ``[-tau, 0]``."""
        return np.arange(-self.n_tau, 1) * self.h

    def index(self, time, name="time"):
        return steps_of(time, self.h, name)

    def refined(self, h):
        """Same horizon and delay on a different step."""
        return Grid(h=h, T=self.T, tau=self.tau)


@dataclass(frozen=True, eq=False)
class FunctionTable:
    """A real function sampled at grid nodes ``start_index .. start_index+len-1``.

    ``values`` are right limits. ``left`` optionally stores left limits for
    functions with jumps at nodes (e.g. the resolvent at 0, or kernels whose
    measure has lagged atoms); ``None`` means the function is continuous there.
    Outside the domain the function is extended by zero for indices below the
    start; evaluating beyond the end raises :class:`DomainError`.
    """

    grid: Grid
    start_index: int
    values: np.ndarray
    left: np.ndarray = None

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        if self.left is not None:
            lv = np.array(self.left, dtype=float)
            if lv.shape != v.shape:
                raise ValueError("left limits must match values in shape")
            lv.setflags(write=False)
            object.__setattr__(self, "left", lv)
        if self.stop_index > self.grid.n:
            raise DomainError("table extends beyond the grid horizon")
        if self.start_index < -self.grid.n_tau:
            raise DomainError("table starts before -tau")

    @classmethod
    def on_horizon(cls, grid, values, left=None):
        """Table on ``[0, T]``."""
        return cls(grid, 0, values, left)

    @classmethod
    def from_function(cls, grid, func, start_index=0):
        k = np.arange(start_index, grid.n + 1)
        return cls(grid, start_index, np.asarray(func(k * grid.h), dtype=float) * np.ones(len(k)))

    def __len__(self):
        return len(self.values)

    @property
    def stop_index(self):
        """Index of the last node (inclusive)."""
        return self.start_index + len(self.values) - 1

    @property
    def t(self):
        return np.arange(self.start_index, self.stop_index + 1) * self.grid.h

    @property
    def left_values(self):
        return self.values if self.left is None else self.left

    @property
    def has_jumps(self):
        return self.left is not None and not np.array_equal(self.left, self.values)

    def at(self, k):
        """Right-limit value at node ``k`` (zero below the domain)."""
        if k > self.stop_index:
            raise DomainError(f"node {k} beyond table end {self.stop_index}")
        if k < self.start_index:
            return 0.0
        return float(self.values[k - self.start_index])

    def extended(self, lo, hi):
        """Right and left limits on nodes ``lo..hi`` under the zero extension.

        The left limit at ``start_index`` is 0 because the function is zero
        just below its domain.
        """
        if hi > self.stop_index:
            raise DomainError(f"node {hi} beyond table end {self.stop_index}")
        size = hi - lo + 1
        plus = np.zeros(size)
        minus = np.zeros(size)
        a = max(lo, self.start_index)
        if a <= hi:
            src = slice(a - self.start_index, hi - self.start_index + 1)
            dst = slice(a - lo, hi - lo + 1)
            plus[dst] = self.values[src]
            minus[dst] = self.left_values[src]
            if a == self.start_index:
                minus[a - lo] = 0.0
        return plus, minus

    def restrict(self, lo, hi=None):
        """Sub-table on nodes ``lo..hi``."""
        hi = self.stop_index if hi is None else hi
        if lo < self.start_index or hi > self.stop_index:
            raise DomainError("restriction outside table domain")
        s = slice(lo - self.start_index, hi - self.start_index + 1)
        left = None if self.left is None else self.left[s]
        return FunctionTable(self.grid, lo, self.values[s], left)

    def map(self, func):
        left = None if self.left is None else func(self.left)
        return FunctionTable(self.grid, self.start_index, func(self.values), left)
