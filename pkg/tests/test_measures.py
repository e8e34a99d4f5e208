import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from builders import table
from msfde.errors import DomainError, GridAlignmentError
from msfde.grid import FunctionTable, Grid
from msfde.measures import (
    FiniteSignedMeasure,
    convolve_measure,
    functional_table,
    measure_transform,
    total_variation,
)

TAU = 1.0
GRID = Grid(0.01, 3.0, TAU)


@pytest.mark.parametrize(
    "atoms, expected",
    [(((0.0, -1.0),), 1.0), ((), 0.0), (((0.0, -1.0), (-1.0, 0.5)), 1.5)],
)
def test_total_variation(atoms, expected):
    assert total_variation(FiniteSignedMeasure(TAU, atoms)) == expected


def test_total_variation_density():
    m = FiniteSignedMeasure(TAU, density=((-1.0, -0.5, -2.0), (-0.5, 0.0, 1.0)))
    assert total_variation(m) == pytest.approx(1.5)
    assert m.total_mass() == pytest.approx(-0.5)


def test_measure_transform_examples():
    assert measure_transform(FiniteSignedMeasure(TAU, ((0.0, -2.5),)), 3.7) == -2.5
    assert measure_transform(FiniteSignedMeasure(TAU, ((-1.0, -0.7),)), 0.0) == -0.7
    assert measure_transform(FiniteSignedMeasure(TAU, ((-1.0, -1.0),)), 1.0) == pytest.approx(-math.exp(-1.0))


def test_measure_transform_density_exact():
    m = FiniteSignedMeasure(TAU, density=((-1.0, 0.0, 2.0),))
    assert measure_transform(m, 1.5) == pytest.approx(2.0 * (1 - math.exp(-1.5)) / 1.5)
    assert measure_transform(m, 0.0) == pytest.approx(m.total_mass())


def test_atoms_outside_window_rejected():
    with pytest.raises(ValueError):
        FiniteSignedMeasure(TAU, ((0.5, 1.0),))
    with pytest.raises(ValueError):
        FiniteSignedMeasure(TAU, ((-1.5, 1.0),))
    with pytest.raises(GridAlignmentError):
        FiniteSignedMeasure(TAU, ((-0.005, 1.0),)).check_grid(GRID)


def test_convolve_examples():
    f = table(GRID, np.sin)
    k = GRID.index(1.3)
    assert convolve_measure(FiniteSignedMeasure.dirac(TAU, 0.0, 1.0), f, k) == pytest.approx(math.sin(1.3))
    r = FunctionTable(GRID, 0, np.where(GRID.t <= 1.0, 1.0, 0.0))
    assert convolve_measure(FiniteSignedMeasure(TAU, ((-1.0, -1.0),)), r, GRID.index(1.0)) == -1.0
    assert convolve_measure(FiniteSignedMeasure.zero(TAU), f, k) == 0.0


def test_convolve_beyond_table():
    f = FunctionTable(GRID, 0, np.ones(11))
    with pytest.raises(DomainError):
        convolve_measure(FiniteSignedMeasure.dirac(TAU), f, 20)


def test_density_convolution_second_order():
    m = FiniteSignedMeasure(TAU, density=((-1.0, -0.25, 1.5),))
    exact = 1.5 * (math.cos(2.0 - 1.0) - math.cos(2.0 - 0.25))  # int_{-1}^{-1/4} sin(2+s) ds
    errs = []
    for h in (0.05, 0.025, 0.0125):
        g = Grid(h, 3.0, TAU)
        errs.append(abs(convolve_measure(m, table(g, np.sin), g.index(2.0)) - exact))
    assert 3.8 < errs[0] / errs[1] < 4.2


def test_functional_table_records_jumps():
    # lagged atom applied to a function that jumps at 0 produces a jump at the lag
    r = FunctionTable(GRID, 0, np.ones(GRID.n + 1), np.r_[0.0, np.ones(GRID.n)])
    G = functional_table(FiniteSignedMeasure(TAU, ((-0.5, 2.0),)), r)
    k = GRID.index(0.5)
    assert G.values[k] == 2.0 and G.left_values[k] == 0.0
    assert G.values[k - 1] == 0.0


@settings(max_examples=30, deadline=None)
@given(
    w=st.lists(st.floats(-3, 3), min_size=1, max_size=4),
    lags=st.lists(st.integers(0, 100), min_size=4, max_size=4),
    d=st.floats(-2, 2),
    a=st.floats(-5, 5),
    b=st.floats(-5, 5),
    k=st.integers(100, 300),
)
def test_linearity_and_fundamental_bound(w, lags, d, a, b, k):
    atoms = tuple((-lags[i] * GRID.h, w[i]) for i in range(len(w)))
    m = FiniteSignedMeasure(TAU, atoms, ((-0.5, -0.2, d),))
    f = table(GRID, lambda t: np.sin(3 * t))
    g = table(GRID, lambda t: np.exp(-t))
    comb = FunctionTable(GRID, 0, a * f.values + b * g.values)
    lhs = convolve_measure(m, comb, k)
    rhs = a * convolve_measure(m, f, k) + b * convolve_measure(m, g, k)
    assert lhs == pytest.approx(rhs, abs=1e-12 * (1 + abs(lhs)))
    window = f.values[k - GRID.n_tau: k + 1]
    assert abs(convolve_measure(m, f, k)) <= total_variation(m) * np.max(np.abs(window)) + 1e-12
