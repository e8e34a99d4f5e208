import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from builders import instance, scalar
from msfde.grid import FunctionTable
from msfde.kernels import diffusion_kernel, renewal_rho
from msfde.measures import FiniteSignedMeasure
from msfde.resolvent import solve_resolvent
from msfde.volterra_ms import consistency_check, forcing_gamma, mean_square, solve_Z
from oracles import additive_mean_square, scalar_mean_square


def _x(inst):
    return mean_square(inst).x


def test_gamma_examples():
    inst = instance(1e-3, 4.0, ((0.0, -1.0),), (), g=0.0, psi=1.0)
    r = solve_resolvent(inst.nu, inst.grid)
    assert np.all(forcing_gamma(inst, r, _x(inst)).values == 0.0)
    inst = instance(1e-3, 4.0, ((0.0, -1.0),), (), g=1.0, psi=0.0)
    gam = forcing_gamma(inst, r, _x(inst)).values
    t = inst.grid.t
    assert np.max(np.abs(gam - (1 - np.exp(-2 * t)) / 2)) < 1e-6
    inst = scalar(T=4.0)
    gam = forcing_gamma(inst, r, _x(inst)).values
    assert np.max(np.abs(gam - t * np.exp(-2 * t))) < 1e-6


def test_gamma_reads_history_through_lagged_mu():
    # G(x_t) = x(t-1) reads psi on [0, 1]; with g = 0 and psi = 1, gamma(t) = int_0^t r^2(t-s) ds there
    inst = instance(1e-3, 2.0, ((0.0, -1.0),), ((-1.0, 1.0),), psi=1.0)
    r = solve_resolvent(inst.nu, inst.grid)
    gam = forcing_gamma(inst, r, _x(inst))
    k = inst.grid.index(0.5)
    assert gam.values[k] == pytest.approx((1 - np.exp(-1.0)) / 2, abs=1e-6)


def test_solve_Z_examples():
    inst = scalar(T=5.0)
    r = solve_resolvent(inst.nu, inst.grid)
    k = diffusion_kernel(inst.mu, r)
    grid = inst.grid
    assert np.all(solve_Z(FunctionTable(grid, 0, np.zeros(grid.n + 1)), k).values == 0.0)
    sol = mean_square(inst)
    t = grid.t
    assert np.max(np.abs(sol.Z.values - (np.exp(-t) - np.exp(-2 * t)))) < 1e-6


def test_mean_square_examples():
    sol = mean_square(scalar(T=5.0))
    assert sol.EX2.at(2000) == pytest.approx(0.13534, abs=1e-5)
    assert not sol.used_mu_zero_path
    inst = instance(1e-3, 8.0, ((0.0, -1.0),), (), g=1.5, psi=0.0)
    sol = mean_square(inst)
    assert sol.used_mu_zero_path
    assert np.max(np.abs(sol.EX2.values - additive_mean_square(inst.grid.t, c0=1.5))) < 1e-6
    assert np.all(mean_square(scalar(T=2.0, psi=0.0)).EX2.values == 0.0)


def test_invariants_on_mixed_instance():
    inst = instance(
        0.01, 12.0,
        ((0.0, -1.2), (-0.5, -0.3)), ((0.0, 0.4), (-1.0, 0.3)),
        f=lambda t: np.sin(2 * t) * np.exp(-0.2 * t), g=lambda t: 0.3 * np.exp(-t), psi=np.cos,
        mu_density=((-0.6, -0.2, 0.5),),
    )
    sol = mean_square(inst)
    x = sol.x.values[inst.grid.n_tau:]
    assert np.array_equal(sol.EX2.values, x ** 2 + sol.Z.values)
    for tab in (sol.Z, sol.gamma, sol.EY2):
        assert np.all(tab.values >= 0)
    assert np.all(sol.EX2.values >= x ** 2)
    rep = consistency_check(sol, sol.resolvent, renewal_rho(sol.kernel))
    assert rep.passed, rep.describe()


def test_mu_zero_fast_path_equals_general_path(monkeypatch):
    import msfde.volterra_ms as vm

    inst = instance(0.01, 6.0, ((0.0, -1.0), (-0.3, -0.2)), (), g=lambda t: np.cos(t), psi=0.5)
    fast = mean_square(inst)
    monkeypatch.setattr(vm, "total_variation", lambda m: 1.0)
    slow = mean_square(inst)
    assert not slow.used_mu_zero_path
    assert np.max(np.abs(fast.EX2.values - slow.EX2.values)) <= 1e-12


def test_consistency_examples():
    sol = mean_square(scalar(h=0.01, T=6.0))
    rep = consistency_check(sol, sol.resolvent, renewal_rho(sol.kernel))
    assert rep.passed and rep.dev_rho_route < 20 * 1e-4
    inst = instance(0.01, 4.0, ((0.0, -1.0),), ((0.0, 0.5),), psi=0.0)
    sol = mean_square(inst)
    rep = consistency_check(sol, sol.resolvent, renewal_rho(sol.kernel))
    assert rep.dev_rho_route == 0.0 and rep.dev_ey2_route == 0.0


def test_vanishing_diffusion_of_x_flagged():
    # mu = delta_0 - delta_{-1} applied to a constant solution vanishes identically
    inst = instance(0.01, 3.0, (), ((0.0, 1.0), (-1.0, -1.0)), psi=1.0)
    sol = mean_square(inst)
    assert sol.G_x_vanishes


def test_step_halving_order_two():
    errs = []
    for h in (0.02, 0.01, 0.005):
        inst = scalar(h=h, T=5.0)
        errs.append(np.max(np.abs(mean_square(inst).EX2.values - scalar_mean_square(inst.grid.t))))
    assert 3.5 < errs[0] / errs[1] < 4.5 and 3.5 < errs[1] / errs[2] < 4.5


@settings(max_examples=10, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(s=st.floats(1.0, 5.0), g0=st.floats(0.1, 2.0))
def test_gamma_scales_with_g_when_mu_zero(s, g0):
    base = instance(0.02, 4.0, ((0.0, -1.0),), (), g=lambda t: g0 * np.exp(-t), psi=0.0)
    big = instance(0.02, 4.0, ((0.0, -1.0),), (), g=lambda t: s * g0 * np.exp(-t), psi=0.0)
    a, b = mean_square(base).gamma.values, mean_square(big).gamma.values
    assert np.all(b >= a)
    assert np.allclose(b, s * s * a, rtol=1e-12, atol=0)


def test_instance_validation():
    inst = scalar(h=0.01, T=2.0)
    with pytest.raises(ValueError):
        inst.with_forcing(f=FunctionTable(inst.grid, 0, np.zeros(5)))
    from msfde.errors import GridAlignmentError
    from msfde.volterra_ms import ProblemInstance

    with pytest.raises(GridAlignmentError):
        ProblemInstance(FiniteSignedMeasure(1.0, ((-0.005, 1.0),)), inst.mu, inst.f, inst.g, inst.psi, inst.grid)
