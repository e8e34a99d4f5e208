"""End-to-end acceptance checks at their stated tolerances.

Each test records the measured quantities; ``conftest.py`` prints one
PASS/FAIL line per criterion at the end of the run.
"""

import filecmp
import math
import time

import numpy as np
import pytest

from builders import instance, scalar
from msfde import cli
from msfde.grid import Grid
from msfde.kernels import critical_rate, diffusion_kernel, exp_weighted_rho_integral, renewal_rho
from msfde.measures import FiniteSignedMeasure
from msfde.montecarlo import McConfig, compare, simulate
from msfde.perturb import (
    ForcingSpec,
    Verdict,
    check_thm2_conditions,
    check_thm3_conditions,
    classify,
    envelope_rate,
    sectional_average,
    spike_schedule,
)
from msfde.resolvent import solve_resolvent
from msfde.volterra_ms import consistency_check, mean_square
from oracles import chirp_window, pure_delay_resolvent, scalar_mean_square, scalar_rho


def test_criterion_01_scalar_closed_form(record_property):
    inst = scalar(h=1e-3, T=5.0)
    t0 = time.perf_counter()
    sol = mean_square(inst)
    elapsed = time.perf_counter() - t0
    exact = scalar_mean_square(inst.grid.t)
    err = float(np.max(np.abs(sol.EX2.values - exact) / exact))
    record_property("max_rel_err", f"{err:.2e}")
    record_property("seconds", f"{elapsed:.2f}")
    assert err < 1e-3
    assert elapsed < 30.0


def test_criterion_02_renewal_resolvent(record_property):
    inst = scalar(h=1e-3, T=5.0)
    r = solve_resolvent(inst.nu, inst.grid)
    k = diffusion_kernel(inst.mu, r)
    rho = renewal_rho(k)
    exact = scalar_rho(inst.grid.t)
    rel = float(np.max(np.abs(rho.rho.values - exact) / exact))
    alpha = critical_rate(k)
    total = exp_weighted_rho_integral(rho, 0.0)
    record_property("rho_rel_err", f"{rel:.2e}")
    record_property("alpha_prime", f"{alpha:.6f}")
    record_property("G_l2_sq", f"{k.l2_norm_sq:.6f}")
    record_property("int_rho", f"{total:.6f}")
    record_property("int_rho_truncated", f"{rho.l1_norm_truncated:.6f}")
    assert rel < 1e-3
    assert abs(alpha - 0.5) <= 1e-3
    assert abs(k.l2_norm_sq - 0.5) <= 1e-3
    assert abs(total - 1.0) <= 1e-2
    assert abs(rho.l1_norm_truncated - 1.0) <= 1e-2


def test_criterion_03_pure_delay_resolvent(record_property):
    grid = Grid(1e-3, 3.0, 1.0)
    r = solve_resolvent(FiniteSignedMeasure(1.0, ((-1.0, -1.0),)), grid)
    got = [r.r.at(grid.index(t)) for t in (1.0, 2.0, 3.0)]
    want = [1.0, 0.0, -0.5]
    err = max(abs(a - b) for a, b in zip(got, want))
    whole = float(np.max(np.abs(r.values - pure_delay_resolvent(grid.t))))
    record_property("r(1),r(2),r(3)", ", ".join(f"{v:.6f}" for v in got))
    record_property("max_abs_err_on_[0,3]", f"{whole:.2e}")
    assert err <= 5e-3
    assert whole <= 5e-3


def _random_instance(rng, h=0.01, T=20.0):
    tau = 1.0
    while True:
        lags = rng.choice(np.arange(0, 101), size=rng.integers(1, 4), replace=False) * h
        nu_atoms = tuple((-float(s), float(rng.uniform(-2.0, 0.0))) for s in lags)
        nu = FiniteSignedMeasure(tau, nu_atoms)
        grid = Grid(h, T, tau)
        r = solve_resolvent(nu, grid)
        if r.fit is not None and r.fitted_decay_rate < -0.05:
            break
    r_l2 = diffusion_kernel(FiniteSignedMeasure.dirac(tau, 0.0, 1.0), r).l2_norm_sq
    c = float(rng.uniform(0.1, 0.9)) / math.sqrt(r_l2)
    psi_rate = float(rng.uniform(-1.0, 1.0))
    g_scale = float(rng.uniform(0.0, 1.0))
    inst = instance(
        h, T, nu_atoms, ((0.0, c),),
        f=lambda t: np.exp(-t) * np.cos(3 * t),
        g=lambda t: g_scale * np.exp(-0.5 * t),
        psi=lambda t: np.exp(psi_rate * t),
        tau=tau,
    )
    return inst, r, c


def test_criterion_04_representation_equivalence(record_property):
    rng = np.random.default_rng(20241016)
    worst = 0.0
    for _ in range(5):
        inst, r, c = _random_instance(rng)
        k = diffusion_kernel(inst.mu, r)
        assert k.l2_norm_sq < 1.0
        sol = mean_square(inst, r, k)
        rep = consistency_check(sol, r, renewal_rho(k))
        worst = max(worst, max(rep.dev_rho_route, rep.dev_ey2_route) / rep.tolerance)
        assert rep.passed, rep.describe()
    record_property("worst_dev_over_tol", f"{worst:.3f}")


def test_criterion_05_monte_carlo(record_property):
    inst = scalar(h=1e-2, T=5.0)
    t0 = time.perf_counter()
    est = simulate(inst, McConfig(paths=10_000, seed=12345))
    elapsed = time.perf_counter() - t0
    rep = compare(est, mean_square(inst), [0.5, 1.0, 2.0, 5.0])
    record_property("z", ", ".join(f"{r.z:.2f}" for r in rep.rows))
    record_property("seconds", f"{elapsed:.1f}")
    assert rep.passed
    assert not rep.low_power
    assert elapsed < 60.0


def test_criterion_06_mu_zero_saturation(record_property):
    inst = instance(1e-3, 10.0, ((0.0, -1.0),), (), g=1.0, psi=0.0)
    sol = mean_square(inst)
    assert sol.used_mu_zero_path
    ex2 = sol.EX2.at(inst.grid.index(5.0))
    r = sol.resolvent
    rep = classify(inst, r, sol.kernel)
    record_property("EX2(5)", f"{ex2:.6f}")
    record_property("thm2_iv", str(rep.theorem2.cond_iv.verdict))
    assert abs(ex2 - 0.5) <= 1e-3
    assert rep.theorem2.cond_iv.verdict is Verdict.FAIL
    assert rep.theorem2.overall is Verdict.FAIL


@pytest.fixture(scope="module")
def chirp_grid():
    return Grid(2.0 ** -17, 12.0, 1.0)


def test_criterion_07_chirp(record_property, chirp_grid):
    alpha, beta = 0.5, 1.0
    f = ForcingSpec.chirp(alpha, beta).sample(chirp_grid)
    signed = sectional_average(f, 1.0)
    absolute = sectional_average(f.map(np.abs), 1.0)
    # validate the sampled windows against the oracle
    probe = np.arange(1.0, 11.01, 0.5)
    idx = [chirp_grid.index(t) for t in probe]
    ref_s = np.array([chirp_window(alpha, beta, t, 1.0) for t in probe])
    ref_a = np.array([chirp_window(alpha, beta, t, 1.0, absolute=True) for t in probe])
    env = np.exp(-(beta - alpha) * probe)
    err_s = float(np.max(np.abs(signed.values[idx] - ref_s) / env))
    err_a = float(np.max(np.abs(absolute.values[idx] - ref_a) / ref_a))
    record_property("window_err_vs_oracle", f"signed {err_s:.1e} of envelope, abs {err_a:.1e} relative")
    # near T the check grid has about five nodes per oscillation, hence percent-level trapezoid error
    assert err_s < 5e-2 and err_a < 1e-3
    rate_s = -envelope_rate(signed.t, signed.values, 2.0, 11.0)
    rate_a = envelope_rate(absolute.t, absolute.values, 2.0, 11.0)
    # oracle-side rates on a dense probe
    dense = np.arange(2.0, 11.0, 0.05)
    oracle_rate = -envelope_rate(dense, [chirp_window(alpha, beta, t, 1.0) for t in dense], 2.0, 11.0)
    g = ForcingSpec.exp_decay(1.0, 1.0).sample(chirp_grid)
    t3 = check_thm3_conditions(f, g, chirp_grid, [0.1, 0.2, 0.3, 0.4, 0.6, 0.8])
    passing = [b for b, res in t3["f_by_beta"].items() if res.verdict is Verdict.PASS]
    record_property("signed_decay_rate", f"{rate_s:.3f}")
    record_property("oracle_decay_rate", f"{oracle_rate:.3f}")
    record_property("abs_growth_rate", f"{rate_a:.3f}")
    record_property("thm3_passing_eta", passing)
    assert rate_s >= 0.4
    assert oracle_rate >= 0.4
    assert rate_a >= 0.4
    assert any(0.0 < b < 0.5 for b in passing)


def test_criterion_08_spikes(record_property):
    grid = Grid(1e-4, 24.0, 1.0)
    sched = spike_schedule(2, 23, height_exp=1.0, area_exp=1.0)
    f = ForcingSpec.spikes(sched).sample(grid)
    sups = {n: float(f.values[grid.index(n): grid.index(n + 1) + 1].max()) for n in sched}
    areas_ok = all(abs((0.5 - a) * hn - 1.0 / n) < 1e-12 for n, (a, hn) in sched.items())
    zero = ForcingSpec.zero().sample(grid)
    res = check_thm2_conditions(f, zero, grid)
    record_property("sup_on_[23,24]", f"{sups[23]:.6f}")
    record_property("thm2_iii", str(res["iii"].verdict))
    assert areas_ok
    assert all(abs(s - n) < 1e-9 for n, s in sups.items())
    assert res["iii"].verdict is Verdict.PASS


def test_criterion_09_order_two(record_property):
    errs = []
    for h in (0.02, 0.01, 0.005, 0.0025):
        inst = scalar(h=h, T=5.0)
        sol = mean_square(inst)
        errs.append(float(np.max(np.abs(sol.EX2.values - scalar_mean_square(inst.grid.t)))))
    ratios = [a / b for a, b in zip(errs, errs[1:])]
    record_property("ratios", ", ".join(f"{q:.4f}" for q in ratios))
    assert all(3.5 <= q <= 4.5 for q in ratios)


def test_criterion_10_determinism(record_property, tmp_path):
    checked = 0
    for name in cli.DEMOS:
        a, b = tmp_path / f"{name}-a", tmp_path / f"{name}-b"
        assert cli.main(["demo", name, "--out", str(a)]) == 0
        assert cli.main(["demo", name, "--out", str(b)]) == 0
        files = sorted(p.name for p in a.iterdir())
        assert files == sorted(p.name for p in b.iterdir())
        match, mismatch, errors = filecmp.cmpfiles(a, b, files, shallow=False)
        assert not mismatch and not errors
        checked += sum(f.endswith(".csv") for f in match)
    record_property("identical_csv_files", checked)
