"""Acceptance criteria 1-11, one PASS/FAIL line each.

Run under pytest (lines appear in the terminal summary) or directly:
``python tests/test_acceptance.py``.
"""
import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import GOLDEN_PATH, setup_for  # noqa: E402
from ptsusy import cli, critical_coupling, make_problem, solve_spectrum  # noqa: E402
from ptsusy.core import eval_vplus  # noqa: E402
from ptsusy.oracle import Grid, fd_spectrum, load_goldens, ode_residual, vplus_sampler  # noqa: E402
from ptsusy.partner import excited_state_plus, partner_eigenfunction  # noqa: E402
from ptsusy.susy import (constraint_residuals, partner_potential, potential_jumps,  # noqa: E402
                         riccati_residual, safe_grid, superpotential, vplus_jumps,
                         zero_mode_residual)
from ptsusy.verify import limit_deviation  # noqa: E402

RESULTS: dict[int, str] = {}


def record(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[n] = line
    print(line)
    assert ok, line


def interior(p, n=1000):
    x = np.linspace(-p.L * (1 - 1e-4), p.L * (1 - 1e-4), n)
    return x[np.all([np.abs(x - b) > 1e-9 for b in p.breakpoints], axis=0)]


def test_criterion_01_hermitian_limit():
    t0 = time.perf_counter()
    worst = 0.0
    for l in (0.1, 0.25, 0.5, 0.75, 0.9):
        E = solve_spectrum(make_problem(1.0, l, 0.0), 8).energies
        exact = np.array([((n + 1) * math.pi / 2) ** 2 for n in range(8)])
        worst = max(worst, float(np.max(np.abs(E - exact))))
    dt = time.perf_counter() - t0
    record(1, worst < 1e-8 and dt / 5 < 1.0,
           f"max |E_n - ((n+1)pi/2L)^2| = {worst:.2e} over 5 widths, n < 8; {dt / 5:.3f} s each")


def test_criterion_02_oracle_agreement():
    t0 = time.perf_counter()
    worst = 0.0
    for L, l, g in ((1.0, 0.5, 1.0), (1.0, 0.5, 2.0), (1.0, 0.25, 2.0)):
        p = make_problem(L, l, g)
        E = solve_spectrum(p, 3).energies
        ora = fd_spectrum(vplus_sampler(p), p, 2000, 3, extrapolate=True).eigenvalues
        worst = max(worst, float(np.max(np.abs(E - ora) / np.abs(ora))))
    dt = time.perf_counter() - t0
    record(2, worst < 1e-5 and dt < 120,
           f"max relative deviation from FD (N=2000/4000, Richardson) = {worst:.2e}; {dt:.1f} s")


def test_criterion_03_zero_mode():
    s = setup_for(1.0, 0.5, 2.0)
    x = interior(s.p)
    r = zero_mode_residual(s.fac, s.gs, x) / np.max(np.abs(s.gs.psi(x)))
    record(3, r < 1e-9, f"max |(d/dx + W) psi0| / max |psi0| = {r:.2e}")


def test_criterion_04_riccati_pair():
    s = setup_for(1.0, 0.5, 2.0)
    x = safe_grid(s.p, 2000, 0.05, 1e-4)
    rp = float(np.max(riccati_residual(s.fac, +1, x)))
    rm = float(np.max(riccati_residual(s.fac, -1, x)))
    record(4, rp < 1e-6 and rm < 1e-6, f"V+ residual {rp:.2e}, V- residual {rm:.2e} (h = 1e-5)")


def test_criterion_05_jump_algebra():
    s = setup_for(1.0, 0.5, 2.0)
    jm, jp = potential_jumps(s.fac), vplus_jumps(s.fac)
    dev = float(np.max(np.abs(jm - np.array([2j, -4j, 2j]))))
    cancel = float(np.max(np.abs(jm + jp)))
    record(5, dev < 1e-10 and cancel < 1e-10,
           f"|dV- - (ig, -2ig, ig)| = {dev:.2e}, |dV- + dV+| = {cancel:.2e}")


def test_criterion_06_symmetries():
    s = setup_for(1.0, 0.5, 2.0)
    x = np.linspace(-0.999, 0.999, 1000)
    dw = float(np.max(np.abs(superpotential(x, s.fac) + np.conj(superpotential(-x, s.fac)))))
    dv = float(np.max(np.abs(partner_potential(x, s.fac)
                             - np.conj(partner_potential(-x, s.fac)))))
    vp = float(np.max(np.abs(eval_vplus(x, s.p) - np.conj(eval_vplus(-x, s.p)))))
    record(6, max(dw, dv, vp) < 1e-10,
           f"W antisymmetry {dw:.2e}, V- symmetry {dv:.2e} on 1000 samples")


def test_criterion_07_xr1_dual_solve():
    s = setup_for(1.0, 0.5, 2.0)
    res = s.fac.xr1_residuals
    cons = constraint_residuals(s.fac, s.levels[1:])
    worst_c = max(cons["tanh_pt"], cons["outer_slope"], *(cons[f"kappa_sq[{lv.n}]"] for lv in s.levels))
    record(7, res["dual_solve"] < 1e-10 and worst_c < 1e-10,
           f"|x_atanh - x_newton| = {res['dual_solve']:.2e}, worst constraint {worst_c:.2e}")


def test_criterion_08_isospectrality():
    t0 = time.perf_counter()
    s = setup_for(1.0, 0.5, 2.0)
    fac = s.fac
    osp = fd_spectrum(lambda x: partner_potential(x, fac) - fac.D0, s.p, 2000, 3,
                      extrapolate=True)
    target = np.array([lv.E - fac.D0 for lv in s.levels[1:4]])
    rel = np.abs(osp.eigenvalues - target) / target
    bound = np.minimum(1e-4, np.maximum(10 * osp.error_estimate / target, 1e-9))
    dt = time.perf_counter() - t0
    record(8, bool(np.all(rel <= bound)) and dt < 120,
           f"relative deviation {np.array2string(rel, precision=2)} "
           f"(oracle error {np.array2string(osp.error_estimate / target, precision=2)}); {dt:.1f} s")


def test_criterion_09_partner_eigenfunctions():
    s = setup_for(1.0, 0.5, 2.0)
    grid = Grid(19999, 1.0)  # h = 1e-4
    ode, cont = [], 0.0
    for n in (0, 1):
        pe = partner_eigenfunction(n, s.fac, excited_state_plus(s.p, s.levels[n + 1]))
        ode.append(ode_residual(pe, s.levels[n + 1].E, lambda x: partner_potential(x, s.fac),
                                grid, margin=3, breakpoints=s.p.breakpoints))
        res = pe.interface_residuals()
        assert len(res) == 8  # two Dirichlet ends, value and slope at three interfaces
        cont = max(cont, max(res.values()))
    record(9, max(ode) < 1e-5 and cont < 1e-8,
           f"ODE residual n=0: {ode[0]:.2e}, n=1: {ode[1]:.2e}; worst interface {cont:.2e}")


def test_criterion_10_limits():
    devs = {}
    for l in (1e-6, 1.0 - 1e-9):
        s = setup_for(1.0, l, 2.0, n_levels=2)
        kind, dev = limit_deviation(s.fac)
        devs[kind] = dev
    record(10, devs["box"] < 1e-4 and devs["single-step"] < 1e-4,
           f"l = 1e-6 L vs box partner: {devs['box']:.2e}; "
           f"l = (1 - 1e-9) L vs single step: {devs['single-step']:.2e}")


def test_criterion_11_coalescence(capsys):
    gold = next(r for r in load_goldens(GOLDEN_PATH)["critical_couplings"] if r["l"] == 0.5)
    gc = critical_coupling(1.0, 0.5, 7.0, tol=1e-7, g_lo=6.0)
    code = cli.main(["spectrum", "--L", "1", "--l", "0.5", "--g", repr(1.01 * gc),
                     "--n", "3", "--out", "/dev/null"])
    capsys.readouterr()
    record(11, abs(gc - gold["g_c"]) < 1e-4 and code == 2,
           f"g_c = {gc:.8f} vs golden {gold['g_c']:.8f}; spectrum at 1.01 g_c exits {code}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
