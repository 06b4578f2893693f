import cmath
import math

import numpy as np
import pytest

from conftest import setup_for
from ptsusy.core import DomainError, eval_vplus, make_level
from ptsusy.susy import (MatchingError, constraint_residuals, ground_state_plus,
                         make_factorization, newton_xr1, partner_potential, potential_jumps,
                         riccati_residual, safe_grid, solve_xr1, superpotential,
                         superpotential_derivative_jumps, superpotential_jumps, tanh_target,
                         track_xr1, vminus_branch, vplus_jumps, w_branch, xr1_system,
                         zero_mode_residual)


def interior(p, n=1000):
    x = np.linspace(-p.L * (1 - 1e-4), p.L * (1 - 1e-4), n)
    return x[np.all([np.abs(x - b) > 1e-9 for b in p.breakpoints], axis=0)]


# -- ground state ------------------------------------------------------------

def test_ground_state_constants(std):
    gs = std.gs
    assert gs.B == 1.0
    assert isinstance(gs.C, float)
    assert gs.matching_residual < 1e-9
    assert all(r < 1e-10 for r in gs.continuity_residuals().values())


def test_ground_state_hermitian(herm):
    gs = herm.gs
    assert gs.C == pytest.approx(0.0, abs=1e-12)
    assert abs(complex(gs.A).imag) < 1e-12
    x = np.linspace(-0.9, 0.9, 7)
    psi = np.asarray(gs.psi(x))
    # symmetric and real up to a global factor
    assert np.allclose(psi, psi[::-1], atol=1e-12)
    assert np.allclose(psi.imag, 0, atol=1e-12)


def test_ground_state_wrong_energy(std):
    with pytest.raises(MatchingError, match="matching failure"):
        ground_state_plus(std.p, make_level(0, std.levels[0].E + 0.1, 2.0))


# -- integration constant x_R1 -----------------------------------------------

def test_xr1_dual_solve(std):
    x, res = solve_xr1(std.p, std.levels[0])
    assert x == std.fac.x_R1
    assert res["dual_solve"] < 1e-10
    assert all(v < 1e-10 for v in res.values())
    assert abs(cmath.tanh(std.fac.kappa0 * x) - tanh_target(std.p, std.levels[0])) < 1e-10


def test_xr1_system_definitions(std):
    lv, x = std.levels[0], std.fac.x_R1
    sysx = xr1_system(std.p, lv, x)
    assert sysx.X == pytest.approx(lv.s * x.real - lv.t * x.imag, abs=1e-15)
    assert sysx.Y == pytest.approx(lv.t * x.real + lv.s * x.imag, abs=1e-15)
    assert max(abs(r) for r in sysx.residuals()) < 1e-9


def test_xr1_newton_from_far_seed(std):
    # Newton converges to the tracked branch from the g = 0 end of the path
    path = track_xr1(std.p, std.levels[0])
    x = newton_xr1(std.p, std.levels[0], path[len(path) // 2])
    assert abs(x - path[-1]) < 1e-10


def test_xr1_hermitian_limit(herm):
    # W continues -k0 cot[k0 (x + L)] across the whole box
    fac = herm.fac
    k0 = fac.k0
    assert abs(complex(w_branch("R1", 0.25, fac)) + k0 / math.tan(k0 * 1.25)) < 1e-10
    assert np.all(np.abs(superpotential_jumps(fac)) < 1e-10)


def test_constraints(std):
    cons = constraint_residuals(std.fac, std.levels[1:])
    assert cons["tanh_pt"] < 1e-10
    assert cons["outer_slope"] < 1e-10
    for lv in std.levels:
        assert cons[f"kappa_sq[{lv.n}]"] < 1e-10


def test_factorization_constants(std):
    fac = std.fac
    assert fac.D0 == std.levels[0].E
    assert fac.x_L2 == fac.params.L + math.pi / (2 * fac.k0)
    assert fac.x_R2 == fac.params.L - math.pi / (2 * fac.k0)
    assert fac.x_L1 == fac.x_R1.conjugate()


# -- W and V- -----------------------------------------------------------------

def test_superpotential_poles_and_domain(std):
    assert abs(superpotential(-1 + 1e-6, std.fac)) > 1e5
    assert abs(superpotential(1 - 1e-6, std.fac)) > 1e5
    for x in (-1.0, 1.0, 1.5):
        with pytest.raises(DomainError):
            superpotential(x, std.fac)
        with pytest.raises(DomainError):
            partner_potential(x, std.fac)


@pytest.mark.parametrize("case", [(1.0, 0.5, 2.0), (1.0, 0.25, 2.0), (2.0, 0.3, 1.5)])
def test_w_continuity_extrapolated(case):
    fac = setup_for(*case).fac
    for b in fac.params.breakpoints:
        g1, g2, g4 = (superpotential(b + d, fac) - superpotential(b - d, fac)
                      for d in (4e-4, 2e-4, 1e-4))
        # gap = c + a d + b d^2; extrapolate to d = 0
        assert abs((8 * g4 - 6 * g2 + g1) / 3) < 1e-8


def test_pt_symmetries(std):
    x = np.linspace(-0.999, 0.999, 1000)
    w, wm = superpotential(x, std.fac), superpotential(-x, std.fac)
    assert np.max(np.abs(w + np.conj(wm))) < 1e-10
    v, vm = partner_potential(x, std.fac), partner_potential(-x, std.fac)
    assert np.max(np.abs(v - np.conj(vm))) < 1e-10


def test_vminus_quarter_period(std):
    fac = std.fac
    assert abs(complex(vminus_branch("R2", fac.x_R2, fac)) - 2 * fac.k0**2) < 1e-12
    assert abs(complex(vminus_branch("L2", -fac.x_R2, fac)) - 2 * fac.k0**2) < 1e-12


@pytest.mark.parametrize("case", [(1.0, 0.5, 2.0), (1.0, 0.5, 0.0), (1.0, 0.25, 2.0),
                                  (1.0, 0.5, 6.0)])
def test_riccati_pair(case):
    fac = setup_for(*case).fac
    x = safe_grid(fac.params, 2000, 0.05, 1e-4)
    assert np.max(riccati_residual(fac, +1, x)) < 1e-6
    assert np.max(riccati_residual(fac, -1, x)) < 1e-6


def test_jumps(std):
    g = 2.0
    jm, jp = potential_jumps(std.fac), vplus_jumps(std.fac)
    assert np.allclose(jm, [2j, -4j, 2j], atol=1e-10)
    assert np.allclose(jp, [-2j, 4j, -2j], atol=1e-14)
    assert np.max(np.abs(jm + jp)) < 1e-10 * g
    # V- = W^2 + W' + D0 with W continuous: the W' jump carries the V- jump
    assert np.allclose(superpotential_derivative_jumps(std.fac), jm, atol=1e-10)


def test_jumps_hermitian(herm):
    assert np.max(np.abs(potential_jumps(herm.fac))) < 1e-10


def test_jumps_against_one_sided_samples(std):
    fac = std.fac
    for b, expected in zip(fac.params.breakpoints, (2j, -4j, 2j)):
        d = 1e-7
        gap = partner_potential(b + d, fac) - partner_potential(b - d, fac)
        assert abs(gap - expected) < 1e-4


# -- zero mode ---------------------------------------------------------------

def test_zero_mode(std):
    x = interior(std.p)
    scale = np.max(np.abs(std.gs.psi(x)))
    assert zero_mode_residual(std.fac, std.gs, x) < 1e-9 * scale


def test_zero_mode_hermitian(herm):
    x = interior(herm.p)
    scale = np.max(np.abs(herm.gs.psi(x)))
    assert zero_mode_residual(herm.fac, herm.gs, x) < 1e-12 * max(1.0, scale)


def test_zero_mode_detects_perturbed_constant(std):
    fac = std.fac
    bad = make_factorization(fac.params, fac.level0, fac.x_R1 + 0.01)
    x = np.linspace(0.01, 0.49, 200)
    assert zero_mode_residual(bad, std.gs, x) > 1e-3


def test_vplus_consistency(std):
    # the V+ used in the Riccati check is the defining potential
    x = np.array([-0.7, -0.2, 0.2, 0.7])
    assert np.allclose(eval_vplus(x, std.p), [0, -2j, 2j, 0])
