"""Reference partners for the two degenerate well widths.

l -> 0: the empty Dirichlet box, W = -k cot[k (x + L)] with k = pi / 2L and
V- = 2 k^2 csc^2[k (x + L)].

l -> L: the well fills the box (one jump, at the origin).  With
psi(x) ~ sinh[kappa (L - x)] on x > 0 the ground state gives
W = -kappa coth[kappa (x - L)] and V- = ig + 2 kappa^2 csch^2[kappa (x - L)],
mirrored by PT conjugation on x < 0.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.optimize import brentq

from .core import EnergyLevel, make_level


def box_wavenumber(L: float) -> float:
    return math.pi / (2 * L)


def box_superpotential(x, L: float):
    k = box_wavenumber(L)
    return -k / np.tan(k * (np.asarray(x, dtype=float) + L))


def box_partner_potential(x, L: float):
    k = box_wavenumber(L)
    return 2 * k * k / np.sin(k * (np.asarray(x, dtype=float) + L)) ** 2


def single_step_secular(E: float, L: float, g: float) -> float:
    """Real matching function of the full-width well; zero at eigenvalues."""
    kap = make_level(0, E, g).kappa
    return (kap * np.cosh(kap * L) * np.conj(np.sinh(kap * L))).real


def single_step_ground_level(L: float, g: float) -> EnergyLevel:
    e0 = box_wavenumber(L) ** 2
    step = e0 / 16
    a = 0.5 * e0
    fa = single_step_secular(a, L, g)
    while a < 100 * e0:
        b = a + step
        fb = single_step_secular(b, L, g)
        if fa * fb <= 0:
            E = brentq(single_step_secular, a, b, args=(L, g), xtol=1e-15, rtol=1e-15)
            return make_level(0, E, g)
        a, fa = b, fb
    raise RuntimeError("no real ground level for the full-width well")


def _mirror(fn_right, x, level: EnergyLevel, L: float, g: float):
    xa = np.asarray(x, dtype=float)
    out = np.empty(xa.shape, dtype=complex)
    pos, neg = xa > 0, xa < 0
    out[pos] = fn_right(xa[pos], level, L, g)
    out[neg] = np.conj(fn_right(-xa[neg], level, L, g))
    zero = xa == 0
    if np.any(zero):
        v = fn_right(np.zeros(1), level, L, g)[0]
        out[zero] = v.real
    return out


def _w_right(x, level, L, g):
    kap = level.kappa
    return -kap / np.tanh(kap * (x - L))


def _v_right(x, level, L, g):
    kap = level.kappa
    return 1j * g + 2 * kap * kap / np.sinh(kap * (x - L)) ** 2


def single_step_superpotential(x, L: float, g: float, level: EnergyLevel | None = None):
    level = level or single_step_ground_level(L, g)
    xa = np.asarray(x, dtype=float)
    # PT-antisymmetric: W(-x) = -conj(W(x)), so W(0) is imaginary
    right = _w_right(np.abs(xa), level, L, g)
    return np.where(xa > 0, right, np.where(xa < 0, -np.conj(right), 1j * right.imag))


def single_step_partner_potential(x, L: float, g: float, level: EnergyLevel | None = None):
    level = level or single_step_ground_level(L, g)
    return _mirror(_v_right, x, level, L, g)
