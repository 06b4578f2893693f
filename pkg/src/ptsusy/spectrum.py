"""Dirichlet spectrum of H+ from exact 2x2 transfer matrices.

The wavefunction is launched at x = -L with (psi, psi') = (0, 1) and carried
across L2, L1, R1, R2 in closed form; the secular function is psi(L).
For real E the PT symmetry of V+ makes psi(L) real: with (u, u') the state
at the origin, psi(L) = 2 Re(u conj(u')).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .core import EnergyLevel, ProblemParams, Region, make_level, make_problem

DEFAULT_TOL = 1e-10


class CoalescenceError(RuntimeError):
    """Real levels merged into complex pairs: PT symmetry is broken."""

    def __init__(self, message: str, params: ProblemParams, real_roots=(), count=None):
        super().__init__(message)
        self.params = params
        self.real_roots = list(real_roots)
        self.count = count


class BracketError(ValueError):
    """The coupling bracket does not contain the breaking point."""


@dataclass(frozen=True)
class PropagatorStep:
    region: Region
    local_wavenumber: complex
    matrix: np.ndarray


@dataclass
class SpectrumReport:
    params: ProblemParams
    levels: list[EnergyLevel]
    secular_residuals: list[float]
    regime: str = "unbroken"
    contour_count: int | None = None
    extra: dict = field(default_factory=dict)

    @property
    def energies(self) -> np.ndarray:
        return np.array([lv.E for lv in self.levels])


def _sinhc(z: complex) -> complex:
    if abs(z) < 1e-4:
        return 1 + z * z / 6
    return cmath.sinh(z) / z


def _region_q(tag: str, E: complex, p: ProblemParams) -> complex:
    # psi'' = (V - E) psi with V constant on the region
    v = {"L2": 0.0, "L1": -1j * p.g, "R1": 1j * p.g, "R2": 0.0}[tag]
    return v - E


def propagator(region: Region, E: complex, p: ProblemParams) -> PropagatorStep:
    """Transfer matrix mapping (psi, psi') across one region."""
    q = _region_q(region.tag, E, p)
    d = region.width
    r = cmath.sqrt(q)
    ch = cmath.cosh(r * d)
    sc = _sinhc(r * d)
    m = np.array([[ch, d * sc], [q * d * sc, ch]], dtype=complex)
    if region.tag in ("L2", "R2"):
        wavenumber = cmath.sqrt(E)
    else:
        wavenumber = r
    return PropagatorStep(region, wavenumber, m)


def transfer_steps(E: complex, p: ProblemParams) -> list[PropagatorStep]:
    return [propagator(reg, E, p) for reg in p.regions()]


def _propagate_scalar(E: complex, p: ProblemParams, regions) -> tuple[complex, complex]:
    u, du = 0j, 1 + 0j
    for reg in regions:
        q = _region_q(reg.tag, E, p)
        d = reg.width
        r = cmath.sqrt(q)
        ch = cmath.cosh(r * d)
        sc = d * _sinhc(r * d)
        u, du = ch * u + sc * du, q * sc * u + ch * du
    return u, du


def secular_function(E: complex, p: ProblemParams) -> complex:
    """psi_E(L) for the solution with psi(-L) = 0, psi'(-L) = 1."""
    u, _ = _propagate_scalar(complex(E), p, p.regions())
    return u


def secular_real(E: float, p: ProblemParams) -> float:
    """PT-symmetric form of the secular function, real for real E.

    Equal to ``secular_function(E, p)`` on the real axis.
    """
    u, du = _propagate_scalar(complex(E), p, p.regions()[:2])
    return 2.0 * (u * du.conjugate()).real


def box_level(n: int, L: float) -> float:
    """Dirichlet level ((n+1) pi / 2L)^2 of the empty box."""
    return ((n + 1) * math.pi / (2 * L)) ** 2


def count_eigenvalues(p: ProblemParams, e_max: float, e_min: float | None = None,
                      height: float | None = None) -> int:
    """Number of eigenvalues (real or complex) with e_min < Re E < e_max.

    Winding number of psi_E(L) around a rectangle in the complex E plane.
    Every eigenvalue has Re E >= (pi/2L)^2 and |Im E| <= g, so the default
    rectangle encloses all eigenvalues with Re E < e_max.
    """
    e0 = box_level(0, p.L)
    if e_min is None:
        e_min = 0.5 * e0
    if height is None:
        height = p.g + e0
    corners = [complex(e_min, -height), complex(e_max, -height),
               complex(e_max, height), complex(e_min, height)]
    total = 0.0
    for a, b in zip(corners, corners[1:] + corners[:1]):
        nodes = [a + (b - a) * j / 64 for j in range(65)]
        vals = [secular_function(z, p) for z in nodes]
        for j in range(64):
            total += _winding_segment(p, nodes[j], nodes[j + 1], vals[j], vals[j + 1], 0)
    return int(round(total / (2 * math.pi)))


def _winding_segment(p, a, b, fa, fb, depth):
    m = 0.5 * (a + b)
    fm = secular_function(m, p)
    d1, d2 = cmath.phase(fm / fa), cmath.phase(fb / fm)
    if (abs(d1) < 0.25 and abs(d2) < 0.25) or depth > 40:
        return d1 + d2
    return (_winding_segment(p, a, m, fa, fm, depth + 1)
            + _winding_segment(p, m, b, fm, fb, depth + 1))


def _scan_roots(p: ProblemParams, n_roots: int, e_cap: float) -> list[float]:
    """Real roots of ``secular_real`` in increasing order, at least n_roots if present."""
    f = lambda e: secular_real(e, p)
    e_step = box_level(0, p.L) / 8
    e_lo = 0.5 * box_level(0, p.L)
    roots: list[float] = []
    xs = [e_lo, e_lo + e_step]
    fs = [f(xs[0]), f(xs[1])]
    while len(roots) < n_roots and xs[-1] < e_cap:
        xs.append(xs[-1] + e_step)
        fs.append(f(xs[-1]))
        a, b = xs[-2], xs[-1]
        fa, fb = fs[-2], fs[-1]
        if fa == 0.0:
            roots.append(a)
            continue
        if fa * fb < 0:
            roots.append(_polish(f, a, b))
            continue
        # same sign at three consecutive nodes with a dip: possible close pair
        fm, fp = fs[-3], fs[-2]
        if fm * fp > 0 and fp * fb > 0 and abs(fp) < abs(fm) and abs(fp) < abs(fb):
            roots.extend(_split_dip(f, xs[-3], xs[-1], math.copysign(1.0, fp)))
    roots.sort()
    return roots


def _split_dip(f, a: float, b: float, sign: float) -> list[float]:
    res = minimize_scalar(lambda e: sign * f(e), bounds=(a, b), method="bounded",
                          options={"xatol": 1e-14 * max(1.0, b)})
    em = res.x
    fm = f(em)
    if sign * fm > 0:
        return []
    if fm == 0.0:
        return [em, em]
    return [_polish(f, a, em), _polish(f, em, b)]


def _polish(f, a: float, b: float) -> float:
    return brentq(f, a, b, xtol=1e-15 * max(1.0, abs(b)), rtol=4 * np.finfo(float).eps,
                  maxiter=200)


def solve_spectrum(p: ProblemParams, n_levels: int, tol: float = DEFAULT_TOL,
                   gap: float | None = None) -> SpectrumReport:
    """Lowest ``n_levels`` real eigenvalues of H+.

    Raises CoalescenceError when two roots are closer than ``gap`` or when
    the contour count shows complex eigenvalues below the reported levels.
    """
    if n_levels < 1:
        raise ValueError("n_levels >= 1 violated")
    if not tol > 0:
        raise ValueError("tol > 0 violated")
    e0 = box_level(0, p.L)
    if gap is None:
        gap = 1e-6 * e0
    # levels sit near the box levels; the cap only guards against runaway scans
    e_cap = 4 * box_level(n_levels + 4, p.L) + 4 * p.g + 10 * e0
    roots = _scan_roots(p, n_levels + 1, e_cap)
    for r1, r2 in zip(roots, roots[1:]):
        if r2 - r1 < gap:
            raise CoalescenceError(
                f"coalescence detected: roots {r1!r} and {r2!r} closer than {gap:g}",
                p, roots)
    if len(roots) < n_levels + 1:
        raise CoalescenceError("coalescence detected: too few real roots below "
                               f"E = {e_cap:g}", p, roots)
    e_mid = 0.5 * (roots[n_levels - 1] + roots[n_levels])
    count = count_eigenvalues(p, e_mid)
    if count != n_levels:
        raise CoalescenceError(
            f"coalescence detected: {count} eigenvalues below Re E = {e_mid:g} "
            f"but only {n_levels} real roots", p, roots, count)
    levels, residuals = [], []
    for n, e in enumerate(roots[:n_levels]):
        if not _bracketed(e, tol, p):
            raise RuntimeError(f"root {n} not bracketed within tol={tol:g}")
        levels.append(make_level(n, e, p.g))
        residuals.append(abs(secular_function(e, p)))
    return SpectrumReport(p, levels, residuals, "unbroken", count)


def _bracketed(e: float, tol: float, p: ProblemParams) -> bool:
    # a sign change across [e - tol, e + tol] certifies |E - e| < tol
    fa, fb = secular_real(e - tol, p), secular_real(e + tol, p)
    return fa * fb <= 0 or secular_real(e, p) == 0.0


def is_unbroken(p: ProblemParams, n_levels: int = 2) -> bool:
    try:
        solve_spectrum(p, n_levels)
    except CoalescenceError:
        return False
    return True


def critical_coupling(L: float, l: float, g_hi: float, tol: float = 1e-6,
                      g_lo: float = 0.0) -> float:
    """Coupling where the two lowest levels stop being real and distinct."""
    if not tol > 0:
        raise ValueError("tol > 0 violated")
    if not g_hi > g_lo >= 0:
        raise ValueError("0 <= g_lo < g_hi violated")
    if is_unbroken(make_problem(L, l, g_hi)):
        raise BracketError(f"g_hi below breaking: levels still real at g = {g_hi:g}")
    if not is_unbroken(make_problem(L, l, g_lo)):
        raise BracketError(f"g_lo above breaking: levels already complex at g = {g_lo:g}")
    lo, hi = g_lo, g_hi
    while hi - lo >= tol:
        mid = 0.5 * (lo + hi)
        if is_unbroken(make_problem(L, l, mid)):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
