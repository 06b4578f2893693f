"""Factorization H+ = A_bar A with A = d/dx + W, and the partner potential V-.

W is assembled from four closed-form branches:

    L2: -k0 cot[k0 (x + L)]            R2: -k0 cot[k0 (x - L)]
    L1: -conj(kappa0) tanh[conj(kappa0) (x + x_L1)]
    R1: -kappa0 tanh[kappa0 (x - x_R1)]

with x_L1 = conj(x_R1).  V- - D0 = W^2 + W' and V+ - D0 = W^2 - W'.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .core import DomainError, EnergyLevel, ProblemParams, eval_vplus, make_level, make_problem
from .spectrum import solve_spectrum

TAGS = ("L2", "L1", "R1", "R2")


class MatchingError(ValueError):
    """The trial energy does not admit a PT-symmetric matched solution."""


class BranchMismatchError(RuntimeError):
    """The two independent x_R1 determinations landed on different values."""


# ----------------------------------------------------------------------------
# eigenfunctions of H+


@dataclass(frozen=True)
class PlusState:
    """PT-symmetric eigenfunction of H+ in the four-region closed form.

    R2: A sin[k (L - x)],  R1: B cosh(kappa x) + i C / (kappa l) sinh(kappa x),
    and psi(x) = conj(psi(-x)) on the left half.
    """

    params: ProblemParams
    level: EnergyLevel
    A: complex
    B: float
    C: float
    matching_residual: float = 0.0

    def branch(self, tag: str, x):
        """(psi, psi') of one region's closed form, continued to any x."""
        x = np.asarray(x, dtype=float)
        if tag in ("L2", "L1"):
            v, dv = self.branch("R" + tag[1], -x)
            return np.conj(v), -np.conj(dv)
        p, k, kap = self.params, self.level.k, self.level.kappa
        if tag == "R2":
            u = k * (p.L - x)
            return self.A * np.sin(u), -k * self.A * np.cos(u)
        z = kap * x
        c = 1j * self.C / (kap * p.l)
        return (self.B * np.cosh(z) + c * np.sinh(z),
                self.B * kap * np.sinh(z) + 1j * self.C / p.l * np.cosh(z))

    def _eval(self, x, which: int):
        xa = np.asarray(x, dtype=float)
        if np.any(np.abs(xa) > self.params.L):
            raise DomainError("|x| <= L violated")
        out = np.zeros(xa.shape, dtype=complex)
        l = self.params.l
        masks = (xa < -l, (xa >= -l) & (xa < 0), (xa >= 0) & (xa <= l), xa > l)
        for tag, m in zip(TAGS, masks):
            if np.any(m):
                out[m] = self.branch(tag, xa[m])[which]
        return out if out.ndim else complex(out)

    def psi(self, x):
        return self._eval(x, 0)

    def dpsi(self, x):
        return self._eval(x, 1)

    def continuity_residuals(self) -> dict[str, float]:
        """Relative jumps of psi and psi' at -l, 0, +l."""
        l = self.params.l
        scale = max(abs(self.A), abs(self.B), abs(self.C), 1e-300)
        out = {}
        for name, (left, right), x in (("-l", ("L2", "L1"), -l), ("0", ("L1", "R1"), 0.0),
                                      ("+l", ("R1", "R2"), l)):
            a, b = self.branch(left, x), self.branch(right, x)
            kscale = max(1.0, abs(self.level.kappa), self.level.k)
            out[f"psi({name})"] = float(abs(a[0] - b[0]) / scale)
            out[f"dpsi({name})"] = float(abs(a[1] - b[1]) / (scale * kscale))
        return out


@dataclass(frozen=True)
class GroundStatePlus(PlusState):
    pass


def _matching_terms(p: ProblemParams, k: float, kap: complex):
    a = k * (p.L - p.l)
    sh, ch = cmath.sinh(kap * p.l), cmath.cosh(kap * p.l)
    # matching at x = l multiplied through by sin(a) sinh(kappa l)
    den = k * math.cos(a) * sh + kap * ch * math.sin(a)
    num = k * math.cos(a) * ch + kap * math.sin(a) * sh
    return den, num


def _im_c(p: ProblemParams, E: float) -> float:
    lv = make_level(0, E, p.g)
    den, num = _matching_terms(p, lv.k, lv.kappa)
    return (1j * lv.kappa * p.l * num / den).imag


def plus_constants(p: ProblemParams, level: EnergyLevel, check: float = 1e-9):
    """(A, B, C, residual) from matching at x = +-l and x = 0.

    The larger of the two R1 parts is normalized to one: B = 1 for
    cosh-dominated levels, C = l for sinh-dominated ones (B = 0 exactly for
    odd Hermitian levels).  The ratio C/B must be real on-shell; when its
    imaginary part exceeds ``check`` only because the ratio is ill-conditioned
    in E, a sign change within a few ulps of E is accepted instead.
    """
    k, kap, l = level.k, level.kappa, p.l
    a = k * (p.L - l)
    sa, ca = math.sin(a), math.cos(a)
    sh, ch = cmath.sinh(kap * l), cmath.cosh(kap * l)
    den, num = _matching_terms(p, k, kap)
    # (B, i C / (kappa l)) is proportional to (den, -num)
    if abs(den) >= abs(kap * l * num):
        ratio = 1j * kap * l * num / den
        B, C = 1.0, ratio.real
    else:
        ratio = den / (1j * kap * num) if num != 0 else 0.0
        B, C = ratio.real, l
    residual = abs(ratio.imag) / max(1.0, abs(ratio))
    if residual > check and abs(den) > 1e-9 * abs(num):
        dE = 8 * np.finfo(float).eps * level.E
        if _im_c(p, level.E - dE) * _im_c(p, level.E + dE) > 0:
            raise MatchingError(
                f"matching failure: Im C = {residual:.3e} |C| for E = {level.E!r}")
    # outer amplitude from the value match, or the slope match near a node of sin(a)
    inner = B * ch + 1j * C / (kap * l) * sh
    dinner = B * kap * sh + 1j * C / l * ch
    A = inner / sa if abs(sa) >= abs(ca) else -dinner / (k * ca)
    return A, B, C, residual


def ground_state_plus(p: ProblemParams, level0: EnergyLevel) -> GroundStatePlus:
    A, B, C, res = plus_constants(p, level0)
    return GroundStatePlus(p, level0, A, B, C, res)


# ----------------------------------------------------------------------------
# the complex integration constant x_R1


@dataclass(frozen=True)
class XR1System:
    """Real and imaginary parts of tanh(kappa0 x_R1) = (Nr + i Ni) / D."""

    X: float
    Y: float
    Nr: float
    Ni: float
    D: float

    @property
    def denominator(self) -> float:
        X, Y = self.X, self.Y
        return math.cosh(X) ** 2 * math.cos(Y) ** 2 + math.sinh(X) ** 2 * math.sin(Y) ** 2

    def residuals(self) -> tuple[float, float]:
        X, Y, q = self.X, self.Y, self.denominator
        return (math.sinh(X) * math.cosh(X) / q - self.Nr / self.D,
                math.sin(Y) * math.cos(Y) / q - self.Ni / self.D)


def xr1_coefficients(p: ProblemParams, level0: EnergyLevel) -> tuple[float, float, float]:
    """Nr, Ni, D as real trigonometric/hyperbolic combinations."""
    s, t, k, l = level0.s, level0.t, level0.k, p.l
    c2, s2 = math.cos(2 * k * (p.L - l)), math.sin(2 * k * (p.L - l))
    Nr = (-s * s * c2 + t * t) * math.sinh(2 * s * l) + k * s * s2 * math.cosh(2 * s * l)
    Ni = (s * s - t * t * c2) * math.sin(2 * t * l) - k * t * s2 * math.cos(2 * t * l)
    D = ((-s * s * c2 + t * t) * math.cosh(2 * s * l) + (s * s - t * t * c2) * math.cos(2 * t * l)
         + k * s2 * (s * math.sinh(2 * s * l) + t * math.sin(2 * t * l)))
    return Nr, Ni, D


def xr1_system(p: ProblemParams, level0: EnergyLevel, x_r1: complex) -> XR1System:
    s, t = level0.s, level0.t
    Nr, Ni, D = xr1_coefficients(p, level0)
    return XR1System(s * x_r1.real - t * x_r1.imag, t * x_r1.real + s * x_r1.imag, Nr, Ni, D)


def tanh_target(p: ProblemParams, level0: EnergyLevel) -> complex:
    """Required value of tanh(kappa0 x_R1), equal to -i C / (kappa0 l B)."""
    k, kap, l = level0.k, level0.kappa, p.l
    a = k * (p.L - l)
    sa, ca = math.sin(a), math.cos(a)
    sh, ch = cmath.sinh(kap * l), cmath.cosh(kap * l)
    return (k * ca * ch + kap * sa * sh) / (k * ca * sh + kap * ch * sa)


def _nearest_branch(target: complex, kap: complex, previous: complex) -> complex:
    base = cmath.atanh(target) / kap
    period = 1j * math.pi / kap
    n = round(((previous - base) / period).real) if abs(period) > 0 else 0
    cands = [base + m * period for m in (n - 1, n, n + 1)]
    return min(cands, key=lambda z: abs(z - previous))


def track_xr1(p: ProblemParams, level0: EnergyLevel, steps: int | None = None) -> list[complex]:
    """x_R1 continued in g from the principal branch at g = 0.

    Returns the whole path; the last entry belongs to ``p``.
    """
    if steps is None:
        steps = max(4, math.ceil(p.g / 0.25))
    gs = [p.g * j / steps for j in range(steps + 1)]
    path = []
    prev = None
    for j, g in enumerate(gs):
        if j == steps:
            lv = level0
        else:
            lv = solve_spectrum(make_problem(p.L, p.l, g), 1).levels[0]
        q = make_problem(p.L, p.l, g)
        T, kap = tanh_target(q, lv), lv.kappa
        if prev is None:
            x = cmath.atanh(T) / kap
        else:
            x = _nearest_branch(T, kap, prev)
            if abs(x - prev) > 0.25 * math.pi / abs(kap) and steps < 4096:
                return track_xr1(p, level0, 2 * steps)
        path.append(x)
        prev = x
    return path


def newton_xr1(p: ProblemParams, level0: EnergyLevel, seed: complex,
               tol: float = 1e-15, max_iter: int = 100) -> complex:
    """Damped Newton on the real pair of equations in (Re x_R1, Im x_R1)."""
    kap = level0.kappa
    x = complex(seed)

    def norm(z):
        r1, r2 = xr1_system(p, level0, z).residuals()
        return math.hypot(r1, r2)

    r = norm(x)
    for _ in range(max_iter):
        if r < tol:
            break
        r1, r2 = xr1_system(p, level0, x).residuals()
        # the system is Re/Im of an analytic function with derivative J
        J = kap / cmath.cosh(kap * x) ** 2
        jac = np.array([[J.real, -J.imag], [J.imag, J.real]])
        dx = np.linalg.solve(jac, [-r1, -r2])
        lam = 1.0
        while lam > 1e-6:
            trial = x + lam * complex(dx[0], dx[1])
            rt = norm(trial)
            if rt < r:
                break
            lam *= 0.5
        else:
            break
        x, r = trial, rt
    return x


def solve_xr1(p: ProblemParams, level0: EnergyLevel) -> tuple[complex, dict]:
    """x_R1 by branch-tracked inverse tanh, cross-checked by real Newton.

    The Newton iteration starts from the previous point on the tracking
    path, so it does its own convergence work.
    """
    path = track_xr1(p, level0)
    x_a = path[-1]
    seed = path[-2] if len(path) > 1 else x_a + 1e-3 * (1 + 1j)
    x_b = newton_xr1(p, level0, seed)
    diff = abs(x_a - x_b)
    if diff > 1e-8:
        raise BranchMismatchError(
            f"branch mismatch: inverse tanh {x_a!r} vs Newton {x_b!r}")
    sysb = xr1_system(p, level0, x_b)
    Nr, Ni, D = sysb.Nr, sysb.Ni, sysb.D
    T = tanh_target(p, level0)
    residuals = {
        "dual_solve": diff,
        "system_eq1": abs(sysb.residuals()[0]),
        "system_eq2": abs(sysb.residuals()[1]),
        "tanh_target": abs(cmath.tanh(level0.kappa * x_a) - T),
        "coefficients_vs_target": abs(complex(Nr, Ni) / D - T),
    }
    return x_a, residuals


# ----------------------------------------------------------------------------
# superpotential and partner potential


@dataclass(frozen=True)
class Factorization:
    params: ProblemParams
    level0: EnergyLevel
    D0: float
    x_L2: float
    x_R2: float
    x_R1: complex
    x_L1: complex
    xr1_residuals: dict = field(default_factory=dict, compare=False)

    @property
    def kappa0(self) -> complex:
        return self.level0.kappa

    @property
    def k0(self) -> float:
        return self.level0.k


def make_factorization(p: ProblemParams, level0: EnergyLevel, x_r1: complex,
                       residuals: dict | None = None) -> Factorization:
    k0 = level0.k
    return Factorization(p, level0, level0.E, p.L + math.pi / (2 * k0),
                         p.L - math.pi / (2 * k0), complex(x_r1), complex(x_r1).conjugate(),
                         dict(residuals or {}))


def factorize(p: ProblemParams, level0: EnergyLevel | None = None) -> Factorization:
    """Solve for every constant entering W and V- (D0 = E0)."""
    if level0 is None:
        level0 = solve_spectrum(p, 1).levels[0]
    x_r1, res = solve_xr1(p, level0)
    return make_factorization(p, level0, x_r1, res)


def w_branch(tag: str, x, fac: Factorization):
    x = np.asarray(x, dtype=float)
    k, kap, L = fac.k0, fac.kappa0, fac.params.L
    if tag == "L2":
        return -k / np.tan(k * (x + L))
    if tag == "R2":
        return -k / np.tan(k * (x - L))
    if tag == "L1":
        kc = kap.conjugate()
        return -kc * np.tanh(kc * (x + fac.x_L1))
    return -kap * np.tanh(kap * (x - fac.x_R1))


def dw_branch(tag: str, x, fac: Factorization):
    """Analytic W' on one branch."""
    x = np.asarray(x, dtype=float)
    k, kap, L = fac.k0, fac.kappa0, fac.params.L
    if tag == "L2":
        return k * k / np.sin(k * (x + L)) ** 2
    if tag == "R2":
        return k * k / np.sin(k * (x - L)) ** 2
    if tag == "L1":
        kc = kap.conjugate()
        return -kc * kc / np.cosh(kc * (x + fac.x_L1)) ** 2
    return -kap * kap / np.cosh(kap * (x - fac.x_R1)) ** 2


def vminus_branch(tag: str, x, fac: Factorization):
    x = np.asarray(x, dtype=float)
    k, kap, L, g = fac.k0, fac.kappa0, fac.params.L, fac.params.g
    if tag == "L2":
        return 2 * k * k / np.sin(k * (x + L)) ** 2
    if tag == "R2":
        return 2 * k * k / np.sin(k * (x - L)) ** 2
    if tag == "L1":
        kc = kap.conjugate()
        return -2 * kc * kc / np.cosh(kc * (x + fac.x_L1)) ** 2 - 1j * g
    return -2 * kap * kap / np.cosh(kap * (x - fac.x_R1)) ** 2 + 1j * g


def vplus_branch(tag: str, x, fac: Factorization):
    g = fac.params.g
    v = {"L2": 0.0, "L1": -1j * g, "R1": 1j * g, "R2": 0.0}[tag]
    return np.full(np.shape(x), v, dtype=complex)


def _piecewise(branch, x, fac: Factorization, outer_at_l: bool):
    xa = np.asarray(x, dtype=float)
    L, l = fac.params.L, fac.params.l
    if np.any(np.abs(xa) >= L):
        raise DomainError("-L < x < L violated")
    if outer_at_l:
        masks = (xa <= -l, (xa > -l) & (xa < 0), (xa > 0) & (xa < l), xa >= l)
    else:
        masks = (xa < -l, (xa >= -l) & (xa < 0), (xa > 0) & (xa <= l), xa > l)
    out = np.zeros(xa.shape, dtype=complex)
    for tag, m in zip(TAGS, masks):
        if np.any(m):
            out[m] = branch(tag, xa[m], fac)
    origin = xa == 0
    if np.any(origin):
        out[origin] = 0.5 * (branch("L1", 0.0, fac) + branch("R1", 0.0, fac))
    return out if out.ndim else complex(out)


def superpotential(x, fac: Factorization):
    """W(x) on (-L, L); at x = 0 the mean of the two (equal) inner limits."""
    return _piecewise(w_branch, x, fac, outer_at_l=False)


def superpotential_derivative(x, fac: Factorization):
    return _piecewise(dw_branch, x, fac, outer_at_l=True)


def partner_potential(x, fac: Factorization):
    """V-(x) on (-L, L).

    At +-l the outer (csc^2) value is returned and at the origin the mean of
    the two one-sided limits, mirroring the convention used for V+.
    """
    return _piecewise(vminus_branch, x, fac, outer_at_l=True)


def _jumps(branch, fac: Factorization) -> np.ndarray:
    l = fac.params.l
    pairs = ((-l, "L2", "L1"), (0.0, "L1", "R1"), (l, "R1", "R2"))
    return np.array([complex(branch(right, x, fac)) - complex(branch(left, x, fac))
                     for x, left, right in pairs])


def potential_jumps(fac: Factorization) -> np.ndarray:
    """Right minus left limits of V- at (-l, 0, +l); expected (ig, -2ig, ig)."""
    return _jumps(vminus_branch, fac)


def vplus_jumps(fac: Factorization) -> np.ndarray:
    return _jumps(vplus_branch, fac)


def superpotential_jumps(fac: Factorization) -> np.ndarray:
    return _jumps(w_branch, fac)


def superpotential_derivative_jumps(fac: Factorization) -> np.ndarray:
    return _jumps(dw_branch, fac)


def zero_mode_residual(fac: Factorization, gs: PlusState, grid) -> float:
    """max |psi0' + W psi0| over ``grid`` (closed-form derivative)."""
    x = np.asarray(grid, dtype=float)
    r = np.asarray(gs.dpsi(x)) + np.asarray(superpotential(x, fac)) * np.asarray(gs.psi(x))
    return float(np.max(np.abs(r)))


def constraint_residuals(fac: Factorization, levels: list[EnergyLevel] = ()) -> dict[str, float]:
    """Residuals of the algebraic constraints that make the matching consistent.

    tanh_pt: kappa0 tanh(kappa0 x_R1) + conj(kappa0) tanh(conj(kappa0 x_R1)) = 0
    outer_slope: kappa0 tanh[kappa0 (l - x_R1)] = -k0 cot[k0 (L - l)]
    kappa_sq[n]: conj(kappa_n)^2 - kappa_n^2 = -2ig

    ``outer_slope`` is scaled by max(1, |k0 cot k0(L-l)|) since that term grows
    without bound as l -> L.
    """
    p, kap, k = fac.params, fac.kappa0, fac.k0
    T = cmath.tanh(kap * fac.x_R1)
    kc = kap.conjugate()
    tpt = abs(kap * T + kc * cmath.tanh(kc * fac.x_L1))
    kcot = k / math.tan(k * (p.L - p.l))
    slope = abs(kap * cmath.tanh(kap * (p.l - fac.x_R1)) + kcot) / max(1.0, abs(kcot))
    out = {"tanh_pt": tpt, "outer_slope": slope, "kappa_sq[0]": abs(kc * kc - kap * kap + 2j * p.g)}
    for lv in levels:
        q = lv.kappa
        out[f"kappa_sq[{lv.n}]"] = abs(q.conjugate() ** 2 - q * q + 2j * p.g)
        out[f"kappa_shift[{lv.n}]"] = abs((q * q - kap * kap) - (k * k - lv.k**2))
    return out


def riccati_residual(fac: Factorization, sign: int, x, h: float = 1e-5) -> np.ndarray:
    """|V(+/-) - D0 - (W^2 -/+ W')| with W' by central differences.

    sign=+1 checks V+, sign=-1 checks V-.  Each point is scaled by the size
    of the terms being balanced, max(1, |W|^2, |W'|).
    """
    x = np.asarray(x, dtype=float)
    w = superpotential(x, fac)
    dw = (superpotential(x + h, fac) - superpotential(x - h, fac)) / (2 * h)
    if sign > 0:
        r = eval_vplus(x, fac.params) - fac.D0 - (w * w - dw)
    else:
        r = partner_potential(x, fac) - fac.D0 - (w * w + dw)
    return np.abs(r) / np.maximum(1.0, np.maximum(np.abs(w) ** 2, np.abs(dw)))


def safe_grid(p: ProblemParams, n: int, end_margin: float, gap: float) -> np.ndarray:
    """n uniform points on [-L + end_margin, L - end_margin] minus a gap around +-l, 0."""
    x = np.linspace(-p.L + end_margin, p.L - end_margin, n)
    keep = np.ones(n, dtype=bool)
    for b in p.breakpoints:
        keep &= np.abs(x - b) > gap
    return x[keep]
