"""Eigenfunctions of H- obtained as psi-_n = C- (d/dx + W) psi+_{n+1}."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DomainError, EnergyLevel, ProblemParams
from .report import VerificationReport
from .susy import (TAGS, Factorization, PlusState, constraint_residuals, dw_branch,
                   plus_constants, superpotential, w_branch)

MATCH_THRESHOLD = 1e-8
# outer regions narrower than this fraction of L make the +-l interfaces
# ill-conditioned (the R1 closed form sits next to a tanh pole)
DEGENERATE_WIDTH = 5e-4


class ContinuityError(RuntimeError):
    def __init__(self, interface: str, residual: float):
        super().__init__(f"continuity violation at {interface}: residual {residual:.3e}")
        self.interface = interface
        self.residual = residual


@dataclass(frozen=True)
class ExcitedStatePlus(PlusState):
    pass


def excited_state_plus(p: ProblemParams, level: EnergyLevel) -> ExcitedStatePlus:
    if level.n < 1:
        raise ValueError("level index >= 1 violated")
    A, B, C, res = plus_constants(p, level)
    return ExcitedStatePlus(p, level, A, B, C, res)


def _ratio_sin(a: float, b: float, u):
    # sin(a u) / sin(b u), finite at u = 0
    return (a / b) * np.sinc(a * u / math.pi) / np.sinc(b * u / math.pi)


@dataclass(frozen=True)
class PartnerEigenfunction:
    """psi-_n with energy E+_{n+1} - E+_0 in H- (equivalently E+_{n+1} for V-).

    The same constant ``Cminus`` multiplies every region.
    """

    n: int
    level: EnergyLevel
    Cminus: complex
    fac: Factorization
    plus: PlusState

    def branch(self, tag: str, x):
        """psi-_n on one region, expanded so that x = +-L and x = 0 are regular."""
        x = np.asarray(x, dtype=float)
        if tag in ("L2", "L1"):
            # (d/dx + W) maps PT-symmetric psi+ to a PT-antisymmetric function
            return -np.conj(self._bare("R" + tag[1], -x)) * self.Cminus
        return self._bare(tag, x) * self.Cminus

    def _bare(self, tag: str, x):
        st, fac = self.plus, self.fac
        L, l = fac.params.L, fac.params.l
        if tag == "R2":
            k1, k0 = self.level.k, fac.k0
            u = L - x
            return st.A * (-k1 * np.cos(k1 * u) + k0 * np.cos(k0 * u) * _ratio_sin(k1, k0, u))
        q, kap = self.level.kappa, fac.kappa0
        th = np.tanh(kap * (x - fac.x_R1))
        ci = 1j * st.C / (q * l)
        return (st.B * (q * np.sinh(q * x) - kap * th * np.cosh(q * x))
                + ci * (q * np.cosh(q * x) - kap * th * np.sinh(q * x)))

    def branch_derivative(self, tag: str, x):
        """d/dx psi-_n = C- [(V+ - E) psi + W' psi + W psi'] on one region."""
        x = np.asarray(x, dtype=float)
        fac, st = self.fac, self.plus
        v = {"L2": 0.0, "L1": -1j * fac.params.g, "R1": 1j * fac.params.g, "R2": 0.0}[tag]
        f, df = st.branch(tag, x)
        d2f = (v - self.level.E) * f
        return self.Cminus * (d2f + dw_branch(tag, x, fac) * f + w_branch(tag, x, fac) * df)

    def __call__(self, x):
        xa = np.asarray(x, dtype=float)
        L, l = self.fac.params.L, self.fac.params.l
        if np.any(np.abs(xa) > L):
            raise DomainError("|x| <= L violated")
        out = np.zeros(xa.shape, dtype=complex)
        masks = (xa < -l, (xa >= -l) & (xa < 0), (xa >= 0) & (xa <= l), xa > l)
        for tag, m in zip(TAGS, masks):
            if np.any(m):
                out[m] = self.branch(tag, xa[m])
        return out if out.ndim else complex(out)

    def interface_residuals(self) -> dict[str, float]:
        """Dirichlet values and value/slope jumps, relative to the largest interface value.

        The +-l interfaces are left out when the outer regions are
        narrower than ``DEGENERATE_WIDTH * L``.
        """
        L, l = self.fac.params.L, self.fac.params.l
        pairs = (("-l", -l, "L2", "L1"), ("0", 0.0, "L1", "R1"), ("+l", l, "R1", "R2"))
        if L - l < DEGENERATE_WIDTH * L:
            pairs = pairs[1:2]
        vals = {}
        for name, x, a, b in pairs:
            vals[name] = (complex(self.branch(a, x)), complex(self.branch(b, x)),
                          complex(self.branch_derivative(a, x)),
                          complex(self.branch_derivative(b, x)))
        scale = max(max(abs(v[0]), abs(v[1])) for v in vals.values())
        dscale = max(max(abs(v[2]), abs(v[3])) for v in vals.values())
        out = {"dirichlet(-L)": abs(complex(self.branch("L2", -L))) / scale,
               "dirichlet(+L)": abs(complex(self.branch("R2", L))) / scale}
        for name, v in vals.items():
            out[f"value({name})"] = abs(v[1] - v[0]) / scale
            out[f"slope({name})"] = abs(v[3] - v[2]) / dscale
        return out


def partner_eigenfunction(n: int, fac: Factorization, ex: PlusState,
                          cminus: complex = 1j) -> PartnerEigenfunction:
    """Apply the intertwiner to psi+_{n+1} and check every interface."""
    if ex.params != fac.params:
        raise ValueError("factorization and excited state belong to different parameters")
    if n < 0 or ex.level.n != n + 1:
        raise ValueError("excited state must be level n + 1")
    pe = PartnerEigenfunction(n, ex.level, complex(cminus), fac, ex)
    for name, r in pe.interface_residuals().items():
        if r > MATCH_THRESHOLD:
            raise ContinuityError(name, r)
    return pe


def intertwine(state: PlusState, fac: Factorization, x):
    """(d/dx + W) psi+ from the closed-form derivative, region by region."""
    x = np.asarray(x, dtype=float)
    return np.asarray(state.dpsi(x)) + np.asarray(superpotential(x, fac)) * np.asarray(state.psi(x))


def pt_residual(f, x) -> float:
    """max |f(x) - conj(f(-x))| / max |f|."""
    x = np.asarray(x, dtype=float)
    a, b = np.asarray(f(x)), np.asarray(f(-x))
    return float(np.max(np.abs(a - np.conj(b))) / np.max(np.abs(a)))


def check_matching(pe: PartnerEigenfunction, fac: Factorization,
                   threshold: float = MATCH_THRESHOLD) -> VerificationReport:
    """Boundary, continuity, constraint and PT-symmetry residuals for one psi-_n.

    Unlike ``partner_eigenfunction`` this never raises; ``fac`` may differ
    from the factorization ``pe`` was built with, which is how a wrong
    integration constant shows up as a failed slope match.
    """
    probe = PartnerEigenfunction(pe.n, pe.level, pe.Cminus, fac, pe.plus)
    report = VerificationReport(f"partner n={pe.n}")
    for name, r in probe.interface_residuals().items():
        report.add(name, r, threshold)
    cons = constraint_residuals(fac, [pe.level])
    L, l = fac.params.L, fac.params.l
    keys = ("tanh_pt", f"kappa_sq[{pe.level.n}]") + (("outer_slope",) if L - l >= DEGENERATE_WIDTH * L else ())
    for key in keys:
        report.add(key, cons[key], threshold)
    xs = np.linspace(-L, L, 801)
    report.add("pt_symmetry", pt_residual(probe, xs), threshold)
    return report
