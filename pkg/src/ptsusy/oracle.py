"""Brute-force finite-difference verification of the closed forms.

The Hamiltonian -d^2/dx^2 + V is discretised with the 3-point stencil on the
interior nodes x_j = -L + j h, j = 1..N, with Dirichlet closure.  Cells that
contain a jump of V carry the cell average, which keeps the eigenvalue error
O(h^2) so that Richardson extrapolation is meaningful.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .core import ProblemParams, eval_vplus

Sampler = Callable[[np.ndarray], np.ndarray]

GOLDEN_SCHEMA = "ptsusy-goldens/1"


class OracleError(ValueError):
    pass


@dataclass(frozen=True)
class Grid:
    N: int
    L: float

    @property
    def h(self) -> float:
        return 2 * self.L / (self.N + 1)

    @property
    def nodes(self) -> np.ndarray:
        return -self.L + self.h * np.arange(1, self.N + 1)


@dataclass
class OracleSpectrum:
    eigenvalues: np.ndarray
    grid: Grid
    extrapolated: bool = False
    error_estimate: np.ndarray | None = None
    eigenvectors: np.ndarray | None = None

    def as_record(self, p: ProblemParams) -> dict:
        return {
            "L": p.L,
            "l": p.l,
            "g": p.g,
            "N": self.grid.N,
            "extrapolated": self.extrapolated,
            "eigenvalues": [[float(e.real), float(e.imag)] for e in self.eigenvalues],
        }


def sample_potential(potential: Sampler, grid: Grid, breakpoints: Sequence[float] = ()) -> np.ndarray:
    """Node values of V, replaced by the cell average in cells holding a jump."""
    x = grid.nodes
    h = grid.h
    v = np.asarray(potential(x), dtype=complex)
    for b in breakpoints:
        for j in np.nonzero(np.abs(x - b) <= h / 2)[0]:
            a, c = x[j] - h / 2, x[j] + h / 2
            left = complex(potential(np.array([0.5 * (a + b)]))[0])
            right = complex(potential(np.array([0.5 * (b + c)]))[0])
            v[j] = ((b - a) * left + (c - b) * right) / h
    if not np.all(np.isfinite(v)):
        raise OracleError("non-finite potential sample")
    return v


def fd_matrix(v: np.ndarray, grid: Grid) -> sp.csc_matrix:
    h2 = grid.h**2
    off = np.full(grid.N - 1, -1.0 / h2)
    return sp.diags([off, 2.0 / h2 + v, off], [-1, 0, 1], format="csc", dtype=complex)


def _lowest(H, n_levels: int, method: str, vectors: bool):
    if method == "dense":
        A = H.toarray()
        if vectors:
            w, vec = scipy.linalg.eig(A)
        else:
            w, vec = scipy.linalg.eigvals(A), None
    elif method == "sparse":
        # shift-invert about 0: every eigenvalue has Re E > 0
        k = min(n_levels + 6, H.shape[0] - 2)
        if vectors:
            w, vec = spla.eigs(H, k=k, sigma=0.0)
        else:
            w, vec = spla.eigs(H, k=k, sigma=0.0, return_eigenvectors=False), None
    else:
        raise ValueError(f"unknown method {method!r}")
    order = np.lexsort((w.imag, w.real))[:n_levels]
    return w[order], (vec[:, order] if vec is not None else None)


def fd_spectrum(potential: Sampler, p: ProblemParams, N: int, n_levels: int,
                extrapolate: bool = False, method: str = "sparse",
                breakpoints: Sequence[float] | None = None,
                eigenvectors: bool = False) -> OracleSpectrum:
    """Lowest eigenvalues of the FD Hamiltonian, sorted by real part.

    With ``extrapolate`` the (N, 2N) pair is combined assuming O(h^2) error
    and ``error_estimate`` holds |E_extrap - E_2N|.
    """
    if N < 200:
        raise OracleError("N >= 200 violated")
    if breakpoints is None:
        breakpoints = p.breakpoints
    grid = Grid(N, p.L)
    w, vec = _lowest(fd_matrix(sample_potential(potential, grid, breakpoints), grid),
                     n_levels, method, eigenvectors)
    if not extrapolate:
        return OracleSpectrum(w, grid, False, None, vec)
    fine = Grid(2 * N, p.L)
    w2, vec2 = _lowest(fd_matrix(sample_potential(potential, fine, breakpoints), fine),
                       n_levels, method, eigenvectors)
    h1, h2 = grid.h**2, fine.h**2
    ext = (h1 * w2 - h2 * w) / (h1 - h2)
    return OracleSpectrum(ext, fine, True, np.abs(ext - w2), vec2)


def vplus_sampler(p: ProblemParams) -> Sampler:
    return lambda x: eval_vplus(x, p)


def ode_residual(psi: Sampler, E: float, potential: Sampler, grid: Grid,
                 margin: float = 2.0, breakpoints: Sequence[float] = (),
                 order: int = 2) -> float:
    """max |-psi'' + (V - E) psi| / max |psi| over the nodes of ``grid``.

    psi'' is the 3-point (order 2) or 5-point (order 4) central difference.
    Nodes within ``margin * h`` of the box ends or of a breakpoint are skipped.
    """
    x, h = grid.nodes, grid.h
    f = np.asarray(psi(x), dtype=complex)
    if order == 2:
        d2 = (f[2:] - 2 * f[1:-1] + f[:-2]) / h**2
        xi, fi = x[1:-1], f[1:-1]
    elif order == 4:
        d2 = (-f[4:] + 16 * f[3:-1] - 30 * f[2:-2] + 16 * f[1:-3] - f[:-4]) / (12 * h**2)
        xi, fi = x[2:-2], f[2:-2]
        margin = max(margin, 3.0)
    else:
        raise ValueError("order must be 2 or 4")
    keep = (np.abs(np.abs(xi) - grid.L) > margin * h)
    for b in breakpoints:
        keep &= np.abs(xi - b) > margin * h
    r = -d2 + (np.asarray(potential(xi), dtype=complex) - E) * fi
    return float(np.max(np.abs(r[keep])) / np.max(np.abs(f)))


def oracle_is_unbroken(p: ProblemParams, N: int, n_pair: int = 2, imag_tol: float = 1e-7) -> bool:
    w = fd_spectrum(vplus_sampler(p), p, N, n_pair).eigenvalues
    return bool(np.all(np.abs(w.imag) < imag_tol))


def oracle_critical_coupling(L: float, l: float, N: int, g_lo: float, g_hi: float,
                             tol: float = 1e-8) -> float:
    """Coupling where the lowest FD eigenvalue pair leaves the real axis."""
    mk = lambda g: ProblemParams(L, l, g)
    if oracle_is_unbroken(mk(g_hi), N) or not oracle_is_unbroken(mk(g_lo), N):
        raise OracleError("bracket does not contain the breaking point")
    lo, hi = g_lo, g_hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if oracle_is_unbroken(mk(mid), N):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def extrapolated_critical_coupling(L: float, l: float, N: int, g_lo: float, g_hi: float,
                                   tol: float = 1e-8) -> tuple[float, float]:
    """Richardson-combined (N, 2N) breaking point and its error estimate."""
    g1 = oracle_critical_coupling(L, l, N, g_lo, g_hi, tol)
    g2 = oracle_critical_coupling(L, l, 2 * N, g_lo, g_hi, tol)
    h1, h2 = (2 * L / (N + 1)) ** 2, (2 * L / (2 * N + 1)) ** 2
    ext = (h1 * g2 - h2 * g1) / (h1 - h2)
    return ext, abs(ext - g2)


def convergence_ratio(potential: Sampler, p: ProblemParams, N: int, exact: complex,
                      level: int = 0) -> float:
    """Error ratio err(N) / err(2N); close to 4 for second-order convergence."""
    e1 = fd_spectrum(potential, p, N, level + 1).eigenvalues[level]
    e2 = fd_spectrum(potential, p, 2 * N, level + 1).eigenvalues[level]
    return abs(e1 - exact) / abs(e2 - exact)


def load_goldens(path: str | Path) -> dict:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if data.get("schema") != GOLDEN_SCHEMA:
        raise OracleError(f"unexpected golden schema {data.get('schema')!r}")
    return data


def save_goldens(path: str | Path, spectra: list[dict], couplings: list[dict]) -> None:
    payload = {"schema": GOLDEN_SCHEMA, "spectra": spectra, "critical_couplings": couplings}
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def golden_spectrum_record(p: ProblemParams, N: int = 2000, n_levels: int = 3) -> dict:
    spec = fd_spectrum(vplus_sampler(p), p, N, n_levels, extrapolate=True)
    rec = spec.as_record(p)
    rec["N"] = N
    rec["error_estimate"] = [float(e) for e in spec.error_estimate]
    return rec


def golden_coupling_record(L: float, l: float, N: int, g_lo: float, g_hi: float) -> dict:
    gc, err = extrapolated_critical_coupling(L, l, N, g_lo, g_hi)
    if not math.isfinite(gc):
        raise OracleError("non-finite critical coupling")
    return {"L": L, "l": l, "N": N, "extrapolated": True, "g_c": gc, "error_estimate": err}
