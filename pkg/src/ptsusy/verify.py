"""End-to-end invariant battery used by ``ptsusy verify``."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ProblemParams, level_residuals
from .limits import (box_partner_potential, single_step_ground_level,
                     single_step_partner_potential)
from .oracle import Grid, fd_spectrum, ode_residual
from .partner import (DEGENERATE_WIDTH, check_matching, excited_state_plus,
                      partner_eigenfunction, pt_residual)
from .report import VerificationReport
from .spectrum import SpectrumReport, solve_spectrum
from .susy import (Factorization, GroundStatePlus, constraint_residuals, factorize,
                   ground_state_plus, partner_potential, potential_jumps, riccati_residual,
                   safe_grid, superpotential, superpotential_derivative_jumps,
                   superpotential_jumps, vplus_jumps, zero_mode_residual)

# well widths closer than this (relative to L) to 0 or L get a limit check
LIMIT_WINDOW = 2e-4


@dataclass
class Pipeline:
    params: ProblemParams
    spectrum: SpectrumReport
    fac: Factorization
    ground: GroundStatePlus


def run_pipeline(p: ProblemParams, n_levels: int, tol: float = 1e-10) -> Pipeline:
    spec = solve_spectrum(p, n_levels, tol)
    level0 = spec.levels[0]
    return Pipeline(p, spec, factorize(p, level0), ground_state_plus(p, level0))


def sample_grid(p: ProblemParams, n: int, margin: float = 1e-4) -> np.ndarray:
    """n uniform points on [-L + margin L, L - margin L]."""
    return np.linspace(-p.L * (1 - margin), p.L * (1 - margin), n)


def limit_kind(p: ProblemParams) -> str | None:
    if p.l <= LIMIT_WINDOW * p.L:
        return "box"
    if p.L - p.l <= LIMIT_WINDOW * p.L:
        return "single-step"
    return None


def limit_deviation(fac: Factorization, n: int = 1000) -> tuple[str, float] | None:
    """Interior sup-norm distance of V- from the matching limit profile.

    Samples stay 0.01 L away from the csc^2 poles at the box ends.
    """
    p = fac.params
    kind = limit_kind(p)
    if kind is None:
        return None
    x = sample_grid(p, n, margin=1e-2)
    v = partner_potential(x, fac)
    if kind == "box":
        ref = box_partner_potential(x, p.L)
    else:
        ref = single_step_partner_potential(x, p.L, p.g, single_step_ground_level(p.L, p.g))
    return kind, float(np.max(np.abs(v - ref)))


def run_verification(p: ProblemParams, n_levels: int = 4, grid_points: int = 1000,
                     tol: float = 1e-10, oracle_N: int = 2000,
                     pipe: Pipeline | None = None) -> tuple[VerificationReport, Pipeline]:
    """Every identity of the construction, each against its own threshold."""
    n_levels = max(n_levels, 2)
    pipe = pipe or run_pipeline(p, n_levels, tol)
    fac, gs, spec = pipe.fac, pipe.ground, pipe.spectrum
    levels = spec.levels
    rep = VerificationReport("verify")

    for lv in levels:
        for key, r in level_residuals(lv, p.g).items():
            rep.add(f"level[{lv.n}] {key}", r, 1e-12, "spectrum")
        rep.add(f"secular[{lv.n}]", spec.secular_residuals[lv.n], tol, "spectrum")

    for key, r in gs.continuity_residuals().items():
        rep.add(f"ground {key}", r, 1e-10, "ground_state")
    rep.add("ground Im C", gs.matching_residual, 1e-9, "ground_state")

    x = sample_grid(p, grid_points)
    xz = x[np.all([np.abs(x - b) > 1e-9 for b in p.breakpoints], axis=0)]
    psi = np.asarray(gs.psi(xz))
    rep.add("zero_mode", zero_mode_residual(fac, gs, xz) / np.max(np.abs(psi)), 1e-9, "susy")

    xr = safe_grid(p, grid_points, 5e-2 * p.L, 1e-4)
    rep.add("riccati V+", float(np.max(riccati_residual(fac, +1, xr))), 1e-6, "susy")
    rep.add("riccati V-", float(np.max(riccati_residual(fac, -1, xr))), 1e-6, "susy")

    w, wm = superpotential(x, fac), superpotential(-x, fac)
    rep.add("pt W", float(np.max(np.abs(w + np.conj(wm)))), 1e-10, "symmetry")
    v, vm = partner_potential(x, fac), partner_potential(-x, fac)
    rep.add("pt V-", float(np.max(np.abs(v - np.conj(vm)))), 1e-10, "symmetry")

    # a vanishing outer region puts +-l on top of the tanh pole of W; only the
    # origin is a genuine interface then, and the limit check covers the rest
    degenerate = p.L - p.l < DEGENERATE_WIDTH * p.L
    sites = (1,) if degenerate else (0, 1, 2)
    names = ("-l", "0", "+l")
    # jumps are differences of one-sided limits, so they are measured against
    # the size of those limits (csc^2 is large next to a thin outer region)
    bp = np.array(p.breakpoints)
    wsize = np.maximum(1.0, np.abs(superpotential(bp, fac)))
    vsize = np.maximum(max(1.0, p.g), np.abs(partner_potential(bp, fac)))
    jw = superpotential_jumps(fac)
    for i in sites:
        rep.add(f"W continuity {names[i]}", abs(jw[i]) / wsize[i], 1e-8, "continuity")
    jm, jp = potential_jumps(fac), vplus_jumps(fac)
    expected = np.array([1j * p.g, -2j * p.g, 1j * p.g])
    jdw = superpotential_derivative_jumps(fac)
    for i in sites:
        name, scale = names[i], vsize[i]
        rep.add(f"jump V- {name}", abs(jm[i] - expected[i]) / scale, 1e-10, "jumps")
        rep.add(f"jump V- + jump V+ {name}", abs(jm[i] + jp[i]) / scale, 1e-10, "jumps")
        rep.add(f"jump W' - jump V- {name}", abs(jdw[i] - jm[i]) / scale, 1e-10, "jumps")

    for key, r in fac.xr1_residuals.items():
        rep.add(f"x_R1 {key}", r, 1e-10, "x_R1")
    for key, r in constraint_residuals(fac, levels[1:]).items():
        if degenerate and key == "outer_slope":
            continue
        rep.add(key, r, 1e-10, "constraints")

    # 5-point stencil at h = 5e-4 L: a 3-point one at 1e-4 is truncation-limited
    # for large g and roundoff-limited next to a thin outer region
    ode_grid = Grid(3999, p.L)
    vminus = lambda xs: partner_potential(xs, fac)
    for n in range(len(levels) - 1):
        ex = excited_state_plus(p, levels[n + 1])
        pe = partner_eigenfunction(n, fac, ex)
        part = check_matching(pe, fac)
        for c in part.checks:
            rep.add(f"psi-[{n}] {c.name}", c.residual, c.threshold, "partner")
        if n < 2:
            r = ode_residual(pe, levels[n + 1].E, vminus, ode_grid, margin=3,
                             breakpoints=p.breakpoints, order=4)
            rep.add(f"psi-[{n}] ode", r, 1e-5, "partner")
        rep.add(f"psi-[{n}] pt (C- = i)", pt_residual(pe, x), 1e-9, "partner")

    n_iso = min(3, len(levels) - 1)
    if n_iso:
        osp = fd_spectrum(lambda xs: partner_potential(xs, fac) - fac.D0, p, oracle_N,
                          n_iso, extrapolate=True)
        target = np.array([lv.E - fac.D0 for lv in levels[1:n_iso + 1]])
        rel = np.abs(osp.eigenvalues - target) / np.abs(target)
        for n in range(n_iso):
            rep.add(f"isospectral[{n}]", float(rel[n]), 1e-4, "oracle")

    lim = limit_deviation(fac)
    if lim is not None:
        kind, dev = lim
        rep.add(f"limit {kind}", dev, 1e-4, "limits")
    return rep, pipe
