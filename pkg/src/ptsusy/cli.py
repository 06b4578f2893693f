"""Command-line front end: ``ptsusy {spectrum,factorize,partner,verify,gc-scan}``.

Exit codes: 0 ok, 1 invalid configuration, 2 PT symmetry broken
(coalescence detected), 3 verification failed.
"""
from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Sequence

import numpy as np

from .core import DomainError, ProblemParams, eval_vplus, level_residuals, make_problem
from .partner import excited_state_plus, partner_eigenfunction
from .report import dumps_csv, dumps_json, envelope
from .spectrum import BracketError, CoalescenceError, critical_coupling, solve_spectrum
from .susy import factorize, partner_potential, potential_jumps, superpotential, vplus_jumps
from .verify import run_verification, sample_grid

EXIT_OK, EXIT_CONFIG, EXIT_BROKEN, EXIT_VERIFY = 0, 1, 2, 3

DEFAULTS = {"n_levels": 4, "grid_points": 1000, "tolerance": 1e-10, "output_format": "json"}
# config-file keys and the RunConfig field each one sets
FILE_KEYS = {"L": "L", "l": "l", "g": "g", "n": "n_levels", "n_levels": "n_levels",
             "grid": "grid_points", "grid_points": "grid_points", "tol": "tolerance",
             "tolerance": "tolerance", "format": "output_format",
             "output_format": "output_format", "out": "output_path",
             "output_path": "output_path"}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    L: float
    l: float
    g: float
    n_levels: int = 4
    grid_points: int = 1000
    tolerance: float = 1e-10
    output_format: str = "json"
    output_path: str | None = None

    def __post_init__(self):
        try:
            make_problem(self.L, self.l, self.g)
        except DomainError as exc:
            raise ConfigError(str(exc)) from None
        if self.n_levels < 1:
            raise ConfigError("n_levels >= 1 violated")
        if self.grid_points < 100:
            raise ConfigError("grid_points >= 100 violated")
        if not (math.isfinite(self.tolerance) and self.tolerance > 0):
            raise ConfigError("tolerance > 0 violated")
        if self.output_format not in ("json", "csv"):
            raise ConfigError("output_format must be json or csv")

    @property
    def params(self) -> ProblemParams:
        return make_problem(self.L, self.l, self.g)


def read_config_file(path: str) -> dict:
    """Flat ``key = value`` file; blank lines and ``#`` comments are ignored."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from None
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in FILE_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        out[FILE_KEYS[key]] = value
    return out


def _coerce(name: str, value):
    if value is None:
        return None
    kinds = {"L": float, "l": float, "g": float, "n_levels": int, "grid_points": int,
             "tolerance": float, "output_format": str, "output_path": str}
    try:
        return kinds[name](value)
    except (TypeError, ValueError):
        raise ConfigError(f"bad value for {name}: {value!r}") from None


def build_config(args: argparse.Namespace, need_g: bool = True) -> RunConfig:
    merged = dict(DEFAULTS)
    if args.config:
        merged.update(read_config_file(args.config))
    flags = {"L": args.L, "l": args.l, "g": args.g, "n_levels": args.n,
             "grid_points": args.grid, "tolerance": args.tol,
             "output_format": args.format, "output_path": args.out}
    merged.update({k: v for k, v in flags.items() if v is not None})
    if not need_g:
        merged.setdefault("g", 0.0)
        merged.setdefault("l", 0.5 * float(merged.get("L", 1.0)))
    values = {f.name: _coerce(f.name, merged.get(f.name)) for f in fields(RunConfig)}
    for name in ("L", "l", "g"):
        if values[name] is None:
            raise ConfigError(f"missing required parameter --{name}")
    return RunConfig(**values)


def emit(cfg: RunConfig, text: str) -> None:
    if cfg.output_path:
        Path(cfg.output_path).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def _params_dict(cfg: RunConfig) -> dict:
    return {"L": cfg.L, "l": cfg.l, "g": cfg.g, "n_levels": cfg.n_levels,
            "grid_points": cfg.grid_points, "tolerance": cfg.tolerance}


def _broken(cfg: RunConfig, command: str, exc: CoalescenceError) -> int:
    results = {"regime": "broken-detected", "broken": True, "message": str(exc),
               "real_roots": exc.real_roots, "contour_count": exc.count}
    if cfg.output_format == "json":
        emit(cfg, dumps_json(envelope(command, _params_dict(cfg), results, {})))
    else:
        emit(cfg, dumps_csv(["n", "E"], [(i, float(e)) for i, e in enumerate(exc.real_roots)],
                            meta={"command": command, "regime": "broken-detected",
                                  "broken": True, "params": _params_dict(cfg)}))
    print(f"PT symmetry broken: {exc}", file=sys.stderr)
    return EXIT_BROKEN


def cmd_spectrum(cfg: RunConfig) -> int:
    p = cfg.params
    try:
        rep = solve_spectrum(p, cfg.n_levels, cfg.tolerance)
    except CoalescenceError as exc:
        return _broken(cfg, "spectrum", exc)
    levels = [lv.as_dict() for lv in rep.levels]
    secular = [float(rep.secular_residuals[lv.n]) for lv in rep.levels]
    algebra = [max(level_residuals(lv, p.g).values()) for lv in rep.levels]
    if cfg.output_format == "json":
        results = {"regime": rep.regime, "broken": False, "levels": levels}
        residuals = {"secular": secular, "level_algebra": algebra}
        emit(cfg, dumps_json(envelope("spectrum", _params_dict(cfg), results, residuals)))
    else:
        rows = [(lv.n, lv.E, lv.k, lv.s, lv.t, r) for lv, r in zip(rep.levels, secular)]
        emit(cfg, dumps_csv(["n", "E", "k", "s", "t", "secular_residual"], rows,
                            meta={"command": "spectrum", "regime": rep.regime,
                                  "broken": False, "params": _params_dict(cfg)}))
    return EXIT_OK


def cmd_factorize(cfg: RunConfig) -> int:
    p = cfg.params
    try:
        rep = solve_spectrum(p, cfg.n_levels, cfg.tolerance)
    except CoalescenceError as exc:
        return _broken(cfg, "factorize", exc)
    fac = factorize(p, rep.levels[0])
    x = sample_grid(p, cfg.grid_points, margin=1e-4)
    w, vm, vp = superpotential(x, fac), partner_potential(x, fac), eval_vplus(x, p)
    header = {"x_R1": fac.x_R1, "D_0": fac.D0, "jumps": list(potential_jumps(fac)),
              "vplus_jumps": list(vplus_jumps(fac)), "jump_sites": list(p.breakpoints)}
    cols = {"x": x, "re_W": w.real, "im_W": w.imag, "re_Vminus": vm.real,
            "im_Vminus": vm.imag, "re_Vplus": vp.real, "im_Vplus": vp.imag}
    if cfg.output_format == "json":
        results = dict(header, samples={k: v.tolist() for k, v in cols.items()})
        emit(cfg, dumps_json(envelope("factorize", _params_dict(cfg), results,
                                      dict(fac.xr1_residuals))))
    else:
        rows = np.column_stack(list(cols.values())).tolist()
        meta = dict(command="factorize", params=_params_dict(cfg), **header)
        emit(cfg, dumps_csv(list(cols), rows, meta=meta))
    return EXIT_OK


def cmd_partner(cfg: RunConfig) -> int:
    """psi-_n for n < n_levels, each scaled to unit sup-norm on the samples."""
    p = cfg.params
    try:
        rep = solve_spectrum(p, cfg.n_levels + 1, cfg.tolerance)
    except CoalescenceError as exc:
        return _broken(cfg, "partner", exc)
    fac = factorize(p, rep.levels[0])
    x = np.linspace(-p.L, p.L, cfg.grid_points)
    cols, energies, residuals = {"x": x}, [], {}
    for n in range(cfg.n_levels):
        level = rep.levels[n + 1]
        pe = partner_eigenfunction(n, fac, excited_state_plus(p, level))
        f = np.asarray(pe(x))
        f = f / np.max(np.abs(f))
        cols[f"re_psi{n}"], cols[f"im_psi{n}"] = f.real, f.imag
        energies.append({"n": n, "E": level.E, "E_minus_E0": level.E - fac.D0})
        residuals[f"psi{n}"] = pe.interface_residuals()
    if cfg.output_format == "json":
        results = {"Cminus": 1j, "energies": energies,
                   "samples": {k: v.tolist() for k, v in cols.items()}}
        emit(cfg, dumps_json(envelope("partner", _params_dict(cfg), results, residuals)))
    else:
        rows = np.column_stack(list(cols.values())).tolist()
        emit(cfg, dumps_csv(list(cols), rows,
                            meta={"command": "partner", "params": _params_dict(cfg),
                                  "Cminus": 1j, "energies": energies}))
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    p = cfg.params
    try:
        report, _ = run_verification(p, n_levels=cfg.n_levels, grid_points=cfg.grid_points,
                                     tol=cfg.tolerance)
    except CoalescenceError as exc:
        return _broken(cfg, "verify", exc)
    checks = [c.as_dict() for c in report.checks]
    if cfg.output_format == "json":
        results = {"passed": report.passed, "n_checks": len(checks),
                   "failures": [c.name for c in report.failures()]}
        emit(cfg, dumps_json(envelope("verify", _params_dict(cfg), results,
                                      {"checks": checks})))
    else:
        rows = [(c.group, c.name, c.residual, c.threshold, str(c.passed).lower())
                for c in report.checks]
        emit(cfg, dumps_csv(["group", "name", "residual", "threshold", "passed"], rows,
                            meta={"command": "verify", "params": _params_dict(cfg),
                                  "passed": report.passed}))
    for line in report.lines():
        if line.startswith("FAIL"):
            print(line, file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_VERIFY


def cmd_gc_scan(cfg: RunConfig, l_list: Sequence[float], g_lo: float, g_hi: float,
                tol: float) -> int:
    rows = []
    for l in l_list:
        try:
            gc, err = critical_coupling(cfg.L, l, g_hi, tol=tol, g_lo=g_lo), ""
        except (BracketError, CoalescenceError) as exc:
            gc, err = None, str(exc)
        rows.append({"l": l, "g_c": gc, "status": "ok" if gc is not None else "error",
                     "error": err})
    found = [r["g_c"] for r in rows if r["g_c"] is not None]
    monotone = bool(np.all(np.diff(found) <= tol)) if len(found) > 1 else True
    params = {"L": cfg.L, "l_list": list(l_list), "g_bracket": [g_lo, g_hi], "tol": tol}
    if cfg.output_format == "json":
        results = {"rows": rows, "g_c_nonincreasing": monotone}
        emit(cfg, dumps_json(envelope("gc-scan", params, results, {})))
    else:
        table = [(r["l"], "" if r["g_c"] is None else r["g_c"], r["status"], r["error"])
                 for r in rows]
        emit(cfg, dumps_csv(["l", "g_c", "status", "error"], table,
                            meta={"command": "gc-scan", "params": params,
                                  "g_c_nonincreasing": monotone}))
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    # usage errors are configuration errors
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _common() -> argparse.ArgumentParser:
    c = _Parser(add_help=False)
    c.add_argument("--L", type=float, help="box half-width")
    c.add_argument("--l", type=float, help="well half-width, 0 < l < L")
    c.add_argument("--g", type=float, help="imaginary step strength, g >= 0")
    c.add_argument("--n", type=int, help="number of levels (default 4)")
    c.add_argument("--grid", type=int, help="sample count (default 1000)")
    c.add_argument("--tol", type=float, help="energy tolerance (default 1e-10)")
    c.add_argument("--format", choices=("json", "csv"), help="output format (default json)")
    c.add_argument("--out", metavar="PATH", help="output file (default stdout)")
    c.add_argument("--config", metavar="PATH", help="key=value file; flags override it")
    return c


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ptsusy", allow_abbrev=False,
                     description="SUSY partner of a PT-symmetric square well in a box.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    common = _common()
    for name, text in (("spectrum", "real levels of H+"),
                       ("factorize", "superpotential and partner potential samples"),
                       ("partner", "partner eigenfunctions"),
                       ("verify", "run every invariant check")):
        sub.add_parser(name, parents=[common], help=text, allow_abbrev=False)
    scan = sub.add_parser("gc-scan", parents=[common], allow_abbrev=False,
                          help="critical coupling for a list of well widths")
    scan.add_argument("--l-list", type=float, nargs="+", required=True, metavar="l")
    scan.add_argument("--g-bracket", type=float, nargs=2, required=True, metavar=("LO", "HI"))
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "gc-scan":
            cfg = build_config(args, need_g=False)
            tol = args.tol if args.tol is not None else 1e-6
            g_lo, g_hi = args.g_bracket
            if not (math.isfinite(tol) and tol > 0):
                raise ConfigError("tol > 0 violated")
            if not (math.isfinite(g_hi) and g_hi > g_lo >= 0):
                raise ConfigError("0 <= LO < HI violated for --g-bracket")
            for l in args.l_list:
                if not (math.isfinite(l) and 0 < l < cfg.L):
                    raise ConfigError(f"0 < l < L violated for l = {l!r}")
            return cmd_gc_scan(cfg, args.l_list, g_lo, g_hi, tol)
        cfg = build_config(args)
    except ConfigError as exc:
        print(f"ptsusy: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    handler = {"spectrum": cmd_spectrum, "factorize": cmd_factorize,
               "partner": cmd_partner, "verify": cmd_verify}[args.command]
    return handler(cfg)


if __name__ == "__main__":
    sys.exit(main())
