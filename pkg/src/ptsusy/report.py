"""Verification reports and deterministic JSON / CSV serialization."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

from . import __version__


@dataclass
class Check:
    name: str
    residual: float
    threshold: float
    passed: bool
    group: str = ""

    def as_dict(self) -> dict:
        return {"name": self.name, "group": self.group, "residual": self.residual,
                "threshold": self.threshold, "passed": self.passed}


@dataclass
class VerificationReport:
    title: str = ""
    checks: list[Check] = field(default_factory=list)

    def add(self, name: str, residual: float, threshold: float, group: str = "") -> Check:
        residual = float(residual)
        ok = math.isfinite(residual) and residual < threshold
        c = Check(name, residual, float(threshold), ok, group or self.title)
        self.checks.append(c)
        return c

    def extend(self, other: VerificationReport) -> None:
        self.checks.extend(other.checks)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def lines(self) -> list[str]:
        return [f"{'PASS' if c.passed else 'FAIL'} {c.group}/{c.name}: "
                f"{c.residual:.3e} < {c.threshold:.1e}" for c in self.checks]


def to_jsonable(obj: Any) -> Any:
    """Complex numbers become [re, im]; numpy scalars and arrays become Python."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else repr(f)
    return obj


def envelope(command: str, params: dict, results: dict, residuals: dict) -> dict:
    return {
        "params": params,
        "results": results,
        "residuals": residuals,
        "provenance": {"program": "ptsusy", "version": __version__, "command": command},
    }


def dumps_json(payload: dict) -> str:
    # repr-based floats: shortest string that round-trips, at most 17 digits
    return json.dumps(to_jsonable(payload), indent=2, ensure_ascii=False) + "\n"


def format_float(x: float) -> str:
    return repr(float(x))


def dumps_csv(header: Sequence[str], rows: Iterable[Sequence[Any]],
              meta: dict | None = None) -> str:
    """CSV text with optional leading ``# key=value`` metadata lines."""
    buf = io.StringIO()
    if meta:
        for key, value in meta.items():
            buf.write(f"# {key}={json.dumps(to_jsonable(value))}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format_float(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def read_csv(text: str) -> tuple[dict, list[str], list[list[str]]]:
    """Inverse of ``dumps_csv``: (meta, header, rows)."""
    meta, body = {}, []
    for line in text.splitlines():
        if line.startswith("# ") and "=" in line and not body:
            key, value = line[2:].split("=", 1)
            meta[key] = json.loads(value)
        else:
            body.append(line)
    rows = list(csv.reader(body))
    return meta, rows[0], rows[1:]
