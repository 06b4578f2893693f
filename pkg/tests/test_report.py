import json
import math

import numpy as np

from ptsusy.report import (VerificationReport, dumps_csv, dumps_json, envelope, read_csv,
                           to_jsonable)


def test_to_jsonable():
    obj = {"z": 1 + 2j, "a": np.array([1.5, 2.0]), "n": np.int64(3), "b": np.bool_(True),
           "inf": math.inf, "t": (np.float64(0.1),)}
    out = to_jsonable(obj)
    assert out == {"z": [1.0, 2.0], "a": [1.5, 2.0], "n": 3, "b": True, "inf": "inf",
                   "t": [0.1]}


def test_float_round_trip():
    x = 0.1 + 0.2
    text = dumps_json(envelope("t", {}, {"x": x}, {}))
    assert json.loads(text)["results"]["x"] == x
    assert not any(line.endswith(" ") for line in text.splitlines())
    assert json.loads(text)["provenance"]["program"] == "ptsusy"


def test_csv_round_trip():
    text = dumps_csv(["a", "b"], [(1, 0.5), (2, 1 / 3)], meta={"k": [1 + 1j], "s": "x"})
    meta, header, rows = read_csv(text)
    assert meta == {"k": [[1.0, 1.0]], "s": "x"}
    assert header == ["a", "b"]
    assert float(rows[1][1]) == 1 / 3
    assert text.endswith("\n") and "\r" not in text


def test_report_bookkeeping():
    rep = VerificationReport("t")
    rep.add("ok", 1e-12, 1e-10)
    rep.add("bad", 1e-3, 1e-10)
    rep.add("nan", math.nan, 1.0)
    assert not rep.passed
    assert [c.name for c in rep.failures()] == ["bad", "nan"]
    assert rep["ok"].passed
    assert rep.lines()[0].startswith("PASS t/ok")
