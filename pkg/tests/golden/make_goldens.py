"""Regenerate goldens.json from the finite-difference oracle only.

    python tests/golden/make_goldens.py

Nothing here touches the transfer-matrix solver, so the frozen numbers are
independent of the code they are later compared against.
"""
from pathlib import Path

from ptsusy.core import ProblemParams
from ptsusy.oracle import golden_coupling_record, golden_spectrum_record, save_goldens

HERE = Path(__file__).parent
SPECTRA = [(1.0, 0.5, 1.0), (1.0, 0.5, 2.0), (1.0, 0.25, 2.0)]
# (L, l, N, g_lo, g_hi)
COUPLINGS = [(1.0, 0.5, 2000, 6.0, 7.0), (1.0, 1.0 - 1e-9, 2000, 4.0, 5.0)]


def main() -> None:
    spectra = [golden_spectrum_record(ProblemParams(*t), N=2000, n_levels=3) for t in SPECTRA]
    couplings = [golden_coupling_record(*c) for c in COUPLINGS]
    save_goldens(HERE / "goldens.json", spectra, couplings)


if __name__ == "__main__":
    main()
