"""SUSY partner of a PT-symmetric square well with imaginary antisymmetric strength in a box."""

__version__ = "0.1.0"

from .core import (DomainError, EnergyLevel, ProblemParams, Region, decompose_kappa,  # noqa: E402
                   eval_vplus, make_level, make_problem)
from .spectrum import (BracketError, CoalescenceError, SpectrumReport,  # noqa: E402
                       critical_coupling, secular_function, solve_spectrum)
from .susy import (Factorization, GroundStatePlus, factorize, ground_state_plus,  # noqa: E402
                   partner_potential, potential_jumps, solve_xr1, superpotential,
                   zero_mode_residual)
from .partner import (ExcitedStatePlus, PartnerEigenfunction, check_matching,  # noqa: E402
                      excited_state_plus, partner_eigenfunction)

__all__ = [
    "BracketError", "CoalescenceError", "DomainError", "EnergyLevel", "ExcitedStatePlus",
    "Factorization", "GroundStatePlus", "PartnerEigenfunction", "ProblemParams", "Region",
    "SpectrumReport", "check_matching", "critical_coupling", "decompose_kappa", "eval_vplus",
    "excited_state_plus", "factorize", "ground_state_plus", "make_level", "make_problem",
    "partner_eigenfunction", "partner_potential", "potential_jumps", "secular_function",
    "solve_spectrum", "solve_xr1", "superpotential", "zero_mode_residual",
]
