"""Two-species electro-energy-reaction-diffusion system in one dimension.

A finite-volume simulator for electrons, holes and internal energy coupled
to a Neumann Poisson problem, together with the entropy functionals,
explicit decay constants and randomized checks of the functional
inequalities that bound the relative entropy by the entropy production.
"""

__version__ = "0.1.0"

from .constants import (  # noqa: E402
    EEPConstants,
    HypothesisConstants,
    compute_C1,
    compute_C2,
    compute_C3,
    compute_eep_constants,
    compute_hypothesis_constants,
    compute_K_constants,
)
from .equilibrium import Equilibrium, compute_equilibrium, equilibrium_state, verify_equilibrium  # noqa: E402
from .grid import Grid  # noqa: E402
from .model import (  # noqa: E402
    SRH,
    ConstantRate,
    LogEntropy,
    ModelFunctions,
    PowerEntropy,
    PowerWeight,
    check_hypotheses,
)
from .poisson import solve_poisson  # noqa: E402
from .state import Bounds, State, check_admissible, derive_fields  # noqa: E402

__all__ = [
    "Bounds",
    "ConstantRate",
    "EEPConstants",
    "Equilibrium",
    "Grid",
    "HypothesisConstants",
    "LogEntropy",
    "ModelFunctions",
    "PowerEntropy",
    "PowerWeight",
    "SRH",
    "State",
    "check_admissible",
    "check_hypotheses",
    "compute_C1",
    "compute_C2",
    "compute_C3",
    "compute_K_constants",
    "compute_eep_constants",
    "compute_equilibrium",
    "compute_hypothesis_constants",
    "derive_fields",
    "equilibrium_state",
    "solve_poisson",
    "verify_equilibrium",
]
