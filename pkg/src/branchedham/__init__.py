"""Branched (multi-valued) Hamiltonian models, classical and quantum.

Subpackages:

* specfun      Lambert W branches, the scaled exponential integral G(p),
               adaptive quadrature, finite differences.
* models       gaussian / odd-root family / SUSY model definitions.
* classical    per-branch trajectory integration with cusp switching,
               orbit classification, energy contours.
* quantum      half-line momentum-space shooting eigensolver, SUSY ladder,
               boundary-term diagnostics.
* deformation  the one-parameter isospectral deformation family.
* cli          command-line front end emitting CSV/JSON/SVG.
"""

from .errors import (BelowThresholdError, BranchedHamError, BranchMismatchError,
                     ConvergenceError, DegenerateInputError, DomainError,
                     EmptyDatasetError, NoOrbitError, NoSignChangeError,
                     SingularInputError, StepFailureError, ValidationError,
                     ZeroEnergyError)
from .models import (SUSY_C, BranchId, FamilyModel, GaussianModel, Potential,
                     family_hamiltonian, family_momentum, family_velocity,
                     gaussian_cusps, gaussian_hamiltonian, gaussian_momentum,
                     gaussian_velocity, model_from_config, susy_energy,
                     susy_model)
from .specfun import WBranch, fd_derivative, lambert_w, quad, scaled_g

__version__ = "0.1.0"

__all__ = [
    "BelowThresholdError", "BranchedHamError", "BranchMismatchError",
    "ConvergenceError", "DegenerateInputError", "DomainError",
    "EmptyDatasetError", "NoOrbitError", "NoSignChangeError",
    "SingularInputError", "StepFailureError", "ValidationError",
    "ZeroEnergyError",
    "SUSY_C", "BranchId", "FamilyModel", "GaussianModel", "Potential",
    "family_hamiltonian", "family_momentum", "family_velocity",
    "gaussian_cusps", "gaussian_hamiltonian", "gaussian_momentum",
    "gaussian_velocity", "model_from_config", "susy_energy", "susy_model",
    "WBranch", "fd_derivative", "lambert_w", "quad", "scaled_g",
    "__version__",
]
