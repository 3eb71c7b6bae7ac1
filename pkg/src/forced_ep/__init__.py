"""Structure-preserving integrators for forced Euler-Poincare systems on SO(3)."""

from .errors import (ConfigError, DomainError, NonConvergence, ParameterError,
                     SingularJacobian, UnknownTableau)
from .so3 import CAYLEY, EXP, get_retraction
from .systems import (ForcedEPSystem, RigidBodyParams, free_rigid_body,
                      lie_poisson_rhs, reconstruct, relaxed_rigid_body,
                      rigid_body_llg)

__all__ = [
    "ConfigError", "DomainError", "NonConvergence", "ParameterError",
    "SingularJacobian", "UnknownTableau", "CAYLEY", "EXP", "get_retraction",
    "ForcedEPSystem", "RigidBodyParams", "free_rigid_body", "lie_poisson_rhs",
    "reconstruct", "relaxed_rigid_body", "rigid_body_llg",
]
