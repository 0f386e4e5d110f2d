"""Exact and numerical verification tools for free Meixner fields on a discretized space."""

__version__ = "0.1.0"

from .space import DiscreteSpace, StepFunction, StructureError
from .partitions import CapacityError, PreconditionError

__all__ = ["DiscreteSpace", "StepFunction", "StructureError", "CapacityError", "PreconditionError", "__version__"]
