"""Exact finite-dimensional multiplier Hopf algebroids: integrals, modular data and duality."""

from .exactlin import Gaussian, Matrix, format_scalar, parse_scalar
from .algebra import Functional, StructureAlgebra
from .algebroid import AlgebroidData, CheckResult, HopfAlgebroid, VerificationReport, verify_axioms
from .integration import BaseWeight, MeasuredData, verify_integration
from .duality import DualMeasured, bidual_isomorphism, dual_measured, verify_duality
from .groupoid_models import FiniteGroupoid, UnitMeasure, verify_groupoid
from .crossed_models import CoupledActionData, FiniteHopfAlgebra, function_hopf, group_hopf, verify_crossed
from .registry import ALL_CHECKS, GROUPS

__all__ = [
    "Gaussian", "Matrix", "format_scalar", "parse_scalar",
    "Functional", "StructureAlgebra",
    "AlgebroidData", "CheckResult", "HopfAlgebroid", "VerificationReport", "verify_axioms",
    "BaseWeight", "MeasuredData", "verify_integration",
    "DualMeasured", "bidual_isomorphism", "dual_measured", "verify_duality",
    "FiniteGroupoid", "UnitMeasure", "verify_groupoid",
    "CoupledActionData", "FiniteHopfAlgebra", "function_hopf", "group_hopf", "verify_crossed",
    "ALL_CHECKS", "GROUPS",
]
__version__ = "0.1.0"
