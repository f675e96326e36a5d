"""Lie-Taylor series, majorants and holomorphic extension on matrix Lie groups."""

from .errors import (ContinuationDiverged, DomainError, InvalidArgument, LieTaylorError, NotFound, OutOfChart,
                     Refusal, ResampleError, UnsupportedMethod)
from .groups import GroupModel, GroupMorphism, exp_group, get_morphism, log_group, registry_get
from .fields import BlackBoxField, RepresentativeField, SupEnvelope, builtin_field, primitive_field
from .derive import DerivMethod, enumerate_multiindices, lie_derivative, taylor_data
from .taylor import (InequalityReport, TaylorData, majorant_coefficients, majorant_eval, seminorm_q,
                     shift_taylor_data, taylor_eval)
from .paths import GroupPath
from .riemann import MetricModel, distance_upper_bound
from .extend import continue_along_path, extend_value, holomorphic_shadow, steiner_chain
from .laurent import laurent_coefficients, laurent_extend

__version__ = "0.1.0"

__all__ = [
    "ContinuationDiverged", "DomainError", "InvalidArgument", "LieTaylorError", "NotFound", "OutOfChart", "Refusal",
    "ResampleError", "UnsupportedMethod", "GroupModel", "GroupMorphism", "exp_group", "get_morphism", "log_group",
    "registry_get", "BlackBoxField", "RepresentativeField", "SupEnvelope", "builtin_field", "primitive_field",
    "DerivMethod", "enumerate_multiindices", "lie_derivative", "taylor_data", "InequalityReport", "TaylorData",
    "majorant_coefficients", "majorant_eval", "seminorm_q", "shift_taylor_data", "taylor_eval", "GroupPath",
    "MetricModel", "distance_upper_bound", "continue_along_path", "extend_value", "holomorphic_shadow",
    "steiner_chain", "laurent_coefficients", "laurent_extend",
]
