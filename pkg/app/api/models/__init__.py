"""
API Models package
"""
from .weight_matrix import WeightMatrix
from .pattern import Pattern, PatternPair
from .symmetric_matrix import SymmetricWeightMatrix
from .triangular_array import TriangularArray
from .check_report import CheckReport, CheckResult
from .mc_report import McReport, McProbe, KsResult
from .params import MeasureParams, QuadratureSpec
from .health_response import HealthResponse
from .error_response import ErrorResponse

__all__ = [
    'WeightMatrix',
    'Pattern',
    'PatternPair',
    'SymmetricWeightMatrix',
    'TriangularArray',
    'CheckReport',
    'CheckResult',
    'McReport',
    'McProbe',
    'KsResult',
    'MeasureParams',
    'QuadratureSpec',
    'HealthResponse',
    'ErrorResponse'
]
