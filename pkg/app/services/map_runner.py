"""
Runs one of the maps on parsed JSON input; shared by the CLI and the HTTP route
"""
import logging
from typing import Any, Dict

from app.api.models import PatternPair, SymmetricWeightMatrix, TriangularArray, WeightMatrix
from app.services import grsk_core, grsk_symmetric, grsk_triangular, tropical_rsk
from app.utils.errors import UsageError

logger = logging.getLogger(__name__)

APPLY_MODES = ("grsk", "grsk-inverse", "sym", "tri", "tropical", "tropical-inverse")
FORWARD_ONLY_EMIT = ("grsk-inverse", "tropical-inverse", "tri")


def _load_matrix(data: Any) -> WeightMatrix:
    if isinstance(data, list):
        data = {'entries': data}
    if isinstance(data, dict) and 'P' in data and 'Q' in data:
        pair = PatternPair.from_dict(data)
        return grsk_core.matrix_from_patterns(pair.P, pair.Q)
    if not isinstance(data, dict):
        raise UsageError("Expected a matrix object or a list of rows")
    return WeightMatrix.from_dict(data)


def _load_symmetric(data: Any) -> SymmetricWeightMatrix:
    if isinstance(data, dict) and 'upper' in data:
        return SymmetricWeightMatrix.from_dict(data)
    matrix = _load_matrix(data)
    if not matrix.is_symmetric():
        raise UsageError("sym mode needs a symmetric matrix")
    return SymmetricWeightMatrix.from_full(matrix)


def _load_triangular(data: Any) -> TriangularArray:
    if isinstance(data, list):
        data = {'rows': data}
    if not isinstance(data, dict):
        raise UsageError("Expected a triangular array object or a list of rows")
    return TriangularArray.from_dict(data)


def apply_mode(mode: str, data: Any, emit: str = "matrix") -> Dict[str, Any]:
    """Run one map on parsed JSON input and return the JSON-ready result"""
    if emit == "patterns" and mode in FORWARD_ONLY_EMIT:
        raise UsageError(f"Pattern output is not available for mode {mode}")
    logger.debug(f"Applying {mode}, emitting {emit}")
    if mode == "grsk":
        result = grsk_core.apply_grsk(_load_matrix(data))
    elif mode == "grsk-inverse":
        return grsk_core.invert_grsk(_load_matrix(data)).to_dict()
    elif mode == "sym":
        out = grsk_symmetric.apply_grsk_symmetric(_load_symmetric(data))
        if emit == "patterns":
            return grsk_core.patterns_from_matrix(out.to_full()).to_dict()
        return out.to_dict()
    elif mode == "tri":
        return grsk_triangular.apply_grsk_triangular(_load_triangular(data)).to_dict()
    elif mode == "tropical":
        result = tropical_rsk.apply_tropical(_load_matrix(data))
    elif mode == "tropical-inverse":
        return tropical_rsk.invert_tropical(_load_matrix(data)).to_dict()
    else:
        raise UsageError(f"Unknown mode '{mode}'")

    if emit == "patterns":
        return grsk_core.patterns_from_matrix(result).to_dict()
    return result.to_dict()
