from flask import Blueprint, jsonify, request
import logging

from app.api.models import ErrorResponse
from app.services.map_runner import APPLY_MODES, apply_mode
from app.utils.errors import DomainError, GrskError, UsageError

apply_blueprint = Blueprint('apply', __name__)
logger = logging.getLogger(__name__)


@apply_blueprint.route('/apply', methods=['POST'])
def apply():
    """Body: {"mode": ..., "emit": "matrix" | "patterns", "input": <matrix JSON>}"""
    body = request.get_json(silent=True)
    if not isinstance(body, dict) or 'input' not in body:
        error_response = ErrorResponse(error='Bad request', message='Expected a JSON body with an "input" field')
        return jsonify(error_response.to_dict()), 400

    mode = body.get('mode', 'grsk')
    emit = body.get('emit', 'matrix')
    if mode not in APPLY_MODES or emit not in ('matrix', 'patterns'):
        error_response = ErrorResponse(error='Bad request', message=f'Unknown mode {mode!r} or emit {emit!r}')
        return jsonify(error_response.to_dict()), 400

    try:
        return jsonify({'mode': mode, 'emit': emit, 'output': apply_mode(mode, body['input'], emit)})
    except (UsageError, DomainError) as e:
        error_response = ErrorResponse(error=type(e).__name__, message=str(e))
        return jsonify(error_response.to_dict()), 400
    except GrskError as e:
        logger.error(f"apply {mode} failed: {e}")
        error_response = ErrorResponse(error=type(e).__name__, message=str(e))
        return jsonify(error_response.to_dict()), 500
