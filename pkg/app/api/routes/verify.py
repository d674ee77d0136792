from flask import Blueprint, jsonify, request
import logging

from app.api.models import ErrorResponse
from app.config.settings import config
from app.services.verification import run_suite
from app.utils.errors import UsageError

verify_blueprint = Blueprint('verify', __name__)
logger = logging.getLogger(__name__)


@verify_blueprint.route('/verify/<suite>', methods=['GET'])
def verify(suite):
    trials = request.args.get('trials', type=int)
    seed = request.args.get('seed', type=int)
    max_trials = config.get_api_config().get('max_trials', 200)
    if trials is not None and not 1 <= trials <= max_trials:
        error_response = ErrorResponse(error='Bad request', message=f'trials must lie in 1..{max_trials}')
        return jsonify(error_response.to_dict()), 400

    try:
        report = run_suite(suite, trials=trials, seed=seed)
    except UsageError as e:
        error_response = ErrorResponse(error='Bad request', message=str(e), detail={'suite': suite})
        return jsonify(error_response.to_dict()), 400
    logger.info(f"GET /verify/{suite}: passed={report.passed}")
    return jsonify(report.to_dict())
