from flask import Blueprint, jsonify
import platform

import numpy as np
import psutil
import scipy

from app import __version__
from app.api.models import HealthResponse, ErrorResponse
from app.config.settings import config

health_blueprint = Blueprint('health', __name__)


@health_blueprint.route('/health', methods=['GET'])
def health():
    try:
        memory = psutil.virtual_memory()
        system_info = {
            'python': platform.python_version(),
            'cpu_count': psutil.cpu_count(logical=True),
            'threads': config.get_threads(),
            'memory_available_mb': memory.available // (1024 * 1024),
            'numpy': np.__version__,
            'scipy': scipy.__version__,
        }
        health_response = HealthResponse(
            status='healthy',
            version=__version__,
            system_info=system_info,
            services={
                'apply': True,
                'verify': True,
                'threads_within_cpu_count': config.validate_processing()
            }
        )
        return jsonify(health_response.to_dict())
    except Exception as e:
        error_response = ErrorResponse(error='unhealthy', message=str(e))
        return jsonify(error_response.to_dict()), 500
