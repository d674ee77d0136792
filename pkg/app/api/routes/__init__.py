from flask import Blueprint
from .apply import apply_blueprint
from .health import health_blueprint
from .verify import verify_blueprint

api_blueprint = Blueprint('api', __name__)

api_blueprint.register_blueprint(apply_blueprint)
api_blueprint.register_blueprint(verify_blueprint)
api_blueprint.register_blueprint(health_blueprint)
