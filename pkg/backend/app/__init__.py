#flask extension that handles CORS (cross-origin resource sharing)
#CORS controls which frontends are allowed to talk to your backend
from flask import Flask, jsonify
from flask_cors import CORS

from .errors import register_error_handlers

DEFAULT_CONFIG = {
    "DEFAULT_SAMPLES": 1_000_000,
    "DEFAULT_SEED": 20240601,
    "EXACT_MST_MAX": 5,
    "EXTENSION_LIMIT": 22,
    "PERMUTATION_CAP": 4_000_000,
    "ENUMERATION_CAP": 1_000_000,
    "WORKERS": 1,
    "VERIFY_SAMPLES": 1_000_000,
    "LOG_LEVEL": "INFO",
    "SHOW_PROGRESS": False,
}


#this function is called in run.py, cli.py and the test fixtures
def create_app(test_config=None):
    app = Flask(__name__)

    app.config.from_mapping(DEFAULT_CONFIG)
    # GRIDBALANCE_WORKERS=8 etc. (values are parsed as json, so numbers stay numbers)
    app.config.from_prefixed_env("GRIDBALANCE")
    if test_config:
        app.config.from_mapping(test_config)

    # app.logger is "backend.app", every services logger propagates into it
    app.logger.setLevel(str(app.config["LOG_LEVEL"]).upper())

    CORS(app, resources={r"/api/*": {"origins": "*"}})
    #allowing any frontend to access any backend point (used * )

    register_blueprints(app)
    register_error_handlers(app)

    @app.route("/api/health", methods=["GET"])
    def health_check():
        return jsonify({"status": "ok"})

    return app


#A Blueprint is a way to group related routes, logic, and files together in Flask
def register_blueprints(app: Flask):
    from .routes.ust import ust_bp
    from .routes.mst import mst_bp
    from .routes.sampling import sampling_bp
    from .routes.table import table_bp

    # tell Flask to use those routes
    app.register_blueprint(ust_bp)
    app.register_blueprint(mst_bp)
    app.register_blueprint(sampling_bp)
    app.register_blueprint(table_bp)
    return app
