from flask import Blueprint, Response, current_app, jsonify

from ..services import reporting, verification
from .params import choice_arg, int_arg

table_bp = Blueprint("table", __name__, url_prefix="/api")


@table_bp.route("/table", methods=["GET"])
def table():
    """
    GET /api/table?max_n=19&samples=1000000&seed=1&format=json

    even and odd sub-tables; MST cells above exact_mst_max are Monte Carlo
    estimates and carry approx=true. csv / text come back as plain text
    """
    config = current_app.config
    max_n = int_arg("max_n", 19, minimum=2)
    exact_mst_max = int_arg("exact_mst_max", config["EXACT_MST_MAX"], minimum=1)
    fmt = choice_arg("format", reporting.FORMATS, "json")
    result = reporting.build_table(
        max_n=max_n,
        samples=int_arg("samples", config["DEFAULT_SAMPLES"], minimum=1),
        seed=int_arg("seed", config["DEFAULT_SEED"], minimum=0, maximum=2 ** 64 - 1),
        exact_mst_max=exact_mst_max,
        workers=config["WORKERS"],
        extension_limit=config["EXTENSION_LIMIT"],
    )
    if fmt != "json":
        mimetype = "text/csv" if fmt == "csv" else "text/plain"
        return Response(reporting.render_table(result, fmt), mimetype=mimetype)
    return jsonify({
        "success": True,
        "data": {parity: [row.to_dict() for row in rows] for parity, rows in result.items()}
    })


@table_bp.route("/verify", methods=["GET"])
def verify():
    """
    GET /api/verify?max_n=8&samples=0

    always 200 once the suites ran; check data.passed
    """
    config = current_app.config
    report = verification.run_verification(
        max_n=int_arg("max_n", 8, minimum=1),
        samples=int_arg("samples", config["VERIFY_SAMPLES"], minimum=0),
        seed=int_arg("seed", config["DEFAULT_SEED"], minimum=0, maximum=2 ** 64 - 1),
        workers=config["WORKERS"],
    )
    return jsonify({
        "success": True,
        "data": report.to_dict()
    })
