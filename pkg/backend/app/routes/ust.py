from flask import Blueprint, jsonify, request

from ..services import exact_sequences, reporting
from .params import int_arg

ust_bp = Blueprint("ust", __name__, url_prefix="/api/ust")


@ust_bp.route("/exact", methods=["GET"])
def ust_exact():
    """
    GET /api/ust/exact?n=2..19

    one row per n: T_n, S_n, reduced ratio, the unreduced S_n/T_n pair and 6 decimals
    """
    ns = reporting.parse_n_range(request.args.get("n", "2..19"))
    return jsonify({
        "success": True,
        "data": reporting.ust_exact_rows(ns)
    })


@ust_bp.route("/limits", methods=["GET"])
def ust_limits():
    """GET /api/ust/limits?max_n=19"""
    max_n = int_arg("max_n", 19, minimum=1, maximum=1000)
    return jsonify({
        "success": True,
        "data": reporting.limits_report(max_n)
    })


@ust_bp.route("/terms", methods=["GET"])
def ust_terms():
    # the pieces S_n is summed from, with their multipliers
    n = int_arg("n", minimum=2)
    report = reporting.terms_report(n)
    report["check"] = report["sum"] == str(exact_sequences.balanced_count(n))
    return jsonify({
        "success": True,
        "data": report
    })
