from flask import Blueprint, current_app, jsonify, request

from ..errors import InvalidArgumentError
from ..services import exact_mst, reporting
from ..services.exact_sequences import format_fraction
from ..services.grid_model import build_grid, parse_tree
from .params import choice_arg, int_arg

mst_bp = Blueprint("mst", __name__, url_prefix="/api/mst")


@mst_bp.route("/exact", methods=["GET"])
def mst_exact():
    """
    GET /api/mst/exact?n=4&method=auto

    method: extensions | bruteforce | auto
    413 when the request would pass one of the configured caps
    """
    n = int_arg("n", minimum=1)
    method = choice_arg("method", exact_mst.METHODS + ("auto",), "auto")
    config = current_app.config
    if n > 6:
        current_app.logger.warning("exact MST requested for n=%d, this can take minutes", n)
    row = reporting.mst_exact_row(
        n, method=method,
        limit=config["EXTENSION_LIMIT"],
        permutation_cap=config["PERMUTATION_CAP"],
        enumeration_cap=config["ENUMERATION_CAP"],
    )
    return jsonify({
        "success": True,
        "data": row
    })


@mst_bp.route("/tree", methods=["GET"])
def mst_tree():
    """
    GET /api/mst/tree?n=3&tree=0,1,2,3,5

    probability that Kruskal on a random edge order returns this tree,
    with the ordering constraints it was counted from
    """
    n = int_arg("n", minimum=1)
    text = request.args.get("tree")
    if not text:
        raise InvalidArgumentError("'tree' parameter is required (comma-separated edge ids)")
    graph = build_grid(n)
    tree = parse_tree(graph, text)
    poset = exact_mst.fundamental_cycle_poset(graph, tree)
    probability = exact_mst.mst_tree_probability(graph, tree, limit=current_app.config["EXTENSION_LIMIT"])
    return jsonify({
        "success": True,
        "data": {
            "n": n,
            "tree": tree.serialize(),
            "probability": reporting.fraction_text(probability),
            "probability_6dp": format_fraction(probability, 6),
            "poset": poset.to_dict(),
        }
    })
