from flask import Blueprint, current_app, jsonify

from ..services import random_sampling
from ..services.grid_model import build_grid
from .params import choice_arg, int_arg

sampling_bp = Blueprint("sampling", __name__, url_prefix="/api/sample")


def _sampling_args():
    config = current_app.config
    samples = int_arg("samples", config["DEFAULT_SAMPLES"], minimum=1)
    seed = int_arg("seed", config["DEFAULT_SEED"], minimum=0, maximum=2 ** 64 - 1)
    return samples, seed


@sampling_bp.route("", methods=["GET"])
def sample():
    """GET /api/sample?n=6&dist=mst&samples=100000&seed=7"""
    n = int_arg("n", minimum=1)
    dist = choice_arg("dist", random_sampling.DISTRIBUTIONS, "mst")
    samples, seed = _sampling_args()
    summary = random_sampling.estimate_balance_probability(
        build_grid(n), dist, samples, seed, workers=current_app.config["WORKERS"]
    )
    return jsonify({
        "success": True,
        "data": summary.to_dict()
    })


@sampling_bp.route("/compare", methods=["GET"])
def compare():
    """
    GET /api/sample/compare?n=10&samples=100000&seed=7

    MST estimate tested against the exact UST probability
    (tail "greater" for even n, "less" for odd n)
    """
    n = int_arg("n", minimum=1)
    samples, seed = _sampling_args()
    result = random_sampling.compare_mst_to_ust(n, samples, seed, workers=current_app.config["WORKERS"])
    return jsonify({
        "success": True,
        "data": result
    })
