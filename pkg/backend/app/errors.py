# errors.py
# exception types shared by services, routes and the cli
from flask import jsonify
from werkzeug.exceptions import HTTPException


class GridBalanceError(Exception):
    """base class for everything this app raises on purpose"""


class InvalidArgumentError(GridBalanceError, ValueError):
    """bad input: n out of range, odd vertex count, not a spanning tree, ..."""


class ResourceLimitError(GridBalanceError):
    """
    a configured cap would be exceeded (enumeration cap, extension limit,
    permutation cap). limit_name / limit_value say which one.
    """

    def __init__(self, message, limit_name=None, limit_value=None):
        super().__init__(message)
        self.limit_name = limit_name
        self.limit_value = limit_value


class ComputationError(GridBalanceError, ArithmeticError):
    """an exact-arithmetic invariant broke, which means a bug not bad input"""


class VerificationFailure(GridBalanceError):
    def __init__(self, failed):
        self.failed = list(failed)
        super().__init__("verification failed: " + ", ".join(self.failed))


def _error_body(e, status):
    return jsonify({"success": False, "error": str(e)}), status


def register_error_handlers(app):
    # same {"success": False, "error": ...} shape the routes always returned
    @app.errorhandler(InvalidArgumentError)
    def handle_invalid(e):
        return _error_body(e, 400)

    @app.errorhandler(ResourceLimitError)
    def handle_limit(e):
        return _error_body(e, 413)

    @app.errorhandler(ComputationError)
    def handle_computation(e):
        app.logger.exception("arithmetic invariant violated")
        return _error_body(e, 500)

    @app.errorhandler(Exception)
    def handle_unexpected(e):
        # 404 / 405 keep flask's own responses
        if isinstance(e, HTTPException):
            return e
        app.logger.exception("unhandled error")
        return _error_body(e, 500)

    return app
