# params.py
# query-string parsing shared by the blueprints; bad values raise InvalidArgumentError (-> 400)
from flask import request

from ..errors import InvalidArgumentError


def int_arg(name, default=None, minimum=None, maximum=None):
    raw = request.args.get(name, default)
    if raw is None:
        raise InvalidArgumentError(f"'{name}' parameter is required")
    try:
        value = int(raw)
    except (TypeError, ValueError):
        raise InvalidArgumentError(f"{name} must be an integer")
    if minimum is not None and value < minimum:
        raise InvalidArgumentError(f"{name} must be at least {minimum}")
    if maximum is not None and value > maximum:
        raise InvalidArgumentError(f"{name} must be at most {maximum}")
    return value


def choice_arg(name, allowed, default):
    value = request.args.get(name, default).strip().lower()
    if value not in allowed:
        raise InvalidArgumentError(f"{name} must be one of {', '.join(allowed)}")
    return value
