import pytest

from backend.app import create_app


@pytest.fixture
def app():
    app = create_app({
        "TESTING": True,
        "LOG_LEVEL": "WARNING",
        # small enough that api / cli tests finish in seconds
        "DEFAULT_SAMPLES": 2000,
        "DEFAULT_SEED": 11,
        "VERIFY_SAMPLES": 0,
    })
    yield app


@pytest.fixture
def client(app):
    return app.test_client()


@pytest.fixture
def runner(app):
    return app.test_cli_runner()
