from __future__ import annotations

import threading

import pytest

from geoatlas import kml, server


@pytest.fixture(scope="session")
def ede_path():
    return server.BUNDLED_DATA_PATH


@pytest.fixture(scope="session")
def legacy_path():
    return server.PACKAGE_DIR / "data" / "attri_legacy.xml"


@pytest.fixture(scope="session")
def ede_document(ede_path):
    document, issues = kml.load_document(ede_path, server.BUNDLED_PARSE_OPTIONS)
    assert issues == []
    return document


@pytest.fixture(scope="session")
def app(ede_path):
    return server.Application(ede_path, server.BUNDLED_PARSE_OPTIONS)


@pytest.fixture(scope="session")
def live_server(app):
    srv = server.create_server(app, host="127.0.0.1", port=0)
    thread = threading.Thread(target=srv.serve_forever, daemon=True)
    thread.start()
    try:
        yield f"http://127.0.0.1:{srv.server_address[1]}"
    finally:
        srv.shutdown()
        srv.server_close()
