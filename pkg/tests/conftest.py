"""Shared fixtures: toy corpora, bundled data paths, a live test server."""

from __future__ import annotations

import http.client
import json
import threading
import time
from dataclasses import dataclass

import pytest

from kiosk_assistant import bundled_data_path
from kiosk_assistant.classify import DocumentRecord, LabeledCorpus, train_mnb


@pytest.fixture(scope="session")
def toy_corpus() -> LabeledCorpus:
    """The 2-class corpus behind the hand-computed probability checks."""
    return LabeledCorpus(
        records=(
            DocumentRecord(id="1", text="a a b", label="X"),
            DocumentRecord(id="2", text="b c c", label="Y"),
        )
    )


@pytest.fixture(scope="session")
def toy_model(toy_corpus):
    return train_mnb(toy_corpus, alpha=1.0)


@pytest.fixture(scope="session")
def data_dir():
    return bundled_data_path("faq.json").parent


@dataclass
class LiveServer:
    """A uvicorn instance on a private port, driven over real sockets."""

    host: str
    port: int

    def connect(self, timeout: float = 5.0) -> http.client.HTTPConnection:
        return http.client.HTTPConnection(self.host, self.port, timeout=timeout)

    def get_json(self, path: str):
        conn = self.connect()
        try:
            conn.request("GET", path)
            resp = conn.getresponse()
            return resp.status, json.loads(resp.read())
        finally:
            conn.close()

    def post_json(self, path: str, payload: dict):
        conn = self.connect()
        try:
            conn.request(
                "POST",
                path,
                body=json.dumps(payload),
                headers={"Content-Type": "application/json"},
            )
            resp = conn.getresponse()
            return resp.status, json.loads(resp.read())
        finally:
            conn.close()


@pytest.fixture
def run_live_server():
    """Factory that serves an app over HTTP for the duration of a test."""
    import uvicorn

    servers: list[tuple[uvicorn.Server, threading.Thread]] = []

    def start(app) -> LiveServer:
        config = uvicorn.Config(app, host="127.0.0.1", port=0, log_level="warning")
        server = uvicorn.Server(config)
        thread = threading.Thread(target=server.run, daemon=True)
        thread.start()
        deadline = time.monotonic() + 10
        while not server.started:
            if time.monotonic() > deadline:
                raise RuntimeError("test server did not start within 10s")
            time.sleep(0.01)
        servers.append((server, thread))
        port = server.servers[0].sockets[0].getsockname()[1]
        return LiveServer(host="127.0.0.1", port=port)

    yield start

    for server, thread in servers:
        server.should_exit = True
        thread.join(timeout=5)
