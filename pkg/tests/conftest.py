"""Shared fixtures: tiny datasets, trained toy models, a live HTTP server."""

import socket
import threading
import time

import numpy as np
import pytest
import requests
import uvicorn

from fieldtriage.mlp import TrainConfig, mlp_init, mlp_train
from fieldtriage.preprocess import (apply_normalization, feature_matrix,
                                    fit_normalization, label_vector,
                                    train_test_split)
from fieldtriage.records import MAIN_FEATURES, TriageRecord, VitalSigns
from fieldtriage.server import VictimRegistry
from fieldtriage.synthesize import synthesize
from fieldtriage.tree import tree_fit
from fieldtriage.webapp import create_app


def make_record(temperature=98.6, heart_rate=75.0, resp_rate=16.0, o2_sat=98.0,
                sbp=120.0, dbp=80.0, pain=None, acuity=5, chief_complaint=None):
    return TriageRecord(
        vitals=VitalSigns(temperature=temperature, heart_rate=heart_rate,
                          resp_rate=resp_rate, o2_sat=o2_sat, sbp=sbp, dbp=dbp,
                          pain=pain),
        acuity=acuity, chief_complaint=chief_complaint)


def make_report_dict(report_id="r1-v01", victim_id="v01", robot_id="r1",
                     lat=40.0, lon=-105.0, acuity=3, timestamp_ms=1000,
                     probabilities=None, sensor_fault=False):
    return {
        "report_id": report_id, "victim_id": victim_id, "robot_id": robot_id,
        "lat": lat, "lon": lon,
        "vitals": {"temperature": 98.6, "heart_rate": 75.0, "resp_rate": 16.0,
                   "o2_sat": 98.0, "sbp": 120.0, "dbp": 80.0, "pain": 0},
        "acuity": acuity,
        "probabilities": probabilities if probabilities is not None
        else [0.1, 0.1, 0.4, 0.2, 0.2],
        "timestamp_ms": timestamp_ms, "sensor_fault": sensor_fault,
    }


@pytest.fixture(scope="session")
def small_dataset():
    """3,000 synthetic records split 80:20 — enough signal to train on fast."""
    records = synthesize(3000, seed=11)
    return train_test_split(records, 0.8, seed=11)


@pytest.fixture(scope="session")
def trained_mlp(small_dataset):
    train, _ = small_dataset
    norm = fit_normalization(train, MAIN_FEATURES)
    inputs = apply_normalization(feature_matrix(train, MAIN_FEATURES), norm)
    model = mlp_init(len(MAIN_FEATURES), (64, 64, 32, 32, 16, 16, 8), seed=7)
    model.normalization = norm
    model, _ = mlp_train(model, inputs, label_vector(train),
                         TrainConfig(epochs=30, seed=7))
    return model


@pytest.fixture(scope="session")
def trained_tree(small_dataset):
    train, _ = small_dataset
    return tree_fit(feature_matrix(train, MAIN_FEATURES), label_vector(train),
                    features=MAIN_FEATURES)


class LiveServer:
    def __init__(self, registry, base_url, server):
        self.registry = registry
        self.base_url = base_url
        self._server = server

    def stop(self):
        self._server.should_exit = True


def start_server(registry: VictimRegistry, keepalive_s: float = 0.5,
                 static_dir=None) -> LiveServer:
    app = create_app(registry, static_dir=static_dir, keepalive_s=keepalive_s)
    sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    sock.bind(("127.0.0.1", 0))
    port = sock.getsockname()[1]
    server = uvicorn.Server(uvicorn.Config(app, log_level="warning"))
    thread = threading.Thread(target=server.run, kwargs={"sockets": [sock]},
                              daemon=True)
    thread.start()
    base_url = f"http://127.0.0.1:{port}"
    deadline = time.time() + 10
    while time.time() < deadline:
        try:
            requests.get(base_url + "/api/victims", timeout=1)
            break
        except requests.RequestException:
            time.sleep(0.02)
    else:
        raise RuntimeError("test server did not come up")
    return LiveServer(registry, base_url, server)


@pytest.fixture
def live_server():
    server = start_server(VictimRegistry())
    yield server
    server.stop()
