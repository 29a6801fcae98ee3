import json

import jsonschema
import pytest
from fastapi.testclient import TestClient

from blimpbench.api import create_app
from blimpbench.design import design_from_mapping, design_to_mapping
from blimpbench.performance import max_performance
from blimpbench.schemas import (
    DESIGN_LIST_SCHEMA,
    ERROR_SCHEMA,
    EVALUATION_BUNDLE_SCHEMA,
    SESSION_STATE_SCHEMA,
)
from blimpbench.store import content_hash


def design_doc(**overrides):
    doc = {
        "name": "api-quad",
        "balloon": {"shape": "oval", "envelope_2d": [0.55, 0.4], "envelope_mass_g": 30.0},
        "masses": {"electronics_g": 40.0, "support_g": 15.0},
        "drag": {
            "cd_x": 0.4, "cd_y": 0.6, "cd_z": 0.9,
            "csa_yz": 0.12, "csa_xz": 0.16, "csa_xy": 0.25,
        },
        "thrusters": [
            {"id": 1, "position": [0.0, 0.105, 0.0], "orientation": [1, 0, 0], "thrust_range_g": [-15, 15]},
            {"id": 2, "position": [0.1, 0.0, 0.18], "orientation": [0, 0, -1], "thrust_range_g": [-15, 15]},
            {"id": 3, "position": [-0.1, 0.0, 0.18], "orientation": [0, 0, -1], "thrust_range_g": [-15, 15]},
            {"id": 4, "position": [0.0, -0.095, 0.0], "orientation": [1, 0, 0], "thrust_range_g": [-15, 15]},
        ],
    }
    doc.update(overrides)
    return doc


@pytest.fixture()
def client(tmp_path):
    app = create_app(data_dir=tmp_path)
    with TestClient(app) as c:
        yield c
    app.state.sessions.close_all()


def make_session(client, mode="stepped", **extra):
    design_id = client.post("/api/designs", json=design_doc()).json()["design_id"]
    body = {"design_id": design_id, "mode": mode, **extra}
    r = client.post("/api/sim/sessions", json=body)
    assert r.status_code == 201
    return design_id, r.json()["session_id"]


class TestDesigns:
    def test_create_returns_evaluation_bundle(self, client):
        r = client.post("/api/designs", json=design_doc())
        assert r.status_code == 201
        bundle = r.json()
        jsonschema.validate(bundle, EVALUATION_BUNDLE_SCHEMA)
        assert bundle["feasibility"]["motion_pass"] is True
        assert bundle["feasibility"]["payload_ok"] is True
        assert bundle["performance"]["v_max_body_ms"][0] > 0

    def test_negative_payload_is_still_created(self, client):
        doc = design_doc(name="lead-brick")
        doc["masses"]["electronics_g"] = 400.0
        r = client.post("/api/designs", json=doc)
        assert r.status_code == 201
        bundle = r.json()
        assert bundle["feasibility"]["payload_ok"] is False
        assert bundle["feasibility"]["payload_mass_kg"] < 0

    def test_infeasible_design_reports_performance_error(self, client):
        doc = design_doc(name="one-motor")
        doc["thrusters"] = doc["thrusters"][:1]
        bundle = client.post("/api/designs", json=doc).json()
        assert bundle["performance"] is None
        assert "yaw" in bundle["performance_error"]

    def test_list_and_get(self, client):
        created = client.post("/api/designs", json=design_doc()).json()
        listing = client.get("/api/designs").json()
        jsonschema.validate(listing, DESIGN_LIST_SCHEMA)
        assert [d["id"] for d in listing["designs"]] == [created["design_id"]]
        got = client.get(f"/api/designs/{created['design_id']}")
        assert got.status_code == 200
        assert got.json()["design"]["name"] == "api-quad"

    def test_persistence_round_trip_hash(self, client):
        created = client.post("/api/designs", json=design_doc()).json()
        got = client.get(f"/api/designs/{created['design_id']}").json()
        reparsed = design_from_mapping(got["design"])
        assert content_hash(reparsed) == created["content_hash"]
        assert got["content_hash"] == created["content_hash"]

    def test_evaluation_endpoint_matches_create(self, client):
        created = client.post("/api/designs", json=design_doc()).json()
        again = client.get(f"/api/designs/{created['design_id']}/evaluation").json()
        assert again["feasibility"] == created["feasibility"]
        assert again["performance"] == created["performance"]

    def test_api_matches_library_numbers(self, client):
        created = client.post("/api/designs", json=design_doc()).json()
        report = max_performance(design_from_mapping(design_doc()))
        assert created["performance"]["v_max_body_ms"] == list(report.v_max_body)

    def test_unknown_design_404(self, client):
        assert client.get("/api/designs/zzz").status_code == 404
        assert client.get("/api/designs/zzz/evaluation").status_code == 404

    def test_validation_error_carries_path(self, client):
        doc = design_doc()
        doc["thrusters"][0]["orientation"] = [1, 1, 0]
        r = client.post("/api/designs", json=doc)
        assert r.status_code == 422
        body = r.json()
        jsonschema.validate(body, ERROR_SCHEMA)
        assert "nonzero" in body["errors"][0]["message"]

    def test_malformed_json_400(self, client):
        r = client.post(
            "/api/designs", content=b"{nope", headers={"Content-Type": "application/json"}
        )
        assert r.status_code == 400
        jsonschema.validate(r.json(), ERROR_SCHEMA)


class TestSessions:
    def test_create_and_poll(self, client):
        design_id, sid = make_session(client)
        r = client.get(f"/api/sim/sessions/{sid}/state")
        assert r.status_code == 200
        state = r.json()
        jsonschema.validate(state, SESSION_STATE_SCHEMA)
        assert state["design_id"] == design_id
        assert state["time"] == 0.0
        assert state["mapping_command"] == "1F2B3U4DN"

    def test_input_and_step(self, client):
        _, sid = make_session(client)
        r = client.post(
            f"/api/sim/sessions/{sid}/input", json={"x": 0, "y": 1, "z": 0, "slider": 1}
        )
        assert r.status_code == 200
        state = client.post(f"/api/sim/sessions/{sid}/step", json={"n": 200}).json()
        jsonschema.validate(state, SESSION_STATE_SCHEMA)
        assert state["speed"] > 0.1

    def test_input_range_rejected(self, client):
        _, sid = make_session(client)
        r = client.post(
            f"/api/sim/sessions/{sid}/input", json={"x": 3, "y": 0, "z": 0, "slider": 1}
        )
        assert r.status_code == 422

    def test_remap_sequence_with_scrambled_plant(self, client):
        _, sid = make_session(client, plant={"polarity": {"4": -1}})
        verdicts = []
        for cmd in ("1F2B3U4DN", "1F2U3U4BC1L4R", "1F2U3U4BC4L1R"):
            r = client.post(f"/api/sim/sessions/{sid}/remap", json={"command": cmd})
            assert r.status_code == 200
            verdicts.append(r.json())
        assert verdicts[0]["stage_after"] == "horizontal_vertical"
        assert verdicts[1]["horizontal"] and verdicts[1]["vertical"]
        assert verdicts[2] == {
            **verdicts[2],
            "horizontal": True,
            "vertical": True,
            "rotation": True,
            "done": True,
        }
        assert verdicts[2]["parsed"]["rotation"] == {"left": 4, "right": 1}

    def test_remap_error_carries_position(self, client):
        _, sid = make_session(client)
        r = client.post(f"/api/sim/sessions/{sid}/remap", json={"command": "1F2B3U"})
        assert r.status_code == 422
        body = r.json()
        assert body["errors"][0]["position"] == 7

    def test_remap_after_done_conflicts(self, client):
        _, sid = make_session(client, plant={"polarity": {"4": -1}})
        for cmd in ("1F2B3U4DN", "1F2U3U4BC1L4R", "1F2U3U4BC4L1R"):
            client.post(f"/api/sim/sessions/{sid}/remap", json={"command": cmd})
        r = client.post(f"/api/sim/sessions/{sid}/remap", json={"command": "1F2B3U4DN"})
        assert r.status_code == 409

    def test_delete(self, client):
        _, sid = make_session(client)
        assert client.delete(f"/api/sim/sessions/{sid}").status_code == 204
        assert client.get(f"/api/sim/sessions/{sid}/state").status_code == 404
        assert client.delete(f"/api/sim/sessions/{sid}").status_code == 404

    def test_unknown_design_for_session(self, client):
        r = client.post("/api/sim/sessions", json={"design_id": "zzz"})
        assert r.status_code == 404

    def test_step_in_realtime_mode_conflicts(self, client):
        _, sid = make_session(client, mode="realtime")
        r = client.post(f"/api/sim/sessions/{sid}/step", json={"n": 1})
        assert r.status_code == 409
        client.delete(f"/api/sim/sessions/{sid}")

    def test_bad_sim_config_rejected(self, client):
        design_id = client.post("/api/designs", json=design_doc()).json()["design_id"]
        r = client.post(
            "/api/sim/sessions",
            json={"design_id": design_id, "config": {"dt": 5.0}},
        )
        assert r.status_code == 422


class TestFuzz:
    BODIES = [
        b"",
        b"null",
        b"[]",
        b'"asdf"',
        b"123",
        b'{"name": 3}',
        b'{"thrusters": "many"}',
        b'{"balloon": {"shape": "blob"}}',
        b'{"balloon": {"shape": "sphere", "envelope_2d": [1e400, 1]}}',
        b'{"design_id": {"a": [1, 2]}}',
        b'{"command": 12}',
        b'{"x": "left", "slider": []}',
        b'{"n": -3}',
        json.dumps({"a": [{"b": None}] * 40}).encode(),
        b'{"name": "' + b"A" * 5000 + b'"}',
    ]

    def test_fuzzed_bodies_never_crash(self, client):
        design_id, sid = make_session(client)
        paths = [
            "/api/designs",
            "/api/sim/sessions",
            f"/api/sim/sessions/{sid}/input",
            f"/api/sim/sessions/{sid}/step",
            f"/api/sim/sessions/{sid}/remap",
        ]
        for path in paths:
            for body in self.BODIES:
                r = client.post(
                    path, content=body, headers={"Content-Type": "application/json"}
                )
                assert r.status_code in (400, 404, 409, 422), (path, body, r.status_code)
                jsonschema.validate(r.json(), ERROR_SCHEMA)


def test_design_document_mapping_round_trip():
    design = design_from_mapping(design_doc())
    assert design_from_mapping(design_to_mapping(design)) == design
