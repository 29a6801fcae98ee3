"""HTTP/JSON service: design evaluation, simulator sessions, remapping.

Error contract: malformed JSON bodies give 400, unknown ids give 404,
validation problems give 422 with machine-readable ``errors`` entries
(``path`` dotted into the offending field, ``position`` for command-string
errors), protocol misuse gives 409.  All bodies are JSON; the response
shapes are published at ``GET /api/schema``.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles

from .design import DesignError, DesignSpec, design_from_mapping, design_to_mapping
from .feasibility import evaluate_design
from .mapping import CommandError, PlantWiring, RemapError
from .performance import FeasibilityFailure, max_performance
from .reporting import (
    command_to_dict,
    feasibility_to_dict,
    performance_to_dict,
    verdict_to_dict,
    view_to_dict,
)
from .schemas import ALL_SCHEMAS
from .simulator import SessionManager, SimConfig
from .store import DesignStore, StoredDesign

__all__ = ["create_app"]


def _error_response(status: int, errors: list[dict[str, Any]]) -> JSONResponse:
    return JSONResponse(status_code=status, content={"errors": errors})


def _not_found(what: str, key: str) -> JSONResponse:
    return _error_response(404, [{"message": f"unknown {what} {key!r}"}])


async def _json_body(request: Request) -> Any:
    raw = await request.body()
    if not raw:
        raise json.JSONDecodeError("empty body", "", 0)
    return json.loads(raw)


def _evaluation_bundle(record: StoredDesign, design: DesignSpec) -> dict[str, Any]:
    feasibility = evaluate_design(design)
    performance = None
    performance_error = None
    try:
        performance = performance_to_dict(max_performance(design))
    except FeasibilityFailure as exc:
        performance_error = str(exc)
    return {
        "design_id": record.id,
        "name": record.name,
        "content_hash": record.content_hash,
        "created_at": record.created_at,
        "feasibility": feasibility_to_dict(feasibility),
        "performance": performance,
        "performance_error": performance_error,
    }


def _parse_plant(body: dict) -> PlantWiring | None:
    plant = body.get("plant")
    if plant is None:
        return None
    if not isinstance(plant, dict):
        raise DesignError("expected a table", "plant")
    try:
        channel_map = {int(k): int(v) for k, v in plant.get("channel_map", {}).items()}
        polarity = {int(k): int(v) for k, v in plant.get("polarity", {}).items()}
        servo_sign = int(plant.get("servo_sign", 1))
        return PlantWiring(channel_map=channel_map, polarity=polarity, servo_sign=servo_sign)
    except (TypeError, ValueError) as exc:
        raise DesignError(str(exc), "plant") from exc


def _parse_sim_config(body: dict) -> SimConfig:
    cfg = body.get("config", {})
    if not isinstance(cfg, dict):
        raise DesignError("expected a table", "config")
    allowed = {
        "dt",
        "integrator",
        "yaw_inertia",
        "yaw_drag_coeff",
        "steady_state_window",
        "steady_state_eps",
    }
    unknown = set(cfg) - allowed
    if unknown:
        raise DesignError(f"unknown config keys {sorted(unknown)}", "config")
    try:
        return SimConfig(**cfg)
    except (TypeError, ValueError) as exc:
        raise DesignError(str(exc), "config") from exc


def create_app(
    data_dir: Path | str | None = None,
    frontend_dir: Path | str | None = None,
) -> FastAPI:
    app = FastAPI(title="blimpbench", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    store = DesignStore(data_dir)
    sessions = SessionManager()
    session_designs: dict[str, str] = {}
    app.state.store = store
    app.state.sessions = sessions

    @app.exception_handler(json.JSONDecodeError)
    async def _bad_json(request: Request, exc: json.JSONDecodeError):
        return _error_response(400, [{"message": f"malformed JSON body: {exc}"}])

    @app.exception_handler(DesignError)
    async def _design_error(request: Request, exc: DesignError):
        return _error_response(422, [{"path": exc.path, "message": exc.message}])

    @app.exception_handler(CommandError)
    async def _command_error(request: Request, exc: CommandError):
        return _error_response(
            422, [{"message": exc.message, "position": exc.position}]
        )

    @app.exception_handler(RemapError)
    async def _remap_error(request: Request, exc: RemapError):
        return _error_response(409, [{"message": str(exc)}])

    @app.exception_handler(ValueError)
    async def _value_error(request: Request, exc: ValueError):
        return _error_response(422, [{"message": str(exc)}])

    @app.get("/api/schema")
    async def get_schema():
        return ALL_SCHEMAS

    # -- designs ------------------------------------------------------------

    @app.post("/api/designs", status_code=201)
    async def create_design(request: Request):
        body = await _json_body(request)
        if not isinstance(body, dict):
            raise DesignError("design document must be a JSON object", "")
        design = design_from_mapping(body)
        record = store.save(design)
        return _evaluation_bundle(record, design)

    @app.get("/api/designs")
    async def list_designs():
        return {"designs": [r.to_dict() for r in store.list()]}

    @app.get("/api/designs/{design_id}")
    async def get_design(design_id: str):
        try:
            record, design = store.get(design_id)
        except KeyError:
            return _not_found("design", design_id)
        return {**record.to_dict(), "design": design_to_mapping(design)}

    @app.get("/api/designs/{design_id}/evaluation")
    async def get_evaluation(design_id: str):
        try:
            record, design = store.get(design_id)
        except KeyError:
            return _not_found("design", design_id)
        return _evaluation_bundle(record, design)

    # -- simulator sessions ---------------------------------------------------

    @app.post("/api/sim/sessions", status_code=201)
    async def create_session(request: Request):
        body = await _json_body(request)
        if not isinstance(body, dict) or not isinstance(body.get("design_id"), str):
            raise DesignError("missing string key 'design_id'", "design_id")
        design_id = body["design_id"]
        try:
            _, design = store.get(design_id)
        except KeyError:
            return _not_found("design", design_id)
        mode = body.get("mode", "realtime")
        payload = body.get("payload_kg")
        if payload is not None and (
            isinstance(payload, bool) or not isinstance(payload, (int, float))
        ):
            raise DesignError("expected a number", "payload_kg")
        session_id = sessions.create_session(
            design,
            _parse_sim_config(body),
            mode=mode,
            wiring=_parse_plant(body),
            carried_payload=payload,
        )
        session_designs[session_id] = design_id
        return {"session_id": session_id, "design_id": design_id, "mode": mode}

    @app.get("/api/sim/sessions/{session_id}/state")
    async def session_state(session_id: str):
        try:
            view = sessions.session_state(session_id)
        except KeyError:
            return _not_found("session", session_id)
        return {**view_to_dict(view), "design_id": session_designs.get(session_id)}

    @app.post("/api/sim/sessions/{session_id}/input")
    async def session_input(session_id: str, request: Request):
        body = await _json_body(request)
        if not isinstance(body, dict):
            raise DesignError("expected a JSON object", "")
        values = {}
        for key, default in (("x", 0.0), ("y", 0.0), ("z", 0.0), ("slider", 0.0)):
            v = body.get(key, default)
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise DesignError("expected a number", key)
            values[key] = float(v)
        try:
            sessions.session_input(session_id, **values)
        except KeyError:
            return _not_found("session", session_id)
        return {"ok": True}

    @app.post("/api/sim/sessions/{session_id}/step")
    async def session_step(session_id: str, request: Request):
        body = await _json_body(request)
        n = body.get("n", 1) if isinstance(body, dict) else 1
        if isinstance(n, bool) or not isinstance(n, int):
            raise DesignError("expected an integer", "n")
        try:
            session = sessions.get(session_id)
        except KeyError:
            return _not_found("session", session_id)
        try:
            view = session.step_n(n)
        except RuntimeError as exc:
            return _error_response(409, [{"message": str(exc)}])
        return {**view_to_dict(view), "design_id": session_designs.get(session_id)}

    @app.post("/api/sim/sessions/{session_id}/remap")
    async def session_remap(session_id: str, request: Request):
        body = await _json_body(request)
        if not isinstance(body, dict) or not isinstance(body.get("command"), str):
            raise DesignError("missing string key 'command'", "command")
        try:
            session = sessions.get(session_id)
        except KeyError:
            return _not_found("session", session_id)
        verdict = session.submit_remap(body["command"])
        return {
            **verdict_to_dict(verdict),
            "parsed": command_to_dict(session.remap.command),
        }

    @app.delete("/api/sim/sessions/{session_id}", status_code=204)
    async def delete_session(session_id: str):
        try:
            sessions.delete(session_id)
        except KeyError:
            return _not_found("session", session_id)
        return Response(status_code=204)

    if frontend_dir is not None and Path(frontend_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(frontend_dir), html=True), name="ui")

    return app
