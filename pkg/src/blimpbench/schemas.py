"""JSON Schemas for the HTTP API's response bodies.

Served at ``GET /api/schema`` so clients can validate against the running
service; the test suite validates every response the API produces.
"""

from __future__ import annotations

_vec3 = {"type": "array", "items": {"type": "number"}, "minItems": 3, "maxItems": 3}

CERTIFICATE_SCHEMA = {
    "type": "object",
    "required": ["primitive", "achievable", "witness_thrusts", "directions"],
    "properties": {
        "primitive": {"enum": ["forward", "altitude", "yaw"]},
        "achievable": {"type": "boolean"},
        "witness_thrusts": {
            "anyOf": [{"type": "array", "items": {"type": "number"}}, {"type": "null"}]
        },
        "directions": {"type": "array", "items": {"enum": ["up", "down"]}},
        "servo_deflections": {
            "anyOf": [{"type": "array", "items": {"type": "number"}}, {"type": "null"}]
        },
    },
}

FEASIBILITY_SCHEMA = {
    "type": "object",
    "required": [
        "motion_pass",
        "forward",
        "altitude",
        "yaw",
        "naive_check",
        "envelope_volume_m3",
        "buoyancy_n",
        "payload_mass_kg",
        "payload_ok",
    ],
    "properties": {
        "motion_pass": {"type": "boolean"},
        "forward": CERTIFICATE_SCHEMA,
        "altitude": CERTIFICATE_SCHEMA,
        "yaw": CERTIFICATE_SCHEMA,
        "naive_check": {
            "type": "array",
            "items": {"type": "boolean"},
            "minItems": 3,
            "maxItems": 3,
        },
        "envelope_volume_m3": {"type": "number"},
        "buoyancy_n": {"type": "number"},
        "payload_mass_kg": {"type": "number"},
        "payload_ok": {"type": "boolean"},
        "notes": {"type": "array", "items": {"type": "string"}},
    },
}

PERFORMANCE_SCHEMA = {
    "type": "object",
    "required": ["terminal_drag_n", "v_max_body_ms", "attitude_rad", "net_propulsion_n"],
    "properties": {
        "terminal_drag_n": _vec3,
        "v_max_body_ms": _vec3,
        "attitude_rad": _vec3,
        "net_propulsion_n": _vec3,
        "blocked_axes": {"type": "array", "items": {"enum": ["x", "y", "z"]}},
    },
}

EVALUATION_BUNDLE_SCHEMA = {
    "type": "object",
    "required": ["design_id", "name", "content_hash", "created_at", "feasibility"],
    "properties": {
        "design_id": {"type": "string"},
        "name": {"type": "string"},
        "content_hash": {"type": "string"},
        "created_at": {"type": "number"},
        "feasibility": FEASIBILITY_SCHEMA,
        "performance": {"anyOf": [PERFORMANCE_SCHEMA, {"type": "null"}]},
        "performance_error": {"anyOf": [{"type": "string"}, {"type": "null"}]},
    },
}

DESIGN_LIST_SCHEMA = {
    "type": "object",
    "required": ["designs"],
    "properties": {
        "designs": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "name", "content_hash", "created_at"],
                "properties": {
                    "id": {"type": "string"},
                    "name": {"type": "string"},
                    "content_hash": {"type": "string"},
                    "created_at": {"type": "number"},
                },
            },
        }
    },
}

REMAP_VERDICT_SCHEMA = {
    "type": "object",
    "required": ["command", "stage_before", "stage_after", "done"],
    "properties": {
        "command": {"type": "string"},
        "stage_before": {"type": "string"},
        "stage_after": {"type": "string"},
        "horizontal": {"anyOf": [{"type": "boolean"}, {"type": "null"}]},
        "vertical": {"anyOf": [{"type": "boolean"}, {"type": "null"}]},
        "rotation": {"anyOf": [{"type": "boolean"}, {"type": "null"}]},
        "done": {"type": "boolean"},
    },
}

SESSION_STATE_SCHEMA = {
    "type": "object",
    "required": [
        "session_id",
        "time",
        "position",
        "velocity",
        "speed",
        "speed_h",
        "yaw",
        "yaw_rate",
        "steady",
        "inputs",
        "remap_stage",
    ],
    "properties": {
        "session_id": {"type": "string"},
        "time": {"type": "number"},
        "position": _vec3,
        "velocity": _vec3,
        "speed": {"type": "number"},
        "speed_h": {"type": "number"},
        "yaw": {"type": "number"},
        "yaw_rate": {"type": "number"},
        "roll": {"type": "number"},
        "pitch": {"type": "number"},
        "steady": {"type": "boolean"},
        "inputs": {
            "type": "object",
            "required": ["x", "y", "z", "slider"],
            "properties": {k: {"type": "number"} for k in ("x", "y", "z", "slider")},
        },
        "mapping_command": {"anyOf": [{"type": "string"}, {"type": "null"}]},
        "remap_stage": {"enum": ["init", "horizontal_vertical", "rotation", "done"]},
        "remap_verdicts": {"anyOf": [REMAP_VERDICT_SCHEMA, {"type": "null"}]},
        "error": {"anyOf": [{"type": "string"}, {"type": "null"}]},
    },
}

ERROR_SCHEMA = {
    "type": "object",
    "required": ["errors"],
    "properties": {
        "errors": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["message"],
                "properties": {
                    "path": {"type": "string"},
                    "message": {"type": "string"},
                    "position": {"type": "integer"},
                },
            },
        }
    },
}

ALL_SCHEMAS = {
    "evaluation_bundle": EVALUATION_BUNDLE_SCHEMA,
    "design_list": DESIGN_LIST_SCHEMA,
    "session_state": SESSION_STATE_SCHEMA,
    "remap_verdict": REMAP_VERDICT_SCHEMA,
    "error": ERROR_SCHEMA,
}
