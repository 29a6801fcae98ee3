"""Report serialization shared by the CLI and the HTTP API.

Keeping one formatting path guarantees the two surfaces emit identical
numbers for identical designs.
"""

from __future__ import annotations

from typing import Any

from .feasibility import FeasibilityReport, PrimitiveCertificate
from .mapping import DcRotation, MappingCommand, RemapVerdict, ServoRotation
from .performance import PerformanceReport
from .simulator import SessionView


def num(value: float) -> str:
    """Canonical human-facing number format: 6 significant digits."""
    return f"{value:.6g}"


def certificate_to_dict(cert: PrimitiveCertificate) -> dict[str, Any]:
    return {
        "primitive": cert.primitive,
        "achievable": cert.achievable,
        "witness_thrusts": list(cert.witness_thrusts) if cert.witness_thrusts else None,
        "directions": list(cert.directions),
        "servo_deflections": (
            list(cert.servo_deflections) if cert.servo_deflections else None
        ),
    }


def feasibility_to_dict(report: FeasibilityReport) -> dict[str, Any]:
    return {
        "motion_pass": report.motion_pass,
        "forward": certificate_to_dict(report.forward),
        "altitude": certificate_to_dict(report.altitude),
        "yaw": certificate_to_dict(report.yaw),
        "naive_check": list(report.naive_check),
        "envelope_volume_m3": report.envelope_volume,
        "buoyancy_n": report.buoyancy,
        "payload_mass_kg": report.payload_mass,
        "payload_ok": report.payload_ok,
        "notes": list(report.notes),
    }


def performance_to_dict(report: PerformanceReport) -> dict[str, Any]:
    return {
        "terminal_drag_n": list(report.terminal_drag),
        "v_max_body_ms": list(report.v_max_body),
        "attitude_rad": list(report.attitude_used),
        "net_propulsion_n": list(report.net_propulsion),
        "blocked_axes": list(report.blocked_axes),
    }


def command_to_dict(command: MappingCommand | None) -> dict[str, Any] | None:
    if command is None:
        return None
    out: dict[str, Any] = {
        "channels": {str(ch): role for ch, role in command.channel_roles},
        "mode": command.mode,
    }
    if isinstance(command.rotation, DcRotation):
        out["rotation"] = {"left": command.rotation.left, "right": command.rotation.right}
    elif isinstance(command.rotation, ServoRotation):
        out["rotation"] = {
            "servo_a": command.rotation.servo_a,
            "servo_b": command.rotation.servo_b,
            "order": command.rotation.order,
        }
    else:
        out["rotation"] = None
    return out


def format_command(command: MappingCommand) -> str:
    """Key-value text dump of a parsed command (CLI remap-parse output)."""
    lines = [f"channel.{ch} = {role}" for ch, role in command.channel_roles]
    lines.append(f"mode = {command.mode}")
    if isinstance(command.rotation, DcRotation):
        lines.append(f"rotation.left = {command.rotation.left}")
        lines.append(f"rotation.right = {command.rotation.right}")
    elif isinstance(command.rotation, ServoRotation):
        lines.append(f"rotation.servo_a = {command.rotation.servo_a}")
        lines.append(f"rotation.servo_b = {command.rotation.servo_b}")
        lines.append(f"rotation.order = {command.rotation.order}")
    return "\n".join(lines)


def verdict_to_dict(verdict: RemapVerdict | None) -> dict[str, Any] | None:
    if verdict is None:
        return None
    return {
        "command": verdict.command,
        "stage_before": verdict.stage_before,
        "stage_after": verdict.stage_after,
        "horizontal": verdict.horizontal,
        "vertical": verdict.vertical,
        "rotation": verdict.rotation,
        "done": verdict.done,
    }


def view_to_dict(view: SessionView) -> dict[str, Any]:
    s = view.state
    x, y, z, slider = view.inputs
    return {
        "session_id": view.session_id,
        "time": s.time,
        "position": list(s.position),
        "velocity": list(s.velocity),
        "speed": s.speed,
        "speed_h": s.speed_h,
        "yaw": s.yaw,
        "yaw_rate": s.yaw_rate,
        "roll": s.roll,
        "pitch": s.pitch,
        "steady": view.steady,
        "inputs": {"x": x, "y": y, "z": z, "slider": slider},
        "mapping_command": view.command,
        "remap_stage": view.stage,
        "remap_verdicts": verdict_to_dict(view.verdicts),
        "error": view.error,
    }


# ---------------------------------------------------------------------------
# Text rendering for the CLI

def _mark(ok: bool) -> str:
    return "yes" if ok else "no"


def format_feasibility(report: FeasibilityReport) -> str:
    lines = [f"motion: {'PASS' if report.motion_pass else 'FAIL'}"]
    for cert in report.primitives:
        status = "achievable" if cert.achievable else "unachievable"
        extra = ""
        if cert.primitive == "altitude" and cert.directions:
            extra = f" ({','.join(cert.directions)})"
        if cert.servo_deflections:
            extra += " [servo-vectored]"
        lines.append(f"  {cert.primitive:<8} {status}{extra}")
    nx, nz, nmz = report.naive_check
    lines.append(
        f"naive check: Fx!=0 {_mark(nx)}, Fz!=0 {_mark(nz)}, Mz!=0 {_mark(nmz)}"
    )
    lines.append(
        f"payload: {'OK' if report.payload_ok else 'NEGATIVE'} "
        f"({num(report.payload_mass)} kg)"
    )
    return "\n".join(lines)


def format_payload(report: FeasibilityReport) -> str:
    return "\n".join(
        [
            f"envelope volume: {num(report.envelope_volume)} m^3",
            f"buoyancy:        {num(report.buoyancy)} N",
            f"payload mass:    {num(report.payload_mass)} kg",
            f"payload check:   {'OK' if report.payload_ok else 'NEGATIVE'}",
        ]
    )


def format_performance(report: PerformanceReport) -> str:
    dx, dy, dz = report.terminal_drag
    vx, vy, vz = report.v_max_body
    fx, fy, fz = report.net_propulsion
    lines = [
        f"net propulsion [N]:   x={num(fx)} y={num(fy)} z={num(fz)}",
        f"terminal drag [N]:    x={num(dx)} y={num(dy)} z={num(dz)}",
        f"v_max body [m/s]:     x={num(vx)} y={num(vy)} z={num(vz)}",
    ]
    if report.blocked_axes:
        lines.append(f"blocked axes:         {','.join(report.blocked_axes)}")
    return "\n".join(lines)
