"""Steady-state performance estimation.

At terminal velocity the acceleration is zero, so the drag on each body axis
must balance the net propulsion plus the rotated buoyancy/weight imbalance.
Inverting the quadratic drag law then gives the per-axis maximum speed:

    v = sqrt(2 f / (rho * C_D * A))

The extracted z drag is reported ascent-positive: a positive z entry means
the vehicle rises at terminal speed, a negative entry means the thrust (or
weight imbalance) drives it downward and no ascent speed exists.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .design import DesignSpec
from .feasibility import (
    DEFAULT_TOLERANCE,
    PrimitiveCertificate,
    buoyancy,
    check_primitive,
    envelope_volume,
    net_wrench,
    total_mass,
)

__all__ = [
    "PerformanceReport",
    "FeasibilityFailure",
    "rotation_matrix",
    "drag_force",
    "terminal_drag",
    "terminal_velocity",
    "max_performance",
]

_AXES = ("x", "y", "z")


class FeasibilityFailure(RuntimeError):
    """Raised when performance is requested for an infeasible design."""

    def __init__(self, failed: Sequence[str]):
        super().__init__(f"design fails motion primitives: {', '.join(failed)}")
        self.failed = tuple(failed)


@dataclass(frozen=True)
class PerformanceReport:
    """Per-axis terminal figures in the body frame.

    ``terminal_drag`` is the extracted steady-state drag (z ascent-positive);
    ``v_max_body`` entries are speeds, zero whenever the matching drag entry
    is not positive, with the axis then listed in ``blocked_axes``.
    """

    terminal_drag: tuple[float, float, float]
    v_max_body: tuple[float, float, float]
    attitude_used: tuple[float, float, float]
    net_propulsion: tuple[float, float, float]
    blocked_axes: tuple[str, ...] = ()


def rotation_matrix(roll: float, pitch: float, yaw: float) -> np.ndarray:
    """World-from-body rotation for ZYX Euler angles (z-down frames)."""
    cr, sr = math.cos(roll), math.sin(roll)
    cp, sp = math.cos(pitch), math.sin(pitch)
    cy, sy = math.cos(yaw), math.sin(yaw)
    rx = np.array([[1, 0, 0], [0, cr, -sr], [0, sr, cr]])
    ry = np.array([[cp, 0, sp], [0, 1, 0], [-sp, 0, cp]])
    rz = np.array([[cy, -sy, 0], [sy, cy, 0], [0, 0, 1]])
    return rz @ ry @ rx


def drag_force(cd: float, csa: float, air_density: float, speed: float) -> float:
    """Quadratic drag magnitude 0.5 * rho * v^2 * C_D * A."""
    if not (cd > 0 and csa > 0 and air_density > 0):
        raise ValueError("cd, csa and air density must be positive")
    return 0.5 * air_density * speed * speed * cd * csa


def terminal_drag(
    design: DesignSpec,
    thrusts: Sequence[float],
    attitude: tuple[float, float, float] = (0.0, 0.0, 0.0),
    carried_payload: float | None = None,
) -> tuple[float, float, float]:
    """Steady-state drag per body axis for a fixed thrust assignment.

    Balances propulsion against the body-frame projection of the
    weight/buoyancy imbalance; the z component is flipped to the
    ascent-positive convention described in the module docstring.
    ``carried_payload=None`` assumes neutral ballast.
    """
    force = net_wrench(design.thrusters, thrusts).force
    volume = envelope_volume(design.balloon)
    lift = buoyancy(design.env, volume)
    mass = total_mass(design, carried_payload)
    r_bw = rotation_matrix(*attitude).T
    imbalance = np.array([0.0, 0.0, lift - mass * design.env.gravity])
    d = force - r_bw @ imbalance
    return (float(d[0]), float(d[1]), float(-d[2]))


def terminal_velocity(
    design: DesignSpec,
    thrusts: Sequence[float],
    attitude: tuple[float, float, float] = (0.0, 0.0, 0.0),
    carried_payload: float | None = None,
) -> PerformanceReport:
    """Terminal speed per body axis for a fixed thrust assignment."""
    drag = terminal_drag(design, thrusts, attitude, carried_payload)
    rho = design.env.air_density
    v = []
    blocked = []
    for axis in range(3):
        cd, csa = design.drag.axis_pair(axis)
        if drag[axis] > 0.0:
            v.append(math.sqrt(2.0 * drag[axis] / (rho * cd * csa)))
        else:
            v.append(0.0)
            if drag[axis] < -1e-12:
                blocked.append(_AXES[axis])
    force = net_wrench(design.thrusters, thrusts).force
    return PerformanceReport(
        terminal_drag=drag,
        v_max_body=(v[0], v[1], v[2]),
        attitude_used=attitude,
        net_propulsion=(float(force[0]), float(force[1]), float(force[2])),
        blocked_axes=tuple(blocked),
    )


def max_performance(design: DesignSpec, tol: float = DEFAULT_TOLERANCE) -> PerformanceReport:
    """Best-case terminal speeds for a feasible, neutrally ballasted design.

    The horizontal figure evaluates the forward-primitive witness (which
    maximizes forward force under the decoupling constraints); the vertical
    figure evaluates the altitude witness, preferring the ascent direction.
    x/y columns of the report come from the forward evaluation, the z column
    from the vertical one; attitude is level flight.

    Raises :class:`FeasibilityFailure` if any motion primitive is
    unachievable.
    """
    certs: dict[str, PrimitiveCertificate] = {
        p: check_primitive(design.thrusters, p, tol) for p in ("forward", "altitude", "yaw")
    }
    failed = [p for p, c in certs.items() if not c.achievable]
    if failed:
        raise FeasibilityFailure(failed)

    fwd = terminal_velocity(design, certs["forward"].witness_thrusts)
    alt = terminal_velocity(design, certs["altitude"].witness_thrusts)
    blocked = tuple(
        a for a in _AXES if a in (fwd.blocked_axes if a != "z" else alt.blocked_axes)
    )
    return PerformanceReport(
        terminal_drag=(fwd.terminal_drag[0], fwd.terminal_drag[1], alt.terminal_drag[2]),
        v_max_body=(fwd.v_max_body[0], fwd.v_max_body[1], alt.v_max_body[2]),
        attitude_used=(0.0, 0.0, 0.0),
        net_propulsion=(
            fwd.net_propulsion[0],
            fwd.net_propulsion[1],
            alt.net_propulsion[2],
        ),
        blocked_axes=blocked,
    )
