"""Feasibility checks for a blimp design.

Two families of checks:

  * Motion primitives — can the thruster set sustain forward flight, change
    altitude and yaw in place?  Decided as a linear program over box-bounded
    per-channel thrusts with zero-coupling constraints, which returns a
    witness thrust vector when achievable.  A literal componentwise check of
    the net wrench at full forward duty is computed alongside for reference.

  * Payload — does the inflated envelope displace enough air to lift the
    structure?  Envelope volume comes from the measured inflated semi-axes
    when available, otherwise from a surface-area-preserving inflation of
    the deflated 2D envelope (Mylar stretches very little, so the flat
    envelope's area survives inflation nearly unchanged).

Body frame is x forward, y right, z down: an upward force has negative z.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import linprog

from .design import BalloonSpec, DesignSpec, EnvironmentConstants, MassBudget, ThrusterSpec

__all__ = [
    "Wrench",
    "PrimitiveCertificate",
    "FeasibilityReport",
    "EnvelopeError",
    "PRIMITIVES",
    "DEFAULT_TOLERANCE",
    "DEFAULT_SERVO_DEFLECTION",
    "net_wrench",
    "naive_motion_check",
    "check_primitive",
    "evaluate_design",
    "rotate_axis_about_z",
    "ellipsoid_surface_area",
    "envelope_volume",
    "deflated_radius_for_sphere",
    "buoyancy",
    "payload_mass",
    "total_mass",
    "volume_percent_error",
]

PRIMITIVES = ("forward", "altitude", "yaw")

DEFAULT_TOLERANCE = 1e-6  # N for forces, N*m for moments
DEFAULT_SERVO_DEFLECTION = math.radians(60.0)

# Exponent of the Thomsen closed-form approximation to the surface area of a
# general ellipsoid (relative error below 1.1% over all aspect ratios).
_THOMSEN_P = 1.6075

_NAIVE_NONZERO = 1e-9


class EnvelopeError(ValueError):
    """Envelope volume could not be computed (degenerate geometry)."""


class Wrench(NamedTuple):
    """Net force (N) and moment (N*m) about the body origin."""

    force: np.ndarray
    moment: np.ndarray


@dataclass(frozen=True)
class PrimitiveCertificate:
    """Verdict for one motion primitive.

    When achievable, ``witness_thrusts`` holds per-channel thrusts (ordered
    as the design's thruster list) that realize the primitive.  For the
    altitude primitive, ``directions`` lists which of "up"/"down" are
    reachable.  A yaw primitive realized by vectoring servo-mounted
    thrusters records the per-thruster deflection angles used.
    """

    primitive: str
    achievable: bool
    witness_thrusts: tuple[float, ...] | None = None
    directions: tuple[str, ...] = ()
    servo_deflections: tuple[float, ...] | None = None


@dataclass(frozen=True)
class FeasibilityReport:
    forward: PrimitiveCertificate
    altitude: PrimitiveCertificate
    yaw: PrimitiveCertificate
    naive_check: tuple[bool, bool, bool]
    envelope_volume: float
    buoyancy: float
    payload_mass: float
    payload_ok: bool
    notes: tuple[str, ...] = ()

    @property
    def primitives(self) -> tuple[PrimitiveCertificate, PrimitiveCertificate, PrimitiveCertificate]:
        return (self.forward, self.altitude, self.yaw)

    @property
    def motion_pass(self) -> bool:
        return all(c.achievable for c in self.primitives)


# ---------------------------------------------------------------------------
# Net wrench

def _orientation_matrix(
    thrusters: Sequence[ThrusterSpec],
    deflections: Sequence[float] | None = None,
) -> np.ndarray:
    """Per-thruster unit thrust axes as an (n, 3) array.

    ``deflections`` rotates each axis about body z (servo vectoring); entries
    for thrusters without a vectoring servo should be zero.
    """
    K = np.array([t.orientation for t in thrusters], dtype=float)
    if deflections is not None:
        for i, angle in enumerate(deflections):
            if angle:
                K[i] = rotate_axis_about_z(K[i], angle)
    return K


def rotate_axis_about_z(axis: Sequence[float], angle: float) -> np.ndarray:
    """Rotate a body-frame vector about the z axis by ``angle`` radians."""
    c, s = math.cos(angle), math.sin(angle)
    x, y, z = axis
    return np.array([c * x - s * y, s * x + c * y, z])


def _wrench_matrices(
    thrusters: Sequence[ThrusterSpec],
    deflections: Sequence[float] | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """(3, n) maps from per-channel thrusts to net force and moment."""
    K = _orientation_matrix(thrusters, deflections)
    P = np.array([t.position for t in thrusters], dtype=float)
    return K.T, np.cross(P, K).T


def net_wrench(
    thrusters: Sequence[ThrusterSpec],
    thrusts: Sequence[float],
    deflections: Sequence[float] | None = None,
) -> Wrench:
    """Net propulsion force and moment for per-channel thrusts in newtons.

    Moment arms are the thruster positions, measured from the balloon's
    geometric center.  Raises ValueError on a length mismatch or a thrust
    outside its channel's bounds (1e-9 N slack for solver round-off).
    """
    f = np.asarray(thrusts, dtype=float)
    if f.shape != (len(thrusters),):
        raise ValueError(
            f"expected {len(thrusters)} thrust values, got {f.shape}"
        )
    for t, fi in zip(thrusters, f):
        if not (t.thrust_min - 1e-9 <= fi <= t.thrust_max + 1e-9):
            raise ValueError(
                f"thrust {fi} on channel {t.id} outside "
                f"[{t.thrust_min}, {t.thrust_max}]"
            )
    A_f, A_m = _wrench_matrices(thrusters, deflections)
    return Wrench(A_f @ f, A_m @ f)


def naive_motion_check(thrusters: Sequence[ThrusterSpec]) -> tuple[bool, bool, bool]:
    """Literal componentwise check at the all-channels-at-max assignment.

    Returns (F_x nonzero, F_z nonzero, M_z nonzero) of the net wrench when
    every channel runs at thrust_max.  Kept for reference next to the
    certificate check: it cannot express decoupling, so it both accepts
    designs that cannot hold a primitive cleanly and rejects designs whose
    symmetric max-thrust wrench happens to cancel.
    """
    f = [t.thrust_max for t in thrusters]
    force, moment = net_wrench(thrusters, f)
    return (
        bool(abs(force[0]) > _NAIVE_NONZERO),
        bool(abs(force[2]) > _NAIVE_NONZERO),
        bool(abs(moment[2]) > _NAIVE_NONZERO),
    )


# ---------------------------------------------------------------------------
# Primitive certificates (linear feasibility over box-bounded thrusts)

def _maximize(
    objective: np.ndarray,
    couplings: list[np.ndarray],
    tol: float,
    bounds: list[tuple[float, float]],
) -> tuple[float, np.ndarray] | None:
    """Maximize objective . f subject to |coupling . f| <= tol and box bounds."""
    rows, rhs = [], []
    for row in couplings:
        rows.extend([row, -row])
        rhs.extend([tol, tol])
    res = linprog(
        -objective,
        A_ub=np.array(rows) if rows else None,
        b_ub=np.array(rhs) if rhs else None,
        bounds=bounds,
        method="highs",
    )
    if not res.success:
        return None
    return -res.fun, res.x


def _tie_break_witness(
    objective: np.ndarray,
    target: float,
    couplings: list[np.ndarray],
    tol: float,
    bounds: list[tuple[float, float]],
    channel_ids: Sequence[int],
) -> np.ndarray | None:
    """Among thrust vectors achieving ``target``, pick a deterministic one.

    Minimizes channel-weighted absolute thrust (weights grow with channel
    id), which concentrates effort on the lowest channels and removes the
    solver's freedom on degenerate optima.
    """
    n = len(bounds)
    weights = np.array([1.0 + 1e-3 * rank for rank in np.argsort(np.argsort(channel_ids))])
    # variables: [f, u] with u >= |f|
    c = np.concatenate([np.zeros(n), weights])
    eye = np.eye(n)
    rows = [np.hstack([eye, -eye]), np.hstack([-eye, -eye])]
    rhs = [np.zeros(n), np.zeros(n)]
    rows.append(np.hstack([-objective, np.zeros(n)])[None, :])
    rhs.append(np.array([-(target - 1e-9)]))
    for row in couplings:
        rows.append(np.hstack([row, np.zeros(n)])[None, :])
        rhs.append(np.array([tol]))
        rows.append(np.hstack([-row, np.zeros(n)])[None, :])
        rhs.append(np.array([tol]))
    res = linprog(
        c,
        A_ub=np.vstack(rows),
        b_ub=np.concatenate(rhs),
        bounds=bounds + [(0.0, None)] * n,
        method="highs",
    )
    if not res.success:
        return None
    return res.x[:n]


def _clip_to_bounds(f: np.ndarray, thrusters: Sequence[ThrusterSpec]) -> tuple[float, ...]:
    lo = np.array([t.thrust_min for t in thrusters])
    hi = np.array([t.thrust_max for t in thrusters])
    return tuple(float(v) for v in np.clip(f, lo, hi))


def check_primitive(
    thrusters: Sequence[ThrusterSpec],
    primitive: str,
    tol: float = DEFAULT_TOLERANCE,
    max_servo_deflection: float = DEFAULT_SERVO_DEFLECTION,
) -> PrimitiveCertificate:
    """Decide whether a motion primitive is achievable and return a witness.

    forward  — exists f with F_x >= tol while |F_z| <= tol and |M_z| <= tol.
    altitude — exists f with a vertical force of magnitude >= tol in at
               least one direction while |F_x| <= tol and |M_z| <= tol;
               both directions are probed and reported.
    yaw      — exists f with |M_z| >= tol while |F_x| <= tol and
               |F_z| <= tol.  If no fixed-axis solution exists and the
               design carries servo-vectored thrusters, vectored solutions
               are searched over extreme deflections; a vectored turn is
               flown under way, so the forward-force constraint is dropped
               for that search.

    Lateral force and roll/pitch moments are never constrained.
    """
    if primitive not in PRIMITIVES:
        raise ValueError(f"unknown primitive {primitive!r}")
    if not tol > 0:
        raise ValueError("tol must be positive")

    thrusters = list(thrusters)
    bounds = [(t.thrust_min, t.thrust_max) for t in thrusters]
    channel_ids = [t.id for t in thrusters]
    A_f, A_m = _wrench_matrices(thrusters)
    fx, fz, mz = A_f[0], A_f[2], A_m[2]

    def attempt(objective, couplings):
        solved = _maximize(objective, couplings, tol, bounds)
        if solved is None or solved[0] < tol:
            return None
        value, witness = solved
        better = _tie_break_witness(objective, value, couplings, tol, bounds, channel_ids)
        return value, (better if better is not None else witness)

    if primitive == "forward":
        hit = attempt(fx, [fz, mz])
        if hit is None:
            return PrimitiveCertificate("forward", False)
        return PrimitiveCertificate(
            "forward", True, witness_thrusts=_clip_to_bounds(hit[1], thrusters)
        )

    if primitive == "altitude":
        up = attempt(-fz, [fx, mz])  # upward force is negative z
        down = attempt(fz, [fx, mz])
        directions = tuple(
            name for name, hit in (("up", up), ("down", down)) if hit is not None
        )
        if not directions:
            return PrimitiveCertificate("altitude", False)
        witness = (up if up is not None else down)[1]
        return PrimitiveCertificate(
            "altitude",
            True,
            witness_thrusts=_clip_to_bounds(witness, thrusters),
            directions=directions,
        )

    # yaw: prefer a fixed-axis spin-in-place couple
    best = None
    for objective in (A_m[2], -A_m[2]):
        hit = attempt(objective, [fx, fz])
        if hit is not None and (best is None or hit[0] > best[0]):
            best = hit
    if best is not None:
        return PrimitiveCertificate(
            "yaw", True, witness_thrusts=_clip_to_bounds(best[1], thrusters)
        )

    servo_idx = [i for i, t in enumerate(thrusters) if t.actuator_kind == "servo_vectored"]
    if servo_idx:
        hit = _vectored_yaw(
            thrusters, bounds, channel_ids, servo_idx, tol, max_servo_deflection
        )
        if hit is not None:
            witness, deflections = hit
            return PrimitiveCertificate(
                "yaw",
                True,
                witness_thrusts=_clip_to_bounds(witness, thrusters),
                servo_deflections=tuple(deflections),
            )
    return PrimitiveCertificate("yaw", False)


def _vectored_yaw(
    thrusters: list[ThrusterSpec],
    bounds: list[tuple[float, float]],
    channel_ids: list[int],
    servo_idx: list[int],
    tol: float,
    max_deflection: float,
) -> tuple[np.ndarray, list[float]] | None:
    """Search extreme servo deflections for a yaw moment while under way."""
    best: tuple[float, np.ndarray, list[float]] | None = None
    options = [(-max_deflection, 0.0, max_deflection)] * len(servo_idx)
    combos = np.array(np.meshgrid(*options)).T.reshape(-1, len(servo_idx))
    for combo in combos:
        if not np.any(combo):
            continue
        deflections = [0.0] * len(thrusters)
        for j, idx in enumerate(servo_idx):
            deflections[idx] = float(combo[j])
        A_f, A_m = _wrench_matrices(thrusters, deflections)
        for objective in (A_m[2], -A_m[2]):
            solved = _maximize(objective, [A_f[2]], tol, bounds)
            if solved is None or solved[0] < tol:
                continue
            if best is None or solved[0] > best[0]:
                best = (solved[0], solved[1], deflections)
    if best is None:
        return None
    _, witness, deflections = best
    return witness, deflections


def evaluate_design(design: DesignSpec, tol: float = DEFAULT_TOLERANCE) -> FeasibilityReport:
    """Full feasibility report: primitive certificates plus payload check."""
    certs = {p: check_primitive(design.thrusters, p, tol) for p in PRIMITIVES}
    volume = envelope_volume(design.balloon)
    lift = buoyancy(design.env, volume)
    payload = payload_mass(
        design.env, volume, design.masses, design.balloon.envelope_mass
    )
    return FeasibilityReport(
        forward=certs["forward"],
        altitude=certs["altitude"],
        yaw=certs["yaw"],
        naive_check=naive_motion_check(design.thrusters),
        envelope_volume=volume,
        buoyancy=lift,
        payload_mass=payload,
        payload_ok=payload >= 0.0,
        notes=(
            "lateral force and roll/pitch moments are unconstrained during "
            "primitive checks",
        ),
    )


# ---------------------------------------------------------------------------
# Envelope volume

def ellipsoid_surface_area(a: float, b: float, c: float) -> float:
    """Thomsen closed-form approximation of an ellipsoid's surface area."""
    p = _THOMSEN_P
    return 4.0 * math.pi * (((a * b) ** p + (a * c) ** p + (b * c) ** p) / 3.0) ** (1.0 / p)


def deflated_radius_for_sphere(r_3d: float) -> float:
    """Deflated-envelope radius that inflates into a sphere of radius r_3d."""
    if not r_3d > 0:
        raise EnvelopeError("radius must be positive")
    return r_3d * math.sqrt(2.0)


def envelope_volume(balloon: BalloonSpec) -> float:
    """Inflated envelope volume in cubic meters.

    Measured inflated semi-axes take precedence: V = 4/3 pi a b c.  Otherwise
    the deflated envelope (two elliptical sheets, area 2 pi a2 b2) inflates
    into a closed shape of equal surface area:

      * sphere — exact closed form r = sqrt(SA / 4 pi);
      * saucer / oval / irregular oval — an oblate ellipsoid whose equatorial
        semi-axes keep the deflated aspect ratio and whose polar semi-axis is
        ``flatness_ratio`` times the smaller equatorial one.  The common
        scale factor is solved by bisection (1e-10 m tolerance on the
        semi-axes) against the Thomsen surface-area approximation.
    """
    if balloon.inflated_semi_axes is not None:
        a, b, c = balloon.inflated_semi_axes
        return 4.0 / 3.0 * math.pi * a * b * c

    a2, b2 = balloon.envelope_2d
    if not (a2 > 0 and b2 > 0):
        raise EnvelopeError("deflated semi-axes must be positive")
    sa_2d = 2.0 * math.pi * a2 * b2

    if balloon.shape == "sphere":
        r = math.sqrt(sa_2d / (4.0 * math.pi))
        return 4.0 / 3.0 * math.pi * r**3

    flatness = balloon.effective_flatness

    def surface(k: float) -> float:
        a3, b3 = k * a2, k * b2
        return ellipsoid_surface_area(a3, b3, flatness * min(a3, b3))

    lo, hi = 0.0, 1.0
    expansions = 0
    while surface(hi) < sa_2d:
        hi *= 2.0
        expansions += 1
        if expansions > 200:
            raise EnvelopeError("inflation scale search failed to bracket")
    scale_tol = 1e-10 / max(a2, b2)
    while hi - lo > scale_tol:
        mid = 0.5 * (lo + hi)
        if surface(mid) < sa_2d:
            lo = mid
        else:
            hi = mid
    k = 0.5 * (lo + hi)
    a3, b3 = k * a2, k * b2
    c3 = flatness * min(a3, b3)
    return 4.0 / 3.0 * math.pi * a3 * b3 * c3


def inflated_semi_axes(balloon: BalloonSpec) -> tuple[float, float, float]:
    """Semi-axes of the inflated shape implied by :func:`envelope_volume`."""
    if balloon.inflated_semi_axes is not None:
        return balloon.inflated_semi_axes
    a2, b2 = balloon.envelope_2d
    if balloon.shape == "sphere":
        r = math.sqrt(2.0 * math.pi * a2 * b2 / (4.0 * math.pi))
        return (r, r, r)
    volume = envelope_volume(balloon)
    flatness = balloon.effective_flatness
    # V = 4/3 pi (k a2)(k b2)(flatness k min(a2,b2)) -> recover k from volume
    k = (volume / (4.0 / 3.0 * math.pi * a2 * b2 * flatness * min(a2, b2))) ** (1.0 / 3.0)
    return (k * a2, k * b2, flatness * k * min(a2, b2))


# ---------------------------------------------------------------------------
# Buoyancy and payload

def buoyancy(env: EnvironmentConstants, volume: float) -> float:
    """Buoyant force in newtons on a displaced volume (Archimedes)."""
    if volume < 0:
        raise ValueError("volume must be >= 0")
    return env.air_density * volume * env.gravity


def payload_mass(
    env: EnvironmentConstants,
    volume: float,
    masses: MassBudget,
    envelope_mass: float,
) -> float:
    """Payload capacity in kg at neutral buoyancy.

    Net lift of the helium-filled envelope minus the structural masses; the
    design floats without propulsion iff this is non-negative.
    """
    if volume < 0:
        raise ValueError("volume must be >= 0")
    lift = volume * (env.air_density - env.helium_density)
    return lift - (masses.electronics_mass + envelope_mass + masses.support_mass)


def total_mass(design: DesignSpec, carried_payload: float | None = None) -> float:
    """Total vehicle mass in kg, helium included.

    ``carried_payload=None`` assumes the vehicle is ballasted to neutral
    buoyancy (payload equals capacity), in which case the total mass equals
    the displaced air mass exactly.  An explicit payload gives
    structure + payload + helium; carrying less than capacity leaves the
    vehicle buoyant.
    """
    volume = envelope_volume(design.balloon)
    if carried_payload is None:
        return design.env.air_density * volume
    if carried_payload < 0:
        raise ValueError("carried payload must be >= 0")
    structure = (
        design.masses.electronics_mass
        + design.masses.support_mass
        + design.balloon.envelope_mass
    )
    return structure + carried_payload + design.env.helium_density * volume


def volume_percent_error(actual: float, calculated: float) -> float:
    """|actual - calculated| / calculated, in percent."""
    if not calculated > 0:
        raise ValueError("calculated volume must be positive")
    return abs(actual - calculated) / calculated * 100.0
