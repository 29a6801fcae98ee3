"""Time-domain simulation of the linear blimp dynamics plus a yaw model.

World and body frames are z-down; the world z row of the acceleration is
(m g - F_B) / m, so a vehicle lighter than the air it displaces accelerates
upward (negative z).  Translational drag opposes the body-frame velocity
componentwise with the quadratic law; yaw uses a first-order rotor model
with quadratic angular drag.  Roll and pitch are held constant (the vehicle
is passively stable).

Two integrators are provided: semi-implicit Euler, which preserves the
neutral-buoyancy equilibrium exactly, and classic RK4.
"""

from __future__ import annotations

import io
import math
import threading
import time as _time
import uuid
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .design import DesignSpec
from .feasibility import buoyancy, envelope_volume, net_wrench, total_mass
from .mapping import (
    ActuatorCommand,
    DEFAULT_INITIAL_COMMAND,
    PlantWiring,
    RemapSession,
    RemapVerdict,
    ResponseCheckConfig,
    mix,
)
from .performance import rotation_matrix

__all__ = [
    "SimConfig",
    "SimState",
    "Trajectory",
    "SimulationDiverged",
    "Dynamics",
    "step",
    "run",
    "trajectory_csv",
    "SessionView",
    "SimSession",
    "SessionManager",
]

INTEGRATORS = ("semi_implicit_euler", "rk4")

CSV_HEADER = "t,vx,vy,vz,speed_h,psi,psidot"


class SimulationDiverged(RuntimeError):
    """State left the finite range; ``quantity`` names the offender."""

    def __init__(self, quantity: str, at_time: float):
        super().__init__(f"simulation diverged: non-finite {quantity} at t={at_time:.3f}s")
        self.quantity = quantity
        self.at_time = at_time


@dataclass(frozen=True)
class SimConfig:
    dt: float = 0.02
    integrator: str = "rk4"
    yaw_inertia: float = 0.01  # kg*m^2
    yaw_drag_coeff: float = 0.005  # N*m*s^2/rad^2
    steady_state_window: float = 3.0  # s
    steady_state_eps: float = 0.01  # m/s

    def __post_init__(self) -> None:
        if not 0.0 < self.dt <= 0.1:
            raise ValueError("dt must lie in (0, 0.1]")
        if self.integrator not in INTEGRATORS:
            raise ValueError(f"integrator must be one of {INTEGRATORS}")
        if self.yaw_inertia <= 0 or self.yaw_drag_coeff < 0:
            raise ValueError("yaw inertia must be positive, yaw drag non-negative")
        if self.steady_state_window <= 0 or self.steady_state_eps <= 0:
            raise ValueError("steady-state window and eps must be positive")


@dataclass(frozen=True)
class SimState:
    time: float = 0.0
    position: tuple[float, float, float] = (0.0, 0.0, 0.0)
    velocity: tuple[float, float, float] = (0.0, 0.0, 0.0)
    yaw: float = 0.0
    yaw_rate: float = 0.0
    roll: float = 0.0
    pitch: float = 0.0

    @property
    def speed(self) -> float:
        vx, vy, vz = self.velocity
        return math.sqrt(vx * vx + vy * vy + vz * vz)

    @property
    def speed_h(self) -> float:
        vx, vy, _ = self.velocity
        return math.hypot(vx, vy)


class Dynamics:
    """Precomputed per-design quantities for fast stepping.

    ``carried_payload=None`` ballasts the vehicle to neutral buoyancy, in
    which case the weight/buoyancy imbalance is exactly zero.
    """

    def __init__(self, design: DesignSpec, carried_payload: float | None = None):
        self.design = design
        self.volume = envelope_volume(design.balloon)
        self.mass = total_mass(design, carried_payload)
        self.lift = buoyancy(design.env, self.volume)
        # world z force from weight minus buoyancy (z-down: positive sinks)
        self.z_imbalance = self.mass * design.env.gravity - self.lift
        rho = design.env.air_density
        self.drag_gain = np.array(
            [0.5 * rho * cd * csa for cd, csa in (design.drag.axis_pair(a) for a in range(3))]
        )
        self.channel_count = len(design.thrusters)

    def thrusts(self, duties: Sequence[float]) -> list[float]:
        if len(duties) != self.channel_count:
            raise ValueError(
                f"expected {self.channel_count} duties, got {len(duties)}"
            )
        out = []
        for t, duty in zip(self.design.thrusters, duties):
            if not -1.0 <= duty <= 1.0:
                raise ValueError(f"duty {duty} on channel {t.id} outside [-1, 1]")
            out.append(t.model.thrust(duty))
        return out

    def body_drag(self, v_body: np.ndarray) -> np.ndarray:
        """Drag force vector opposing the body-frame velocity."""
        return self.drag_gain * v_body * np.abs(v_body)

    def _derivatives(
        self,
        velocity: np.ndarray,
        yaw: float,
        yaw_rate: float,
        roll: float,
        pitch: float,
        force_body: np.ndarray,
        moment_z: float,
        config: SimConfig,
    ) -> tuple[np.ndarray, float]:
        r_wb = rotation_matrix(roll, pitch, yaw)
        v_body = r_wb.T @ velocity
        net_body = force_body - self.body_drag(v_body)
        accel = (np.array([0.0, 0.0, self.z_imbalance]) + r_wb @ net_body) / self.mass
        yaw_drag = math.copysign(config.yaw_drag_coeff * yaw_rate * yaw_rate, yaw_rate)
        yaw_accel = (moment_z - yaw_drag) / config.yaw_inertia
        return accel, yaw_accel

    def step(
        self,
        state: SimState,
        duties: Sequence[float],
        config: SimConfig,
        servo_angles: Sequence[float] | None = None,
    ) -> SimState:
        """Advance one dt with duties (and servo deflections) held constant."""
        thrusts = self.thrusts(duties)
        wrench = net_wrench(self.design.thrusters, thrusts, servo_angles)
        force_body = wrench.force
        moment_z = float(wrench.moment[2])

        pos = np.array(state.position)
        vel = np.array(state.velocity)
        yaw, yaw_rate = state.yaw, state.yaw_rate
        dt = config.dt

        if config.integrator == "semi_implicit_euler":
            accel, yaw_accel = self._derivatives(
                vel, yaw, yaw_rate, state.roll, state.pitch, force_body, moment_z, config
            )
            vel = vel + accel * dt
            yaw_rate = yaw_rate + yaw_accel * dt
            pos = pos + vel * dt
            yaw = yaw + yaw_rate * dt
        else:  # rk4
            def f(p, v, psi, psidot):
                accel, yaw_accel = self._derivatives(
                    v, psi, psidot, state.roll, state.pitch, force_body, moment_z, config
                )
                return v, accel, psidot, yaw_accel

            k1 = f(pos, vel, yaw, yaw_rate)
            k2 = f(
                pos + 0.5 * dt * k1[0],
                vel + 0.5 * dt * k1[1],
                yaw + 0.5 * dt * k1[2],
                yaw_rate + 0.5 * dt * k1[3],
            )
            k3 = f(
                pos + 0.5 * dt * k2[0],
                vel + 0.5 * dt * k2[1],
                yaw + 0.5 * dt * k2[2],
                yaw_rate + 0.5 * dt * k2[3],
            )
            k4 = f(
                pos + dt * k3[0],
                vel + dt * k3[1],
                yaw + dt * k3[2],
                yaw_rate + dt * k3[3],
            )
            pos = pos + dt / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
            vel = vel + dt / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
            yaw = yaw + dt / 6.0 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
            yaw_rate = yaw_rate + dt / 6.0 * (k1[3] + 2 * k2[3] + 2 * k3[3] + k4[3])

        t = state.time + dt
        for name, value in (
            ("position", pos),
            ("velocity", vel),
            ("yaw", yaw),
            ("yaw_rate", yaw_rate),
        ):
            if not np.all(np.isfinite(value)):
                raise SimulationDiverged(name, t)
        return replace(
            state,
            time=t,
            position=tuple(pos),
            velocity=tuple(vel),
            yaw=float(yaw),
            yaw_rate=float(yaw_rate),
        )


def step(
    state: SimState,
    design: DesignSpec,
    duties: Sequence[float],
    config: SimConfig = SimConfig(),
    servo_angles: Sequence[float] | None = None,
    carried_payload: float | None = None,
) -> SimState:
    """One integration step; see :class:`Dynamics` for the model."""
    return Dynamics(design, carried_payload).step(state, duties, config, servo_angles)


@dataclass
class Trajectory:
    samples: list[SimState]
    steady: list[bool]
    config: SimConfig

    @property
    def steady_time(self) -> float | None:
        for state, flag in zip(self.samples, self.steady):
            if flag:
                return state.time
        return None

    @property
    def final(self) -> SimState:
        return self.samples[-1]


DutySchedule = Callable[[float], Sequence[float]]


def run(
    design: DesignSpec,
    duty_schedule: DutySchedule | Sequence[float],
    duration: float,
    config: SimConfig = SimConfig(),
    carried_payload: float | None = None,
    initial_state: SimState | None = None,
) -> Trajectory:
    """Integrate for ``duration`` seconds, sampling every dt.

    ``duty_schedule`` is either a constant per-channel duty sequence or a
    callable of time.  Each sample carries a steady-state flag: true once
    the speed range over the trailing window drops below the configured
    epsilon.
    """
    if not duration > 0:
        raise ValueError("duration must be positive")
    if callable(duty_schedule):
        schedule = duty_schedule
    else:
        constant = list(duty_schedule)
        schedule = lambda t: constant  # noqa: E731

    dyn = Dynamics(design, carried_payload)
    state = initial_state if initial_state is not None else SimState()
    window = max(1, round(config.steady_state_window / config.dt))
    speeds: deque[float] = deque(maxlen=window)
    speeds.append(state.speed)

    samples = [state]
    steady = [False]
    steps = round(duration / config.dt)
    for _ in range(steps):
        state = dyn.step(state, schedule(state.time), config)
        samples.append(state)
        speeds.append(state.speed)
        steady.append(len(speeds) == window and max(speeds) - min(speeds) < config.steady_state_eps)
    return Trajectory(samples=samples, steady=steady, config=config)


def trajectory_csv(trajectory: Trajectory) -> str:
    """CSV export, one row per sample, SI units, 6 significant digits."""
    out = io.StringIO()
    out.write(CSV_HEADER + "\n")
    for s in trajectory.samples:
        vx, vy, vz = s.velocity
        row = (s.time, vx, vy, vz, s.speed_h, s.yaw, s.yaw_rate)
        out.write(",".join(f"{v:.6g}" for v in row) + "\n")
    return out.getvalue()


# ---------------------------------------------------------------------------
# Interactive sessions

@dataclass(frozen=True)
class SessionView:
    """Immutable snapshot of a session for reporting."""

    session_id: str
    state: SimState
    steady: bool
    inputs: tuple[float, float, float, float]  # x, y, z, slider
    command: str | None
    stage: str
    verdicts: RemapVerdict | None
    error: str | None


class SimSession:
    """One simulated vehicle driven by joystick inputs through a mapping.

    The session owns its state; ticks (from the background loop in realtime
    mode or explicit :meth:`step_n` calls in stepped mode) are the only
    mutators, and readers get consistent snapshots under the session lock.
    """

    def __init__(
        self,
        design: DesignSpec,
        config: SimConfig | None = None,
        mode: str = "stepped",
        wiring: PlantWiring | None = None,
        check_config: ResponseCheckConfig | None = None,
        carried_payload: float | None = None,
        session_id: str | None = None,
    ):
        if mode not in ("stepped", "realtime"):
            raise ValueError("mode must be 'stepped' or 'realtime'")
        self.id = session_id or uuid.uuid4().hex[:12]
        self.design = design
        self.config = config if config is not None else SimConfig()
        self.mode = mode
        self.dynamics = Dynamics(design, carried_payload)
        self.remap = RemapSession(
            design,
            wiring,
            check_config,
            initial_command=DEFAULT_INITIAL_COMMAND,
        )
        self._wiring = self.remap.wiring
        self._lock = threading.Lock()
        self._state = SimState()
        self._inputs = (0.0, 0.0, 0.0, 0.0)
        window = max(1, round(self.config.steady_state_window / self.config.dt))
        self._speeds: deque[float] = deque([0.0], maxlen=window)
        self._error: str | None = None
        self._stop = threading.Event()
        self._thread: threading.Thread | None = None
        if mode == "realtime":
            self._thread = threading.Thread(target=self._loop, daemon=True)
            self._thread.start()

    # -- input / output -----------------------------------------------------

    def set_input(self, x: float, y: float, z: float, slider: float) -> None:
        for name, v, lo, hi in (
            ("x", x, -1.0, 1.0),
            ("y", y, -1.0, 1.0),
            ("z", z, -1.0, 1.0),
            ("slider", slider, 0.0, 1.0),
        ):
            if not lo <= v <= hi:
                raise ValueError(f"input {name}={v} outside [{lo}, {hi}]")
        with self._lock:
            self._inputs = (x, y, z, slider)

    def snapshot(self) -> SessionView:
        with self._lock:
            window_full = len(self._speeds) == self._speeds.maxlen
            steady = window_full and (max(self._speeds) - min(self._speeds)) < self.config.steady_state_eps
            return SessionView(
                session_id=self.id,
                state=self._state,
                steady=steady,
                inputs=self._inputs,
                command=self.remap.command_text,
                stage=self.remap.stage,
                verdicts=self.remap.verdicts,
                error=self._error,
            )

    def submit_remap(self, command: str) -> RemapVerdict:
        with self._lock:
            return self.remap.submit(command)

    # -- advancing ----------------------------------------------------------

    def step_n(self, n: int = 1) -> SessionView:
        if self.mode != "stepped":
            raise RuntimeError("explicit stepping only in stepped mode")
        if n < 1:
            raise ValueError("n must be >= 1")
        with self._lock:
            for _ in range(n):
                self._tick_locked()
        return self.snapshot()

    def _tick_locked(self) -> None:
        if self._error is not None:
            return
        x, y, z, slider = self._inputs
        mapping = self.remap.mapping
        duties = [0.0] * len(self.design.thrusters)
        deflections = [0.0] * len(self.design.thrusters)
        if mapping is not None:
            act = self._wiring.apply(mix(mapping, (x, y), z, slider))
            for i, t in enumerate(self.design.thrusters):
                duties[i] = act.duties.get(t.id, 0.0)
                if t.actuator_kind == "servo_vectored":
                    deflections[i] = act.servo_angles.get(t.id, 0.0)
        try:
            self._state = self.dynamics.step(self._state, duties, self.config, deflections)
        except SimulationDiverged as exc:
            self._error = str(exc)
            return
        self._speeds.append(self._state.speed)

    def _loop(self) -> None:
        next_tick = _time.monotonic()
        while not self._stop.is_set():
            with self._lock:
                self._tick_locked()
            next_tick += self.config.dt
            delay = next_tick - _time.monotonic()
            if delay > 0:
                self._stop.wait(delay)
            else:
                next_tick = _time.monotonic()

    def close(self) -> None:
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout=2.0)


class SessionManager:
    """Threadsafe registry of independent sessions."""

    def __init__(self) -> None:
        self._sessions: dict[str, SimSession] = {}
        self._lock = threading.Lock()

    def create_session(self, design: DesignSpec, config: SimConfig | None = None, **kwargs) -> str:
        session = SimSession(design, config, **kwargs)
        with self._lock:
            self._sessions[session.id] = session
        return session.id

    def get(self, session_id: str) -> SimSession:
        with self._lock:
            if session_id not in self._sessions:
                raise KeyError(f"unknown session {session_id!r}")
            return self._sessions[session_id]

    def session_input(self, session_id: str, x: float, y: float, z: float, slider: float) -> None:
        self.get(session_id).set_input(x, y, z, slider)

    def session_state(self, session_id: str) -> SessionView:
        return self.get(session_id).snapshot()

    def delete(self, session_id: str) -> None:
        with self._lock:
            session = self._sessions.pop(session_id, None)
        if session is None:
            raise KeyError(f"unknown session {session_id!r}")
        session.close()

    def close_all(self) -> None:
        with self._lock:
            sessions = list(self._sessions.values())
            self._sessions.clear()
        for s in sessions:
            s.close()
