"""Reconfigurable control mapping between joystick channels and thrusters.

The motor board exposes four DC channels.  A mapping command is a compact
ASCII string assigning a role to each channel plus a rotation tail:

    cmd  := pair pair pair pair tail
    pair := digit role          digit in 1-4 (unique), role in {F,B,U,D,N}
    tail := 'N'                               rotation unconfirmed
          | 'C' digit 'L' digit 'R'           differential DC rotation
          | 'S' digit digit 'M' ('LR'|'RL')   servo-vectored rotation

Roles: F/B drive the channel with the forward stick (B inverted, for motors
whose positive duty pushes backward), U/D with the vertical stick (D
inverted), N leaves the channel idle.  The servo tail names two vectoring
servo channels followed by the literal separator 'M'; LR/RL picks which of
the mirrored pair steers left versus right, i.e. flipping the order flips
the turn direction.

Because a user rarely knows how the motors ended up wired, the mapping is
confirmed against the (simulated) plant in three steps: register an initial
guess, correct it until forward and vertical stick motions respond
correctly, then correct the rotation tail until a right stick turns the
vehicle right.  :class:`RemapSession` drives that protocol.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping as TMapping
from typing import Sequence

import numpy as np

from .design import DesignSpec
from .feasibility import DEFAULT_SERVO_DEFLECTION, Wrench, net_wrench

__all__ = [
    "CommandError",
    "RemapError",
    "DcRotation",
    "ServoRotation",
    "MappingCommand",
    "ChannelMapping",
    "ActuatorCommand",
    "PlantWiring",
    "ResponseCheckConfig",
    "RemapVerdict",
    "RemapSession",
    "BOARD_CHANNELS",
    "ROLE_LETTERS",
    "DEFAULT_INITIAL_COMMAND",
    "parse_command",
    "render_command",
    "command_mapping",
    "mix",
    "plant_response",
    "remap_step",
]

BOARD_CHANNELS = (1, 2, 3, 4)
ROLE_LETTERS = "FBUDN"
SERVO_CHANNELS = "12345678"

# Natural starting guess: channels in order, one role each, rotation open.
DEFAULT_INITIAL_COMMAND = "1F2B3U4DN"


class CommandError(ValueError):
    """Command string rejected; ``position`` is the 1-based column."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (position {position})")
        self.message = message
        self.position = position


class RemapError(RuntimeError):
    """Remap protocol misuse (finished session, unknown channels, ...)."""


@dataclass(frozen=True)
class DcRotation:
    left: int
    right: int


@dataclass(frozen=True)
class ServoRotation:
    servo_a: int
    servo_b: int
    order: str  # "LR" or "RL"


@dataclass(frozen=True)
class MappingCommand:
    """Parsed mapping command; renders back to the exact source string."""

    channel_roles: tuple[tuple[int, str], ...]
    mode: str  # "N", "C" or "S"
    rotation: DcRotation | ServoRotation | None = None

    def role_of(self, channel: int) -> str:
        for ch, role in self.channel_roles:
            if ch == channel:
                return role
        return "N"


# ---------------------------------------------------------------------------
# Grammar

def parse_command(text: str) -> MappingCommand:
    """Parse a mapping command, raising :class:`CommandError` with a 1-based
    position on the first offending character."""
    if not isinstance(text, str):
        raise CommandError("command must be a string", 1)
    i = 0

    def need(what: str) -> str:
        if i >= len(text):
            raise CommandError(f"expected {what}, found end of input", i + 1)
        return text[i]

    pairs: list[tuple[int, str]] = []
    seen: set[int] = set()
    for _ in range(4):
        ch = need("channel digit 1-4")
        if ch not in "1234":
            raise CommandError("expected channel digit 1-4", i + 1)
        channel = int(ch)
        if channel in seen:
            raise CommandError(f"duplicate channel {channel}", i + 1)
        seen.add(channel)
        i += 1
        role = need("role letter F/B/U/D/N")
        if role not in ROLE_LETTERS:
            raise CommandError("unknown role letter (expected F, B, U, D or N)", i + 1)
        i += 1
        pairs.append((channel, role))

    tail = need("rotation tail 'N', 'C' or 'S'")
    rotation: DcRotation | ServoRotation | None
    if tail == "N":
        i += 1
        mode, rotation = "N", None
    elif tail == "C":
        i += 1
        left = need("left rotation channel digit")
        if left not in "1234":
            raise CommandError("expected rotation channel digit 1-4", i + 1)
        i += 1
        if need("'L'") != "L":
            raise CommandError("expected 'L'", i + 1)
        i += 1
        right = need("right rotation channel digit")
        if right not in "1234":
            raise CommandError("expected rotation channel digit 1-4", i + 1)
        if right == left:
            raise CommandError("rotation channels must differ", i + 1)
        i += 1
        if need("'R'") != "R":
            raise CommandError("expected 'R'", i + 1)
        i += 1
        mode, rotation = "C", DcRotation(int(left), int(right))
    elif tail == "S":
        i += 1
        a = need("servo channel digit")
        if a not in SERVO_CHANNELS:
            raise CommandError("expected servo channel digit 1-8", i + 1)
        i += 1
        b = need("servo channel digit")
        if b not in SERVO_CHANNELS:
            raise CommandError("expected servo channel digit 1-8", i + 1)
        if b == a:
            raise CommandError("servo channels must differ", i + 1)
        i += 1
        if need("'M'") != "M":
            raise CommandError("expected 'M'", i + 1)
        i += 1
        order = text[i : i + 2]
        if order not in ("LR", "RL"):
            raise CommandError("expected order 'LR' or 'RL'", i + 1)
        i += 2
        mode, rotation = "S", ServoRotation(int(a), int(b), order)
    else:
        raise CommandError("expected rotation tail 'N', 'C' or 'S'", i + 1)

    if i != len(text):
        raise CommandError("unexpected trailing input", i + 1)
    return MappingCommand(tuple(pairs), mode, rotation)


def render_command(command: MappingCommand) -> str:
    """Canonical string form; inverse of :func:`parse_command`."""
    parts = [f"{ch}{role}" for ch, role in command.channel_roles]
    if command.mode == "N":
        parts.append("N")
    elif command.mode == "C":
        rot = command.rotation
        assert isinstance(rot, DcRotation)
        parts.append(f"C{rot.left}L{rot.right}R")
    else:
        rot = command.rotation
        assert isinstance(rot, ServoRotation)
        parts.append(f"S{rot.servo_a}{rot.servo_b}M{rot.order}")
    return "".join(parts)


# ---------------------------------------------------------------------------
# Channel mapping and mixer

@dataclass(frozen=True)
class ChannelMapping:
    """Role sets derived from a command, ready for the mixer."""

    forward: frozenset[int]
    backward: frozenset[int]
    up: frozenset[int]
    down: frozenset[int]
    mode: str
    yaw_left: int | None = None
    yaw_right: int | None = None
    servo_pair: tuple[int, int] | None = None
    servo_order: str | None = None

    @property
    def servo_mode(self) -> bool:
        return self.mode == "S"


def command_mapping(command: MappingCommand) -> ChannelMapping:
    by_role: dict[str, set[int]] = {r: set() for r in "FBUD"}
    for ch, role in command.channel_roles:
        if role != "N":
            by_role[role].add(ch)
    yaw_left = yaw_right = None
    servo_pair = servo_order = None
    if command.mode == "C":
        assert isinstance(command.rotation, DcRotation)
        yaw_left, yaw_right = command.rotation.left, command.rotation.right
    elif command.mode == "S":
        assert isinstance(command.rotation, ServoRotation)
        servo_pair = (command.rotation.servo_a, command.rotation.servo_b)
        servo_order = command.rotation.order
    return ChannelMapping(
        forward=frozenset(by_role["F"]),
        backward=frozenset(by_role["B"]),
        up=frozenset(by_role["U"]),
        down=frozenset(by_role["D"]),
        mode=command.mode,
        yaw_left=yaw_left,
        yaw_right=yaw_right,
        servo_pair=servo_pair,
        servo_order=servo_order,
    )


@dataclass(frozen=True)
class ActuatorCommand:
    """Mixer output: per-board-channel duties plus servo deflection angles."""

    duties: TMapping[int, float]
    servo_angles: TMapping[int, float] = field(default_factory=dict)


def mix(
    mapping: ChannelMapping,
    joystick_h: tuple[float, float],
    joystick_v: float,
    slider: float,
    max_servo_deflection: float = DEFAULT_SERVO_DEFLECTION,
) -> ActuatorCommand:
    """Translate stick and slider inputs into actuator commands.

    The slider gates everything: duties scale with it and are zero when it
    is zero.  Stick y drives F (and inverted B) channels, stick z drives U
    (and inverted D) channels.  Stick x either applies a differential on the
    DC rotation pair (sign-adjusted for B/D channels so the pair thrusts
    against each other) or deflects the mirrored servo pair.
    """
    x, y = joystick_h
    z = joystick_v
    if not (-1.0 <= x <= 1.0 and -1.0 <= y <= 1.0 and -1.0 <= z <= 1.0):
        raise ValueError("joystick inputs must lie in [-1, 1]")
    if not 0.0 <= slider <= 1.0:
        raise ValueError("slider must lie in [0, 1]")

    duties: dict[int, float] = {c: 0.0 for c in BOARD_CHANNELS}
    for c in mapping.forward:
        duties[c] = duties.get(c, 0.0) + slider * y
    for c in mapping.backward:
        duties[c] = duties.get(c, 0.0) - slider * y
    for c in mapping.up:
        duties[c] = duties.get(c, 0.0) + slider * z
    for c in mapping.down:
        duties[c] = duties.get(c, 0.0) - slider * z

    servo_angles: dict[int, float] = {}
    if mapping.mode == "C":
        if mapping.yaw_left is None or mapping.yaw_right is None:
            raise ValueError("dc rotation mapping lacks left/right channels")

        def role_sign(channel: int) -> float:
            if channel in mapping.backward or channel in mapping.down:
                return -1.0
            return 1.0

        duties[mapping.yaw_left] = duties.get(mapping.yaw_left, 0.0) + role_sign(
            mapping.yaw_left
        ) * slider * x
        duties[mapping.yaw_right] = duties.get(mapping.yaw_right, 0.0) - role_sign(
            mapping.yaw_right
        ) * slider * x
    elif mapping.mode == "S":
        if mapping.servo_pair is None or mapping.servo_order is None:
            raise ValueError("servo rotation mapping lacks its servo pair")
        sign = 1.0 if mapping.servo_order == "LR" else -1.0
        angle = sign * x * max_servo_deflection
        a, b = mapping.servo_pair
        servo_angles[a] = angle
        servo_angles[b] = -angle

    duties = {c: max(-1.0, min(1.0, d)) for c, d in duties.items()}
    return ActuatorCommand(duties=duties, servo_angles=servo_angles)


# ---------------------------------------------------------------------------
# Plant wiring

@dataclass(frozen=True)
class PlantWiring:
    """How board channels actually reach the design's thrusters.

    ``channel_map`` sends a board channel to the design channel it drives
    (must be injective); ``polarity`` optionally inverts a board channel's
    duty (swapped motor leads).  ``servo_sign`` flips every servo deflection
    (linkage mounted mirrored).  Board channels without an entry pass
    through unchanged.
    """

    channel_map: TMapping[int, int] = field(default_factory=dict)
    polarity: TMapping[int, int] = field(default_factory=dict)
    servo_sign: int = 1

    def __post_init__(self) -> None:
        targets = list(self.channel_map.values())
        if len(set(targets)) != len(targets):
            raise ValueError("channel_map must be injective")
        if any(p not in (-1, 1) for p in self.polarity.values()):
            raise ValueError("polarity entries must be +1 or -1")
        if self.servo_sign not in (-1, 1):
            raise ValueError("servo_sign must be +1 or -1")

    @classmethod
    def identity(cls) -> "PlantWiring":
        return cls()

    def apply(self, command: ActuatorCommand) -> ActuatorCommand:
        duties: dict[int, float] = {}
        for channel, duty in command.duties.items():
            target = self.channel_map.get(channel, channel)
            duties[target] = duties.get(target, 0.0) + self.polarity.get(channel, 1) * duty
        duties = {c: max(-1.0, min(1.0, d)) for c, d in duties.items()}
        angles = {c: self.servo_sign * a for c, a in command.servo_angles.items()}
        return ActuatorCommand(duties=duties, servo_angles=angles)


def plant_response(
    design: DesignSpec,
    mapping: ChannelMapping,
    wiring: PlantWiring,
    x: float,
    y: float,
    z: float,
    slider: float,
    max_servo_deflection: float = DEFAULT_SERVO_DEFLECTION,
) -> Wrench:
    """Net wrench the design produces for one stick/slider input.

    Board channels that reach no thruster sink their duty silently, exactly
    like an unconnected screw terminal.
    """
    act = wiring.apply(mix(mapping, (x, y), z, slider, max_servo_deflection))
    thrusts = []
    deflections = []
    for t in design.thrusters:
        thrusts.append(t.model.thrust(act.duties.get(t.id, 0.0)))
        if t.actuator_kind == "servo_vectored":
            deflections.append(act.servo_angles.get(t.id, 0.0))
        else:
            deflections.append(0.0)
    return net_wrench(design.thrusters, thrusts, deflections)


# ---------------------------------------------------------------------------
# Remap protocol

@dataclass(frozen=True)
class ResponseCheckConfig:
    """Thresholds for judging a plant response "correct".

    Couplings are judged relative to the primary response (a human pilot
    accepts a slightly impure motion), converting between force and moment
    scales through the design's largest thruster arm.
    """

    min_force: float = 1e-3  # N
    min_moment: float = 1e-4  # N*m
    coupling_ratio: float = 0.25
    max_servo_deflection: float = DEFAULT_SERVO_DEFLECTION


def _arm_scale(design: DesignSpec) -> float:
    arms = [math.sqrt(sum(c * c for c in t.position)) for t in design.thrusters]
    return max(max(arms), 0.05)


def check_horizontal(
    design: DesignSpec,
    mapping: ChannelMapping,
    wiring: PlantWiring,
    cfg: ResponseCheckConfig = ResponseCheckConfig(),
) -> bool:
    """Forward stick produces dominant forward force."""
    w = plant_response(design, mapping, wiring, 0.0, 1.0, 0.0, 1.0, cfg.max_servo_deflection)
    fx = float(w.force[0])
    arm = _arm_scale(design)
    return bool(
        fx >= cfg.min_force
        and abs(w.force[2]) <= cfg.coupling_ratio * fx
        and abs(w.moment[2]) <= cfg.coupling_ratio * fx * arm
    )


def check_vertical(
    design: DesignSpec,
    mapping: ChannelMapping,
    wiring: PlantWiring,
    cfg: ResponseCheckConfig = ResponseCheckConfig(),
) -> bool:
    """Up stick produces dominant upward force (negative z)."""
    w = plant_response(design, mapping, wiring, 0.0, 0.0, 1.0, 1.0, cfg.max_servo_deflection)
    up = -float(w.force[2])
    arm = _arm_scale(design)
    return bool(
        up >= cfg.min_force
        and abs(w.force[0]) <= cfg.coupling_ratio * up
        and abs(w.moment[2]) <= cfg.coupling_ratio * up * arm
    )


def check_rotation(
    design: DesignSpec,
    mapping: ChannelMapping,
    wiring: PlantWiring,
    cfg: ResponseCheckConfig = ResponseCheckConfig(),
) -> bool:
    """Right stick turns right.

    DC differential rotation is tested in place (no forward input) and must
    not couple into translation.  Servo rotation steers the thrust vector,
    so it is tested under way and only the vertical coupling is bounded.
    """
    if mapping.mode == "N":
        return False
    under_way = 1.0 if mapping.servo_mode else 0.0
    w = plant_response(
        design, mapping, wiring, 1.0, under_way, 0.0, 1.0, cfg.max_servo_deflection
    )
    mz = float(w.moment[2])
    if mz < cfg.min_moment:
        return False
    arm = _arm_scale(design)
    force_limit = cfg.coupling_ratio * mz / arm
    if abs(w.force[2]) > force_limit:
        return False
    if not mapping.servo_mode and abs(w.force[0]) > force_limit:
        return False
    return True


STAGES = ("init", "horizontal_vertical", "rotation", "done")


@dataclass(frozen=True)
class RemapVerdict:
    command: str
    stage_before: str
    stage_after: str
    horizontal: bool | None = None
    vertical: bool | None = None
    rotation: bool | None = None

    @property
    def done(self) -> bool:
        return self.stage_after == "done"


class RemapSession:
    """Three-iteration confirmation of a mapping against a hidden wiring.

    Stage 1 registers the initial guess unchecked.  Stage 2 re-checks each
    submitted command's forward/vertical response and advances when both
    pass.  Stage 3 additionally checks rotation and finishes when all three
    pass.  The most recently submitted command is always the active mapping,
    pass or fail, mirroring how a pilot flies the current guess.
    """

    def __init__(
        self,
        design: DesignSpec,
        wiring: PlantWiring | None = None,
        check_config: ResponseCheckConfig | None = None,
        initial_command: MappingCommand | str | None = None,
    ):
        self.design = design
        self.wiring = wiring if wiring is not None else PlantWiring.identity()
        self.check_config = check_config if check_config is not None else ResponseCheckConfig()
        self.stage = "init"
        # A pre-loaded guess makes the sticks live immediately; it is not
        # registered as an iteration, so the protocol still starts at init.
        if isinstance(initial_command, str):
            initial_command = parse_command(initial_command)
        self.command: MappingCommand | None = initial_command
        self.verdicts: RemapVerdict | None = None

    @property
    def mapping(self) -> ChannelMapping | None:
        if self.command is None:
            return None
        return command_mapping(self.command)

    @property
    def command_text(self) -> str | None:
        if self.command is None:
            return None
        return render_command(self.command)

    def submit(self, command: MappingCommand | str) -> RemapVerdict:
        if self.stage == "done":
            raise RemapError("remap session already complete")
        if isinstance(command, str):
            command = parse_command(command)
        if isinstance(command.rotation, DcRotation):
            known = set(design_channels(self.design))
            for ch in (command.rotation.left, command.rotation.right):
                if ch not in known:
                    raise RemapError(
                        f"rotation channel {ch} has no thruster in design "
                        f"'{self.design.name}'"
                    )

        before = self.stage
        self.command = command
        mapping = command_mapping(command)

        if before == "init":
            self.stage = "horizontal_vertical"
            verdict = RemapVerdict(render_command(command), before, self.stage)
        elif before == "horizontal_vertical":
            h = check_horizontal(self.design, mapping, self.wiring, self.check_config)
            v = check_vertical(self.design, mapping, self.wiring, self.check_config)
            if h and v:
                self.stage = "rotation"
            verdict = RemapVerdict(
                render_command(command), before, self.stage, horizontal=h, vertical=v
            )
        else:
            h = check_horizontal(self.design, mapping, self.wiring, self.check_config)
            v = check_vertical(self.design, mapping, self.wiring, self.check_config)
            r = check_rotation(self.design, mapping, self.wiring, self.check_config)
            if h and v and r:
                self.stage = "done"
            verdict = RemapVerdict(
                render_command(command),
                before,
                self.stage,
                horizontal=h,
                vertical=v,
                rotation=r,
            )
        self.verdicts = verdict
        return verdict


def design_channels(design: DesignSpec) -> tuple[int, ...]:
    return tuple(t.id for t in design.thrusters)


def remap_step(session: RemapSession, command: MappingCommand | str) -> RemapVerdict:
    """Functional form of :meth:`RemapSession.submit`."""
    return session.submit(command)
