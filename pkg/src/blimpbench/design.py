"""Design data model for indoor miniature blimps.

A design describes everything the evaluation pipeline needs: the thruster
layout (positions, axis orientations, thrust bounds, channel bindings), the
balloon envelope, the mass budget, per-axis drag parameters, and the ambient
environment constants.

Conventions:
  - Body frame: x forward, y right, z down.  World frame is likewise z-down,
    so a net upward force has a negative z component.
  - All internal quantities are SI (meters, kilograms, newtons).
  - Design files are TOML.  Lengths are meters unless the key carries a
    ``_mm`` suffix; masses are kilograms unless the key carries ``_g``;
    thrust bounds are grams-force under ``thrust_range_g`` (converted with
    the design's own gravity constant) or newtons under ``thrust_range_n``.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field

if sys.version_info >= (3, 11):
    import tomllib as _toml
else:
    import tomli as _toml

__all__ = [
    "DesignError",
    "DesignParseError",
    "DesignSchemaError",
    "DesignInvariantError",
    "EnvironmentConstants",
    "ThrusterSpec",
    "BalloonSpec",
    "MassBudget",
    "DragConfig",
    "HardwareDims",
    "ThrusterModel",
    "DesignSpec",
    "BALLOON_SHAPES",
    "ACTUATOR_KINDS",
    "DEFAULT_FLATNESS_RATIO",
    "parse_design",
    "design_from_mapping",
    "design_to_mapping",
    "render_design",
    "duty_to_thrust",
    "thrust_to_duty",
]

BALLOON_SHAPES = ("sphere", "saucer", "oval", "irregular_oval")
ACTUATOR_KINDS = ("dc_motor", "servo_vectored")

# Flatness ratio (polar semi-axis / smaller equatorial semi-axis) assumed for
# the oblate inflation model when the design file does not override it.
DEFAULT_FLATNESS_RATIO = {"saucer": 0.6, "oval": 0.75, "irregular_oval": 0.75}


class DesignError(ValueError):
    """Base class for design-file problems.

    ``path`` locates the offending field as a dotted path, e.g.
    ``thrusters[1].orientation``, when one is known.
    """

    def __init__(self, message: str, path: str = ""):
        super().__init__(message)
        self.message = message
        self.path = path

    def __str__(self) -> str:
        if self.path:
            return f"{self.path}: {self.message}"
        return self.message


class DesignParseError(DesignError):
    """Document is not syntactically valid TOML (position in message)."""


class DesignSchemaError(DesignError):
    """Missing or unknown key, or a value of the wrong type."""


class DesignInvariantError(DesignError):
    """Values are well-formed but violate a model invariant."""


@dataclass(frozen=True)
class EnvironmentConstants:
    """Ambient constants used for buoyancy and drag computations."""

    air_density: float = 1.225  # kg/m^3
    helium_density: float = 0.1786  # kg/m^3
    gravity: float = 9.81  # m/s^2

    def __post_init__(self) -> None:
        for name in ("air_density", "helium_density", "gravity"):
            if not getattr(self, name) > 0.0:
                raise DesignInvariantError("must be strictly positive", f"env.{name}")
        if not self.air_density > self.helium_density:
            raise DesignInvariantError(
                "air_density must exceed helium_density", "env.air_density"
            )


@dataclass(frozen=True)
class ThrusterSpec:
    """One thrust component bound to a motor-board channel.

    ``orientation`` selects the body axis the thrust acts along: exactly one
    entry is nonzero and equals +1 or -1 (-1 expresses a reverse-mounted
    motor).  ``thrust_min`` may be negative (reversible propeller) and only
    needs to satisfy thrust_min <= thrust_max.
    """

    id: int
    position: tuple[float, float, float]
    orientation: tuple[int, int, int]
    thrust_min: float
    thrust_max: float
    actuator_kind: str = "dc_motor"

    def __post_init__(self) -> None:
        where = f"thruster {self.id}"
        if not (isinstance(self.id, int) and self.id >= 1):
            raise DesignInvariantError("channel id must be a positive integer", "thrusters.id")
        if len(self.position) != 3 or not all(_finite(v) for v in self.position):
            raise DesignInvariantError(f"{where}: position must be a finite 3-vector", "position")
        nonzero = [k for k in self.orientation if k != 0]
        if len(self.orientation) != 3 or any(k not in (-1, 0, 1) for k in self.orientation):
            raise DesignInvariantError(
                f"{where}: orientation entries must be -1, 0 or +1", "orientation"
            )
        if len(nonzero) != 1:
            raise DesignInvariantError(
                f"{where}: orientation must have exactly one nonzero entry", "orientation"
            )
        if not (_finite(self.thrust_min) and _finite(self.thrust_max)):
            raise DesignInvariantError(f"{where}: thrust bounds must be finite", "thrust_range")
        if self.thrust_min > self.thrust_max:
            raise DesignInvariantError(
                f"{where}: thrust_min must not exceed thrust_max", "thrust_range"
            )
        if self.actuator_kind not in ACTUATOR_KINDS:
            raise DesignInvariantError(
                f"{where}: actuator must be one of {ACTUATOR_KINDS}", "actuator"
            )

    @property
    def axis(self) -> int:
        """Index (0..2) of the body axis this thruster acts along."""
        for i, k in enumerate(self.orientation):
            if k != 0:
                return i
        raise AssertionError("unreachable: orientation validated non-degenerate")

    @property
    def model(self) -> "ThrusterModel":
        return ThrusterModel(self.thrust_min, self.thrust_max)


@dataclass(frozen=True)
class BalloonSpec:
    """Balloon envelope geometry and mass.

    ``envelope_2d`` gives the deflated flat envelope's semi-axes.  When the
    user has measured the inflated balloon, ``inflated_semi_axes`` short-cuts
    the inflation model and the volume is the exact ellipsoid volume.
    """

    shape: str
    envelope_2d: tuple[float, float]
    envelope_mass: float
    inflated_semi_axes: tuple[float, float, float] | None = None
    flatness_ratio: float | None = None

    def __post_init__(self) -> None:
        if self.shape not in BALLOON_SHAPES:
            raise DesignInvariantError(
                f"shape must be one of {BALLOON_SHAPES}", "balloon.shape"
            )
        if len(self.envelope_2d) != 2 or not all(v > 0 for v in self.envelope_2d):
            raise DesignInvariantError(
                "deflated semi-axes must be strictly positive", "balloon.envelope_2d"
            )
        if self.shape == "sphere" and abs(self.envelope_2d[0] - self.envelope_2d[1]) > 1e-12:
            raise DesignInvariantError(
                "sphere requires equal deflated semi-axes", "balloon.envelope_2d"
            )
        if self.envelope_mass < 0:
            raise DesignInvariantError("envelope mass must be >= 0", "balloon.envelope_mass")
        if self.inflated_semi_axes is not None:
            if len(self.inflated_semi_axes) != 3 or not all(
                v > 0 for v in self.inflated_semi_axes
            ):
                raise DesignInvariantError(
                    "inflated semi-axes must be strictly positive",
                    "balloon.inflated_semi_axes",
                )
        if self.flatness_ratio is not None and not self.flatness_ratio > 0:
            raise DesignInvariantError(
                "flatness_ratio must be strictly positive", "balloon.flatness_ratio"
            )

    @property
    def effective_flatness(self) -> float:
        if self.flatness_ratio is not None:
            return self.flatness_ratio
        return DEFAULT_FLATNESS_RATIO.get(self.shape, 1.0)


@dataclass(frozen=True)
class MassBudget:
    """Non-envelope structural masses (envelope mass lives on the balloon)."""

    electronics_mass: float
    support_mass: float

    def __post_init__(self) -> None:
        if self.electronics_mass < 0:
            raise DesignInvariantError("must be >= 0", "masses.electronics")
        if self.support_mass < 0:
            raise DesignInvariantError("must be >= 0", "masses.support")


@dataclass(frozen=True)
class DragConfig:
    """Per-axis drag coefficients and the cross-sectional areas they act on.

    Axis pairing for motion along x/y/z: cd_x with csa_yz, cd_y with csa_xz,
    cd_z with csa_xy (the area facing the motion).
    """

    cd_x: float
    cd_y: float
    cd_z: float
    csa_yz: float
    csa_xz: float
    csa_xy: float

    def __post_init__(self) -> None:
        for name in ("cd_x", "cd_y", "cd_z", "csa_yz", "csa_xz", "csa_xy"):
            if not getattr(self, name) > 0:
                raise DesignInvariantError("must be strictly positive", f"drag.{name}")

    def axis_pair(self, axis: int) -> tuple[float, float]:
        """(cd, csa) governing motion along body axis 0, 1 or 2."""
        return (
            (self.cd_x, self.csa_yz),
            (self.cd_y, self.csa_xz),
            (self.cd_z, self.csa_xy),
        )[axis]


@dataclass(frozen=True)
class HardwareDims:
    """Physical hardware dimensions.  Metadata only; nothing computes on it."""

    propeller_diameter: float
    motor_length: float
    motor_diameter: float
    board_dims: tuple[float, float, float]

    def __post_init__(self) -> None:
        if not (
            self.propeller_diameter > 0
            and self.motor_length > 0
            and self.motor_diameter > 0
            and len(self.board_dims) == 3
            and all(v > 0 for v in self.board_dims)
        ):
            raise DesignInvariantError("hardware dimensions must be positive", "hardware")


@dataclass(frozen=True)
class ThrusterModel:
    """Piecewise-linear map from normalized duty in [-1, 1] to thrust.

    Zero duty maps to zero thrust; duty +1 maps to thrust_max and duty -1 to
    thrust_min.  The map is monotone non-decreasing whenever
    thrust_min <= 0 <= thrust_max, which holds for every physical motor
    (a stopped motor produces no thrust).
    """

    thrust_min: float
    thrust_max: float

    def thrust(self, duty: float) -> float:
        if not -1.0 <= duty <= 1.0:
            raise ValueError(f"duty {duty} outside [-1, 1]")
        if duty >= 0.0:
            return duty * self.thrust_max
        return -duty * self.thrust_min

    def duty(self, thrust: float) -> float:
        """Inverse of :meth:`thrust` (thrust must lie within the bounds)."""
        if not self.thrust_min - 1e-12 <= thrust <= self.thrust_max + 1e-12:
            raise ValueError(f"thrust {thrust} outside [{self.thrust_min}, {self.thrust_max}]")
        if thrust >= 0.0:
            return min(1.0, thrust / self.thrust_max) if self.thrust_max > 0 else 0.0
        return max(-1.0, -thrust / self.thrust_min) if self.thrust_min < 0 else 0.0


def duty_to_thrust(model: ThrusterModel, duty: float) -> float:
    """Thrust in newtons produced at a normalized duty in [-1, 1]."""
    return model.thrust(duty)


def thrust_to_duty(model: ThrusterModel, thrust: float) -> float:
    """Duty that reproduces ``thrust`` through ``model``."""
    return model.duty(thrust)


@dataclass(frozen=True)
class DesignSpec:
    """A complete, validated blimp design."""

    name: str
    thrusters: tuple[ThrusterSpec, ...]
    balloon: BalloonSpec
    masses: MassBudget
    drag: DragConfig
    env: EnvironmentConstants = field(default_factory=EnvironmentConstants)
    hardware: HardwareDims | None = None

    def __post_init__(self) -> None:
        if len(self.thrusters) < 1:
            raise DesignInvariantError("at least one thruster required", "thrusters")
        ids = [t.id for t in self.thrusters]
        if len(set(ids)) != len(ids):
            raise DesignInvariantError("channel ids must be unique", "thrusters.id")

    @property
    def channel_ids(self) -> tuple[int, ...]:
        return tuple(t.id for t in self.thrusters)

    def thruster_by_id(self, channel: int) -> ThrusterSpec | None:
        for t in self.thrusters:
            if t.id == channel:
                return t
        return None


def _finite(v: float) -> bool:
    return isinstance(v, (int, float)) and v == v and abs(v) != float("inf")


# ---------------------------------------------------------------------------
# Parsing

_ENV_KEYS = {"air_density", "helium_density", "gravity"}
_BALLOON_KEYS = {
    "shape",
    "envelope_2d",
    "envelope_2d_mm",
    "inflated_semi_axes",
    "inflated_semi_axes_mm",
    "envelope_mass",
    "envelope_mass_g",
    "flatness_ratio",
}
_MASSES_KEYS = {"electronics", "electronics_g", "support", "support_g"}
_DRAG_KEYS = {"cd_x", "cd_y", "cd_z", "csa_yz", "csa_xz", "csa_xy"}
_THRUSTER_KEYS = {
    "id",
    "position",
    "position_mm",
    "orientation",
    "thrust_range_g",
    "thrust_range_n",
    "actuator",
}
_HARDWARE_KEYS = {
    "propeller_diameter",
    "propeller_diameter_mm",
    "motor_length",
    "motor_length_mm",
    "motor_diameter",
    "motor_diameter_mm",
    "board_dims",
    "board_dims_mm",
}
_TOP_KEYS = {"name", "env", "balloon", "masses", "drag", "thrusters", "hardware"}


def _require_table(data: dict, key: str) -> dict:
    if key not in data:
        raise DesignSchemaError(f"missing section [{key}]", key)
    if not isinstance(data[key], dict):
        raise DesignSchemaError("expected a table", key)
    return data[key]


def _check_keys(table: dict, allowed: set[str], path: str) -> None:
    for key in table:
        if key not in allowed:
            raise DesignSchemaError(f"unknown key '{key}'", f"{path}.{key}" if path else key)


def _number(table: dict, key: str, path: str) -> float:
    value = table[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not _finite(value):
        raise DesignSchemaError("expected a finite number", f"{path}.{key}")
    return float(value)


def _vector(table: dict, key: str, path: str, n: int) -> tuple[float, ...]:
    value = table[key]
    if not isinstance(value, list) or len(value) != n:
        raise DesignSchemaError(f"expected a list of {n} numbers", f"{path}.{key}")
    out = []
    for i, v in enumerate(value):
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not _finite(v):
            raise DesignSchemaError(f"expected a finite number at index {i}", f"{path}.{key}")
        out.append(float(v))
    return tuple(out)


def _length(table: dict, key: str, path: str) -> float | None:
    """Scalar length: ``key`` in meters or ``key_mm`` in millimeters."""
    if key in table and f"{key}_mm" in table:
        raise DesignSchemaError(f"give either '{key}' or '{key}_mm', not both", f"{path}.{key}")
    if key in table:
        return _number(table, key, path)
    if f"{key}_mm" in table:
        return _number(table, f"{key}_mm", path) / 1000.0
    return None


def _length_vector(table: dict, key: str, path: str, n: int) -> tuple[float, ...] | None:
    if key in table and f"{key}_mm" in table:
        raise DesignSchemaError(f"give either '{key}' or '{key}_mm', not both", f"{path}.{key}")
    if key in table:
        return _vector(table, key, path, n)
    if f"{key}_mm" in table:
        return tuple(v / 1000.0 for v in _vector(table, f"{key}_mm", path, n))
    return None


def _mass(table: dict, key: str, path: str) -> float | None:
    """Scalar mass: ``key`` in kilograms or ``key_g`` in grams."""
    if key in table and f"{key}_g" in table:
        raise DesignSchemaError(f"give either '{key}' or '{key}_g', not both", f"{path}.{key}")
    if key in table:
        return _number(table, key, path)
    if f"{key}_g" in table:
        return _number(table, f"{key}_g", path) / 1000.0
    return None


def design_from_mapping(data: dict) -> DesignSpec:
    """Build and validate a DesignSpec from a parsed key-value tree.

    The tree is the exact shape a TOML design file decodes to, so this is
    shared by the file parser and the JSON API.  Raises a subclass of
    :class:`DesignError` with a dotted ``path`` on the first problem found.
    """
    if not isinstance(data, dict):
        raise DesignSchemaError("design document must be a table", "")
    _check_keys(data, _TOP_KEYS, "")

    name = data.get("name", "unnamed")
    if not isinstance(name, str) or not name:
        raise DesignSchemaError("expected a non-empty string", "name")

    env_table = data.get("env", {})
    if not isinstance(env_table, dict):
        raise DesignSchemaError("expected a table", "env")
    _check_keys(env_table, _ENV_KEYS, "env")
    env_kwargs = {k: _number(env_table, k, "env") for k in env_table}
    env = EnvironmentConstants(**env_kwargs)

    balloon_table = _require_table(data, "balloon")
    _check_keys(balloon_table, _BALLOON_KEYS, "balloon")
    if "shape" not in balloon_table:
        raise DesignSchemaError("missing key 'shape'", "balloon.shape")
    shape = balloon_table["shape"]
    if not isinstance(shape, str):
        raise DesignSchemaError("expected a string", "balloon.shape")
    envelope_2d = _length_vector(balloon_table, "envelope_2d", "balloon", 2)
    if envelope_2d is None:
        raise DesignSchemaError("missing key 'envelope_2d'", "balloon.envelope_2d")
    inflated = _length_vector(balloon_table, "inflated_semi_axes", "balloon", 3)
    envelope_mass = _mass(balloon_table, "envelope_mass", "balloon")
    if envelope_mass is None:
        raise DesignSchemaError("missing key 'envelope_mass'", "balloon.envelope_mass")
    flatness = balloon_table.get("flatness_ratio")
    if flatness is not None:
        flatness = _number(balloon_table, "flatness_ratio", "balloon")
    balloon = BalloonSpec(
        shape=shape,
        envelope_2d=envelope_2d,
        envelope_mass=envelope_mass,
        inflated_semi_axes=inflated,
        flatness_ratio=flatness,
    )

    masses_table = _require_table(data, "masses")
    _check_keys(masses_table, _MASSES_KEYS, "masses")
    electronics = _mass(masses_table, "electronics", "masses")
    support = _mass(masses_table, "support", "masses")
    if electronics is None:
        raise DesignSchemaError("missing key 'electronics'", "masses.electronics")
    if support is None:
        raise DesignSchemaError("missing key 'support'", "masses.support")
    masses = MassBudget(electronics_mass=electronics, support_mass=support)

    drag_table = _require_table(data, "drag")
    _check_keys(drag_table, _DRAG_KEYS, "drag")
    for key in _DRAG_KEYS:
        if key not in drag_table:
            raise DesignSchemaError(f"missing key '{key}'", f"drag.{key}")
    drag = DragConfig(**{k: _number(drag_table, k, "drag") for k in _DRAG_KEYS})

    if "thrusters" not in data:
        raise DesignSchemaError("missing [[thrusters]] section", "thrusters")
    thruster_list = data["thrusters"]
    if not isinstance(thruster_list, list) or not all(
        isinstance(t, dict) for t in thruster_list
    ):
        raise DesignSchemaError("expected an array of tables", "thrusters")
    thrusters = []
    for i, t in enumerate(thruster_list):
        path = f"thrusters[{i}]"
        _check_keys(t, _THRUSTER_KEYS, path)
        if "id" not in t:
            raise DesignSchemaError("missing key 'id'", f"{path}.id")
        if isinstance(t["id"], bool) or not isinstance(t["id"], int):
            raise DesignSchemaError("expected an integer", f"{path}.id")
        position = _length_vector(t, "position", path, 3)
        if position is None:
            raise DesignSchemaError("missing key 'position'", f"{path}.position")
        if "orientation" not in t:
            raise DesignSchemaError("missing key 'orientation'", f"{path}.orientation")
        orientation_f = _vector(t, "orientation", path, 3)
        orientation = tuple(int(v) for v in orientation_f)
        if any(o != v for o, v in zip(orientation, orientation_f)):
            raise DesignSchemaError(
                "orientation entries must be integers", f"{path}.orientation"
            )
        if "thrust_range_g" in t and "thrust_range_n" in t:
            raise DesignSchemaError(
                "give either 'thrust_range_g' or 'thrust_range_n', not both",
                f"{path}.thrust_range_g",
            )
        if "thrust_range_g" in t:
            lo_g, hi_g = _vector(t, "thrust_range_g", path, 2)
            # grams-force -> newtons with the design's own gravity constant
            lo, hi = lo_g * env.gravity / 1000.0, hi_g * env.gravity / 1000.0
        elif "thrust_range_n" in t:
            lo, hi = _vector(t, "thrust_range_n", path, 2)
        else:
            raise DesignSchemaError(
                "missing key 'thrust_range_g' (or 'thrust_range_n')",
                f"{path}.thrust_range_g",
            )
        actuator = t.get("actuator", "dc_motor")
        if not isinstance(actuator, str):
            raise DesignSchemaError("expected a string", f"{path}.actuator")
        thrusters.append(
            ThrusterSpec(
                id=t["id"],
                position=position,
                orientation=orientation,  # type: ignore[arg-type]
                thrust_min=lo,
                thrust_max=hi,
                actuator_kind=actuator,
            )
        )

    hardware = None
    if "hardware" in data:
        hw = data["hardware"]
        if not isinstance(hw, dict):
            raise DesignSchemaError("expected a table", "hardware")
        _check_keys(hw, _HARDWARE_KEYS, "hardware")
        dp = _length(hw, "propeller_diameter", "hardware")
        lm = _length(hw, "motor_length", "hardware")
        dm = _length(hw, "motor_diameter", "hardware")
        board = _length_vector(hw, "board_dims", "hardware", 3)
        if None in (dp, lm, dm) or board is None:
            raise DesignSchemaError(
                "hardware section needs propeller_diameter, motor_length, "
                "motor_diameter and board_dims",
                "hardware",
            )
        hardware = HardwareDims(
            propeller_diameter=dp, motor_length=lm, motor_diameter=dm, board_dims=board
        )

    return DesignSpec(
        name=name,
        thrusters=tuple(thrusters),
        balloon=balloon,
        masses=masses,
        drag=drag,
        env=env,
        hardware=hardware,
    )


def parse_design(text: str) -> DesignSpec:
    """Parse a TOML design document into a validated DesignSpec.

    Raises :class:`DesignParseError` on TOML syntax errors (the message
    carries the line/column position), :class:`DesignSchemaError` for
    missing or unknown keys and :class:`DesignInvariantError` when values
    violate a model rule.
    """
    try:
        data = _toml.loads(text)
    except _toml.TOMLDecodeError as exc:
        raise DesignParseError(str(exc)) from exc
    return design_from_mapping(data)


# ---------------------------------------------------------------------------
# Serialization

def design_to_mapping(design: DesignSpec) -> dict:
    """Plain key-value tree (SI units) that re-parses to an equal design."""
    data: dict = {
        "name": design.name,
        "env": {
            "air_density": design.env.air_density,
            "helium_density": design.env.helium_density,
            "gravity": design.env.gravity,
        },
        "balloon": {
            "shape": design.balloon.shape,
            "envelope_2d": list(design.balloon.envelope_2d),
            "envelope_mass": design.balloon.envelope_mass,
        },
        "masses": {
            "electronics": design.masses.electronics_mass,
            "support": design.masses.support_mass,
        },
        "drag": {
            "cd_x": design.drag.cd_x,
            "cd_y": design.drag.cd_y,
            "cd_z": design.drag.cd_z,
            "csa_yz": design.drag.csa_yz,
            "csa_xz": design.drag.csa_xz,
            "csa_xy": design.drag.csa_xy,
        },
        "thrusters": [
            {
                "id": t.id,
                "position": list(t.position),
                "orientation": list(t.orientation),
                "thrust_range_n": [t.thrust_min, t.thrust_max],
                "actuator": t.actuator_kind,
            }
            for t in design.thrusters
        ],
    }
    if design.balloon.inflated_semi_axes is not None:
        data["balloon"]["inflated_semi_axes"] = list(design.balloon.inflated_semi_axes)
    if design.balloon.flatness_ratio is not None:
        data["balloon"]["flatness_ratio"] = design.balloon.flatness_ratio
    if design.hardware is not None:
        data["hardware"] = {
            "propeller_diameter": design.hardware.propeller_diameter,
            "motor_length": design.hardware.motor_length,
            "motor_diameter": design.hardware.motor_diameter,
            "board_dims": list(design.hardware.board_dims),
        }
    return data


def _toml_scalar(value) -> str:
    if isinstance(value, str):
        escaped = value.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if value != value or abs(value) == float("inf"):
            raise ValueError("non-finite float not representable")
        return repr(value)
    if isinstance(value, list):
        return "[" + ", ".join(_toml_scalar(v) for v in value) + "]"
    raise TypeError(f"cannot serialize {type(value)!r}")


def render_design(design: DesignSpec) -> str:
    """Canonical TOML text for a design.

    Deterministic output (fixed key order, repr floats), so equal designs
    always render byte-identically; used for persistence and content hashes.
    """
    data = design_to_mapping(design)
    lines = [f"name = {_toml_scalar(data['name'])}", ""]
    for section in ("env", "balloon", "masses", "drag"):
        lines.append(f"[{section}]")
        for key, value in data[section].items():
            lines.append(f"{key} = {_toml_scalar(value)}")
        lines.append("")
    for t in data["thrusters"]:
        lines.append("[[thrusters]]")
        for key, value in t.items():
            lines.append(f"{key} = {_toml_scalar(value)}")
        lines.append("")
    if "hardware" in data:
        lines.append("[hardware]")
        for key, value in data["hardware"].items():
            lines.append(f"{key} = {_toml_scalar(value)}")
        lines.append("")
    return "\n".join(lines)
