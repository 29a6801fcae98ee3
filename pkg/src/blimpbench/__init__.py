"""blimpbench: design and evaluation workbench for indoor miniature blimps.

Validate a thruster/balloon/mass configuration against motion-primitive and
payload criteria, predict steady-state performance, simulate the linear
flight dynamics, and confirm joystick channel mappings against a simulated
plant.
"""

from .design import (
    BalloonSpec,
    DesignError,
    DesignInvariantError,
    DesignParseError,
    DesignSchemaError,
    DesignSpec,
    DragConfig,
    EnvironmentConstants,
    HardwareDims,
    MassBudget,
    ThrusterModel,
    ThrusterSpec,
    duty_to_thrust,
    parse_design,
    render_design,
    thrust_to_duty,
)
from .feasibility import (
    FeasibilityReport,
    PrimitiveCertificate,
    Wrench,
    buoyancy,
    check_primitive,
    deflated_radius_for_sphere,
    envelope_volume,
    evaluate_design,
    naive_motion_check,
    net_wrench,
    payload_mass,
    total_mass,
    volume_percent_error,
)
from .mapping import (
    ChannelMapping,
    CommandError,
    MappingCommand,
    PlantWiring,
    RemapSession,
    RemapVerdict,
    command_mapping,
    mix,
    parse_command,
    plant_response,
    remap_step,
    render_command,
)
from .performance import (
    FeasibilityFailure,
    PerformanceReport,
    drag_force,
    max_performance,
    rotation_matrix,
    terminal_drag,
    terminal_velocity,
)
from .simulator import (
    Dynamics,
    SessionManager,
    SimConfig,
    SimSession,
    SimState,
    SimulationDiverged,
    Trajectory,
    run,
    step,
    trajectory_csv,
)
from .store import DesignStore, content_hash

__version__ = "0.1.0"
