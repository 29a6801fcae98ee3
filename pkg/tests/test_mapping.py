import itertools
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blimpbench.feasibility import DEFAULT_SERVO_DEFLECTION
from blimpbench.mapping import (
    CommandError,
    DcRotation,
    MappingCommand,
    PlantWiring,
    RemapError,
    RemapSession,
    ResponseCheckConfig,
    ServoRotation,
    check_horizontal,
    check_rotation,
    check_vertical,
    command_mapping,
    mix,
    parse_command,
    plant_response,
    render_command,
)

PUBLISHED = [
    "1F2B3U4DN",
    "1F2F3U4DC1L2R",
    "1F2F3U4DC2L1R",
    "1F2U3U4BC1L4R",
    "1F2U3U4BC4L1R",
    "1U2F3N4NS21MLR",
    "1U2F3N4NS21MRL",
]


class TestGrammar:
    def test_initial_command(self):
        cmd = parse_command("1F2B3U4DN")
        assert cmd.channel_roles == ((1, "F"), (2, "B"), (3, "U"), (4, "D"))
        assert cmd.mode == "N" and cmd.rotation is None

    def test_dc_rotation_command(self):
        cmd = parse_command("1F2F3U4DC1L2R")
        assert cmd.mode == "C"
        assert cmd.rotation == DcRotation(left=1, right=2)

    def test_dc_rotation_swapped(self):
        assert parse_command("1F2F3U4DC2L1R").rotation == DcRotation(2, 1)
        assert parse_command("1F2U3U4BC4L1R").rotation == DcRotation(4, 1)

    def test_servo_command(self):
        cmd = parse_command("1U2F3N4NS21MLR")
        assert cmd.mode == "S"
        assert cmd.rotation == ServoRotation(servo_a=2, servo_b=1, order="LR")
        assert parse_command("1U2F3N4NS21MRL").rotation == ServoRotation(2, 1, "RL")

    @pytest.mark.parametrize("text", PUBLISHED)
    def test_published_round_trip(self, text):
        assert render_command(parse_command(text)) == text

    def test_truncated_pairs_position(self):
        with pytest.raises(CommandError) as err:
            parse_command("1F2B3U")
        assert err.value.position == 7

    def test_duplicate_channel_position(self):
        with pytest.raises(CommandError) as err:
            parse_command("1F1B3U4DN")
        assert err.value.position == 3
        assert "duplicate" in err.value.message

    def test_unknown_role(self):
        with pytest.raises(CommandError) as err:
            parse_command("1F2B3U4XN")
        assert err.value.position == 8

    def test_lowercase_rejected(self):
        with pytest.raises(CommandError) as err:
            parse_command("1f2B3U4DN")
        assert err.value.position == 2

    def test_bad_tail(self):
        with pytest.raises(CommandError) as err:
            parse_command("1F2B3U4DX")
        assert err.value.position == 9

    def test_trailing_input(self):
        with pytest.raises(CommandError) as err:
            parse_command("1F2B3U4DNX")
        assert err.value.position == 10

    def test_rotation_channels_must_differ(self):
        with pytest.raises(CommandError):
            parse_command("1F2B3U4DC1L1R")

    def test_servo_channels_must_differ(self):
        with pytest.raises(CommandError) as err:
            parse_command("1F2B3U4DS11MLR")
        assert err.value.position == 11

    def test_dangling_servo_order(self):
        with pytest.raises(CommandError):
            parse_command("1F2B3U4DS12M")

    def test_channel_digit_out_of_range(self):
        with pytest.raises(CommandError) as err:
            parse_command("5F2B3U4DN")
        assert err.value.position == 1

    def test_random_round_trip_thousand(self):
        rng = random.Random(99)
        for _ in range(1000):
            channels = rng.sample([1, 2, 3, 4], 4)
            pairs = tuple((c, rng.choice("FBUDN")) for c in channels)
            kind = rng.choice(("N", "C", "S"))
            if kind == "N":
                cmd = MappingCommand(pairs, "N", None)
            elif kind == "C":
                left, right = rng.sample([1, 2, 3, 4], 2)
                cmd = MappingCommand(pairs, "C", DcRotation(left, right))
            else:
                a, b = rng.sample(range(1, 9), 2)
                cmd = MappingCommand(pairs, "S", ServoRotation(a, b, rng.choice(("LR", "RL"))))
            assert parse_command(render_command(cmd)) == cmd

    @settings(max_examples=500)
    @given(st.text(alphabet="12345678FBUDNCLRSMX yz", max_size=18))
    def test_fuzz_totality(self, text):
        try:
            cmd = parse_command(text)
        except CommandError as err:
            assert 1 <= err.position <= len(text) + 1
        else:
            assert render_command(cmd) == text

    @settings(max_examples=200)
    @given(st.text(max_size=24))
    def test_fuzz_arbitrary_unicode(self, text):
        try:
            parse_command(text)
        except CommandError:
            pass


class TestMixer:
    def test_forward_stick_case_mapping(self):
        mapping = command_mapping(parse_command("1F2U3U4BC4L1R"))
        act = mix(mapping, (0.0, 1.0), 0.0, 1.0)
        assert act.duties[1] == 1.0
        assert act.duties[4] == -1.0  # backward-role channel inverted
        assert act.duties[2] == 0.0 and act.duties[3] == 0.0

    def test_yaw_differential_example(self):
        mapping = command_mapping(parse_command("1F2N3N4FC4L1R"))
        act = mix(mapping, (1.0, 0.0), 0.0, 1.0)
        assert act.duties[4] == 1.0
        assert act.duties[1] == -1.0

    def test_yaw_differential_role_aware_on_backward_channel(self):
        mapping = command_mapping(parse_command("1F2U3U4BC4L1R"))
        act = mix(mapping, (1.0, 0.0), 0.0, 1.0)
        # both duties negative: the reversed channel thrusts against channel 1
        assert act.duties[4] == -1.0
        assert act.duties[1] == -1.0

    def test_slider_gates_everything(self):
        mapping = command_mapping(parse_command("1F2B3U4DC1L2R"))
        act = mix(mapping, (1.0, 1.0), 1.0, 0.0)
        assert all(d == 0.0 for d in act.duties.values())

    def test_vertical_stick(self):
        mapping = command_mapping(parse_command("1F2B3U4DN"))
        act = mix(mapping, (0.0, 0.0), 1.0, 0.8)
        assert act.duties[3] == pytest.approx(0.8)
        assert act.duties[4] == pytest.approx(-0.8)

    def test_servo_angles_mirrored(self):
        mapping = command_mapping(parse_command("1U2F3N4NS21MLR"))
        act = mix(mapping, (0.5, 0.0), 0.0, 1.0)
        assert act.servo_angles[2] == pytest.approx(0.5 * DEFAULT_SERVO_DEFLECTION)
        assert act.servo_angles[1] == pytest.approx(-0.5 * DEFAULT_SERVO_DEFLECTION)

    def test_servo_order_flips_sign(self):
        lr = command_mapping(parse_command("1U2F3N4NS21MLR"))
        rl = command_mapping(parse_command("1U2F3N4NS21MRL"))
        a_lr = mix(lr, (1.0, 0.0), 0.0, 1.0).servo_angles[2]
        a_rl = mix(rl, (1.0, 0.0), 0.0, 1.0).servo_angles[2]
        assert a_lr == -a_rl

    def test_input_validation(self):
        mapping = command_mapping(parse_command("1F2B3U4DN"))
        with pytest.raises(ValueError):
            mix(mapping, (2.0, 0.0), 0.0, 1.0)
        with pytest.raises(ValueError):
            mix(mapping, (0.0, 0.0), 0.0, 1.5)

    @settings(max_examples=300)
    @given(
        x=st.floats(min_value=-1, max_value=1),
        y=st.floats(min_value=-1, max_value=1),
        z=st.floats(min_value=-1, max_value=1),
        s=st.floats(min_value=0, max_value=1),
        text=st.sampled_from(PUBLISHED),
    )
    def test_duties_always_bounded(self, x, y, z, s, text):
        mapping = command_mapping(parse_command(text))
        act = mix(mapping, (x, y), z, s)
        assert all(-1.0 <= d <= 1.0 for d in act.duties.values())


class TestPlantWiring:
    def test_identity_passthrough(self):
        mapping = command_mapping(parse_command("1F2B3U4DN"))
        act = mix(mapping, (0.0, 1.0), 0.0, 1.0)
        assert PlantWiring.identity().apply(act).duties == act.duties

    def test_polarity_flip(self):
        wiring = PlantWiring(polarity={1: -1})
        mapping = command_mapping(parse_command("1F2B3U4DN"))
        act = wiring.apply(mix(mapping, (0.0, 1.0), 0.0, 1.0))
        assert act.duties[1] == -1.0

    def test_permutation(self):
        wiring = PlantWiring(channel_map={1: 2, 2: 1})
        mapping = command_mapping(parse_command("1F2B3U4DN"))
        act = wiring.apply(mix(mapping, (0.0, 1.0), 0.0, 1.0))
        assert act.duties[2] == 1.0 and act.duties[1] == -1.0

    def test_servo_sign(self):
        wiring = PlantWiring(servo_sign=-1)
        mapping = command_mapping(parse_command("1U2F3N4NS21MLR"))
        act = wiring.apply(mix(mapping, (1.0, 0.0), 0.0, 1.0))
        assert act.servo_angles[2] == pytest.approx(-DEFAULT_SERVO_DEFLECTION)

    def test_non_injective_rejected(self):
        with pytest.raises(ValueError):
            PlantWiring(channel_map={1: 3, 2: 3})

    def test_absent_channels_sink_duty(self, vectored_tail):
        # channels 3/4 have no thrusters; commanding them must be harmless
        mapping = command_mapping(parse_command("3F4B1U2NN"))
        w = plant_response(vectored_tail, mapping, PlantWiring.identity(), 0, 1, 0, 1)
        assert w.force == pytest.approx([0.0, 0.0, 0.0])


class TestRemapProtocol:
    def test_aligned_plant_initial_command_passes_iteration_two(self, aligned_quad):
        session = RemapSession(aligned_quad)
        first = session.submit("1F2B3U4DN")
        assert first.stage_before == "init"
        assert first.horizontal is None and first.vertical is None
        second = session.submit("1F2B3U4DN")
        assert second.horizontal and second.vertical
        assert second.stage_after == "rotation"

    def test_four_motor_reversed_lead_sequence(self, four_motor, four_motor_wiring):
        session = RemapSession(four_motor, four_motor_wiring)
        v1 = session.submit("1F2B3U4DN")
        assert (v1.horizontal, v1.vertical, v1.rotation) == (None, None, None)
        v2 = session.submit("1F2U3U4BC1L4R")
        assert v2.horizontal and v2.vertical and v2.rotation is None
        assert v2.stage_after == "rotation"
        v3 = session.submit("1F2U3U4BC4L1R")
        assert v3.horizontal and v3.vertical and v3.rotation
        assert v3.done

    def test_four_motor_wrong_rotation_keeps_stage(self, four_motor, four_motor_wiring):
        session = RemapSession(four_motor, four_motor_wiring)
        session.submit("1F2B3U4DN")
        session.submit("1F2U3U4BC1L4R")
        v = session.submit("1F2U3U4BC1L4R")  # same wrong rotation guess
        assert v.horizontal and v.vertical and not v.rotation
        assert v.stage_after == "rotation"

    def test_vectored_tail_sequence(self, vectored_tail):
        session = RemapSession(vectored_tail)
        session.submit("1F2B3U4DN")
        v2 = session.submit("1U2F3N4NS21MLR")
        assert v2.horizontal and v2.vertical
        v3 = session.submit("1U2F3N4NS21MLR")
        assert not v3.rotation  # LR steers the wrong way on this plant
        v4 = session.submit("1U2F3N4NS21MRL")
        assert v4.rotation and v4.done

    def test_twin_forward_differential_sequence(self, twin_forward):
        session = RemapSession(twin_forward)
        session.submit("1F2B3U4DN")
        v2 = session.submit("1F2F3U4DC1L2R")
        assert v2.horizontal and v2.vertical
        v3 = session.submit("1F2F3U4DC1L2R")
        assert not v3.rotation
        v4 = session.submit("1F2F3U4DC2L1R")
        assert v4.done

    def test_submit_after_done_raises(self, aligned_quad):
        session = RemapSession(aligned_quad)
        session.submit("1F2B3U4DN")
        session.submit("1F2B3U4DN")
        session.submit("1F2B3U4DC2L1R")
        assert session.stage == "done"
        with pytest.raises(RemapError):
            session.submit("1F2B3U4DN")

    def test_rotation_channel_missing_from_design(self, vectored_tail):
        session = RemapSession(vectored_tail)
        with pytest.raises(RemapError):
            session.submit("1U2F3N4NC3L4R")

    def test_invalid_command_rejected_with_position(self, aligned_quad):
        session = RemapSession(aligned_quad)
        with pytest.raises(CommandError):
            session.submit("1F2B3U")


# ---------------------------------------------------------------------------
# exhaustive oracle on a scrambled plant

def oracle_checks(design, command, wiring, cfg=ResponseCheckConfig()):
    """Scalar re-derivation of the three motion checks for one command."""

    roles = dict(command.channel_roles)

    def response(x, y, z, s):
        duties = {c: 0.0 for c in (1, 2, 3, 4)}
        angles = {}
        for c, role in roles.items():
            if role == "F":
                duties[c] += s * y
            elif role == "B":
                duties[c] -= s * y
            elif role == "U":
                duties[c] += s * z
            elif role == "D":
                duties[c] -= s * z
        if command.mode == "C":
            rot = command.rotation
            for ch, sign in ((rot.left, 1.0), (rot.right, -1.0)):
                role_sign = -1.0 if roles.get(ch) in ("B", "D") else 1.0
                duties[ch] += sign * role_sign * s * x
        elif command.mode == "S":
            rot = command.rotation
            sgn = 1.0 if rot.order == "LR" else -1.0
            angles[rot.servo_a] = sgn * x * cfg.max_servo_deflection
            angles[rot.servo_b] = -sgn * x * cfg.max_servo_deflection
        duties = {c: max(-1.0, min(1.0, d)) for c, d in duties.items()}
        wired = {}
        for c, d in duties.items():
            wired[wiring.channel_map.get(c, c)] = wiring.polarity.get(c, 1) * d
        fx = fy = fz = mz = 0.0
        for t in design.thrusters:
            d = max(-1.0, min(1.0, wired.get(t.id, 0.0)))
            thrust = d * t.thrust_max if d >= 0 else -d * t.thrust_min
            kx, ky, kz = t.orientation
            if t.actuator_kind == "servo_vectored" and t.id in angles:
                a = wiring.servo_sign * angles[t.id]
                kx, ky = (
                    math.cos(a) * kx - math.sin(a) * ky,
                    math.sin(a) * kx + math.cos(a) * ky,
                )
            px, py, pz = t.position
            fx += thrust * kx
            fy += thrust * ky
            fz += thrust * kz
            mz += thrust * (px * ky - py * kx)
        return fx, fy, fz, mz

    arm = max(max(math.dist(t.position, (0, 0, 0)) for t in design.thrusters), 0.05)
    fx, fy, fz, mz = response(0.0, 1.0, 0.0, 1.0)
    h = fx >= cfg.min_force and abs(fz) <= cfg.coupling_ratio * fx and abs(
        mz
    ) <= cfg.coupling_ratio * fx * arm
    fx, fy, fz, mz = response(0.0, 0.0, 1.0, 1.0)
    up = -fz
    v = up >= cfg.min_force and abs(fx) <= cfg.coupling_ratio * up and abs(
        mz
    ) <= cfg.coupling_ratio * up * arm
    servo = command.mode == "S"
    fx, fy, fz, mz = response(1.0, 1.0 if servo else 0.0, 0.0, 1.0)
    if command.mode == "N" or mz < cfg.min_moment:
        r = False
    else:
        limit = cfg.coupling_ratio * mz / arm
        r = abs(fz) <= limit and (servo or abs(fx) <= limit)
    return bool(h), bool(v), bool(r)


def all_dc_commands():
    """Every role assignment on canonical channel order, every dc tail."""
    tails = [("N", None)] + [
        ("C", DcRotation(left, right))
        for left, right in itertools.permutations((1, 2, 3, 4), 2)
    ]
    for roles in itertools.product("FBUDN", repeat=4):
        pairs = tuple((c, role) for c, role in zip((1, 2, 3, 4), roles))
        for mode, rot in tails:
            yield MappingCommand(pairs, mode, rot)


class TestExhaustiveOracle:
    def test_machine_accepts_exactly_the_oracle_set(self, twin_forward):
        wiring = PlantWiring(channel_map={1: 2, 2: 1, 3: 4, 4: 3})
        cfg = ResponseCheckConfig()
        accepted = []
        total = 0
        for command in all_dc_commands():
            total += 1
            mapping = command_mapping(command)
            machine = (
                check_horizontal(twin_forward, mapping, wiring, cfg),
                check_vertical(twin_forward, mapping, wiring, cfg),
                check_rotation(twin_forward, mapping, wiring, cfg),
            )
            oracle = oracle_checks(twin_forward, command, wiring, cfg)
            assert machine == oracle, render_command(command)
            if all(machine):
                accepted.append(command)
        assert total == 625 * 13
        assert len(accepted) >= 1
        # the machine reaches done through any accepted terminal command
        sample = accepted[:: max(1, len(accepted) // 5)]
        for terminal in sample:
            session = RemapSession(twin_forward, wiring)
            session.submit("1F2B3U4DN")
            session.submit(terminal)  # passes H/V, advances
            verdict = session.submit(terminal)
            assert verdict.done, render_command(terminal)
