"""Tests for programs, SE/PT builders and the sequencer."""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from nvpump.core.exceptions import ErrorCode, NVPumpError, ProgramBuildError, SpinDomainError
from nvpump.protocol.builders import (
    Branch,
    PaMapping,
    PulseModel,
    build_pt_program,
    build_se_program,
    flip_probability_for,
    pt_sources,
    rf_angle_for,
)
from nvpump.protocol.engine import ProtocolEngine, run_program, run_recursive_series
from nvpump.protocol.program import (
    InstructionKind,
    LaserRole,
    ProtocolProgram,
    PulseInstruction,
    RepeatBlock,
)
from nvpump.spin.optics import OpticalParams
from nvpump.spin.pulses import DriveSpec, SelectivityMode
from nvpump.spin.state import DensityMatrix, initial_state, product_state
from nvpump.spin.system import SpinSystem, Transition, level_index
from nvpump.toymodel import ToyModelParams, target_series


LASER = PulseInstruction.laser(OpticalParams())
SHELVE = PulseInstruction.pulse(DriveSpec(transition=Transition.mw(0, -1)))


def labels(program: ProtocolProgram) -> list[str]:
    return [instruction.description for instruction in program.instructions()]


class TestProgram:
    """Test program structure and validation."""

    def test_pulse_kind_follows_channel(self):
        assert SHELVE.kind is InstructionKind.MW_PULSE
        rf = PulseInstruction.pulse(DriveSpec(transition=Transition.rf(-1, 1, 0)))
        assert rf.kind is InstructionKind.RF_PULSE

    def test_kind_channel_mismatch(self):
        with pytest.raises(SpinDomainError):
            PulseInstruction(
                kind=InstructionKind.RF_PULSE, drive=DriveSpec(transition=Transition.mw(0))
            )

    def test_laser_needs_optics(self):
        with pytest.raises(ValidationError, match="needs optics"):
            PulseInstruction(kind=InstructionKind.LASER)

    def test_empty_program(self):
        with pytest.raises(ProgramBuildError) as exc_info:
            ProtocolProgram(steps=())
        assert exc_info.value.code == ErrorCode.EMPTY_PROGRAM

    def test_empty_repeat_block(self):
        with pytest.raises(ProgramBuildError):
            RepeatBlock(count=2, body=())

    def test_outer_repeat_collapses(self):
        """Test a lone repeat block becomes the program's cycle count."""
        program = ProtocolProgram(
            steps=(RepeatBlock(count=3, body=(RepeatBlock(count=2, body=(SHELVE, LASER)),)),)
        )
        assert program.repeat_count == 6
        assert program.steps == (SHELVE, LASER)

    def test_nested_repeat_flattens(self):
        program = ProtocolProgram(steps=(SHELVE, RepeatBlock(count=2, body=(LASER,)), SHELVE))
        assert program.repeat_count == 1
        assert len(list(program.instructions())) == 4
        assert len(program.transitions()) == 2

    def test_calibrated_keeps_duration_and_role(self):
        program = ProtocolProgram(
            steps=(
                SHELVE,
                PulseInstruction.laser(OpticalParams(pump_duration=1.0), LaserRole.REPUMP),
                LASER,
            )
        )
        pump = OpticalParams(nuclear_flip_rate=9.0)
        repump = OpticalParams.repump()
        lasers = [i for i in program.calibrated(pump, repump).instructions() if i.optics]
        assert lasers[0].optics.pump_duration == 1.0
        assert lasers[0].optics.nuclear_flip_rate == 0.0
        assert lasers[1].optics.nuclear_flip_rate == 9.0
        assert program.calibrated(pump, repump).structurally_equal(program)

    def test_without_rf_drops_rf_pulses(self, system_30mt):
        rf = PulseInstruction.pulse(DriveSpec(transition=Transition.rf(-1, 1, 0)))
        program = ProtocolProgram(
            steps=(SHELVE, RepeatBlock(count=2, body=(rf,)), rf, LASER), repeat_count=3
        )
        stripped = program.without_rf()
        assert stripped.steps == (SHELVE, LASER)
        assert stripped.repeat_count == 3
        assert build_pt_program(system_30mt).without_rf().summary()["counts"] == {
            "mw": 2,
            "laser": 2,
        }

    def test_without_rf_needs_something_left(self):
        rf = PulseInstruction.pulse(DriveSpec(transition=Transition.rf(-1, 1, 0)))
        with pytest.raises(ProgramBuildError) as exc_info:
            ProtocolProgram(steps=(rf,)).without_rf()
        assert exc_info.value.code == ErrorCode.EMPTY_PROGRAM

    def test_summary(self, system_30mt):
        summary = build_pt_program(system_30mt).summary()
        assert summary["name"] == "pt"
        assert summary["instructions_per_cycle"] == 6
        assert summary["counts"] == {"mw": 2, "rf": 2, "laser": 2}
        assert summary["transitions"][0] == "mw (0,+1)->(-1,+1)"

    def test_structural_equality_ignores_name(self):
        first = ProtocolProgram(steps=(SHELVE, LASER), name="a")
        second = ProtocolProgram(steps=(SHELVE, LASER), name="b")
        assert first.structurally_equal(second)
        assert not first.structurally_equal(first.with_repeat(2))


class TestBuilders:
    """Test the SE and PT program builders."""

    def test_se_order(self, system_30mt):
        assert labels(build_se_program(system_30mt)) == [
            "mw (0,+1)->(+1,+1)",
            "rf (+1,+1)->(+1,0)",
            "mw (0,-1)->(-1,-1)",
            "rf (-1,-1)->(-1,0)",
        ]

    def test_se_gamma_first(self, system_30mt):
        program = build_se_program(system_30mt, alpha_first=False)
        assert labels(program)[0] == "mw (0,-1)->(-1,-1)"

    def test_pt_minus_branch(self, system_30mt):
        program = build_pt_program(system_30mt)
        assert labels(program) == [
            "mw (0,+1)->(-1,+1)",
            "rf (-1,+1)->(-1,0)",
            "laser 0.25us repump",
            "mw (0,-1)->(-1,-1)",
            "rf (-1,-1)->(-1,0)",
            "laser 0.25us pump",
        ]

    def test_pt_plus_branch_target_plus(self, system_30mt):
        program = build_pt_program(system_30mt, branch=Branch.PLUS, target_mi=1)
        assert labels(program)[:2] == ["mw (0,-1)->(+1,-1)", "rf (+1,-1)->(+1,0)"]
        assert labels(program)[3:5] == ["mw (0,0)->(+1,0)", "rf (+1,0)->(+1,+1)"]

    @pytest.mark.parametrize("target, sources", [(0, [1, -1]), (1, [-1, 0]), (-1, [1, 0])])
    def test_pt_sources(self, target, sources):
        assert pt_sources(target) == sources

    def test_pt_bad_target(self):
        with pytest.raises(SpinDomainError):
            pt_sources(2)

    @pytest.mark.parametrize(
        "p_a, mapping, angle",
        [
            (1.0, PaMapping.SINE, math.pi),
            (0.5, PaMapping.SINE, math.pi / 2),
            (0.5, PaMapping.LINEAR, math.pi / 2),
            (0.25, PaMapping.LINEAR, math.pi / 4),
            (0.0, PaMapping.SINE, 0.0),
        ],
    )
    def test_rf_angle_for(self, p_a, mapping, angle):
        assert rf_angle_for(p_a, mapping) == pytest.approx(angle)
        assert flip_probability_for(angle, mapping) == pytest.approx(p_a, abs=1e-12)

    def test_rf_angle_rejects_probability(self):
        with pytest.raises(ProgramBuildError):
            rf_angle_for(1.5)

    def test_pulse_model_rabi(self):
        model = PulseModel(selectivity_mode=SelectivityMode.RABI, rf_rabi_frequency=0.02)
        drive = model.drive(Transition.rf(-1, 1, 0))
        assert drive.rabi_frequency == 0.02
        assert drive.selectivity_mode is SelectivityMode.RABI
        assert model.without_rf().rf_angle == 0.0


class TestEngine:
    """Test the sequencer against hand-derived populations."""

    def test_se_polarizes_in_one_cycle(self, system_30mt):
        state, trace = run_program(build_se_program(system_30mt), initial_state(), system_30mt)
        assert state.nuclear_fractions() == pytest.approx((0.0, 1.0, 0.0), abs=1e-12)
        assert trace.max_trace_drift < 1e-10
        assert trace.warnings == []

    def test_se_without_rf_keeps_nucleus(self, system_30mt):
        program = build_se_program(system_30mt, PulseModel().without_rf())
        state, _ = run_program(program, initial_state(), system_30mt)
        assert state.nuclear_fractions() == pytest.approx((1 / 3, 1 / 3, 1 / 3))

    @pytest.mark.parametrize("rate", [0.0, 0.6, 1.43, 2.5])
    def test_pt_single_pass(self, rate, system_30mt):
        """Test one PT pass leaves P0 = 1 minus the closing laser's flips."""
        optics = OpticalParams(nuclear_flip_rate=rate)
        program = build_pt_program(system_30mt, optics=optics)
        state, _ = run_program(program, initial_state(), system_30mt)
        p_b = (2 / 3) * (1 - math.exp(-rate * 0.25))
        assert state.nuclear_fractions() == pytest.approx((p_b / 2, 1 - p_b, p_b / 2))

    @pytest.mark.parametrize("branch", [Branch.MINUS, Branch.PLUS])
    @pytest.mark.parametrize("target", [1, 0, -1])
    def test_pt_traps_into_target(self, branch, target, system_30mt):
        """Test flip-free lasers leave everything in |0, target> after one pass."""
        optics = OpticalParams(nuclear_flip_rate=0.0)
        program = build_pt_program(system_30mt, branch=branch, target_mi=target, optics=optics)
        state, _ = run_program(program, initial_state(), system_30mt)
        assert state.population((0, target)) == pytest.approx(1.0, abs=1e-12)
        assert state.electron_fractions() == pytest.approx((0.0, 1.0, 0.0), abs=1e-12)

    def test_se_matches_hand_built_permutation(self, system_30mt):
        """Test ideal SE permutes the populations of any diagonal state."""
        populations = np.random.default_rng(7).dirichlet(np.ones(9))
        swaps = [
            ((0, 1), (1, 1)),
            ((1, 1), (1, 0)),
            ((0, -1), (-1, -1)),
            ((-1, -1), (-1, 0)),
        ]
        expected = populations.copy()
        for first, second in swaps:
            i, j = level_index(*first), level_index(*second)
            expected[[i, j]] = expected[[j, i]]

        state, _ = run_program(
            build_se_program(system_30mt), DensityMatrix.diagonal(populations), system_30mt
        )
        assert state.populations() == pytest.approx(expected, abs=1e-12)
        off_diagonal = state.elements - np.diag(state.elements.diagonal())
        assert np.abs(off_diagonal).max() < 1e-12

    def test_mirror_symmetry(self, system_30mt):
        """Test swapping m_I = +1 and -1 in program and state mirrors the result."""
        model = PulseModel(rf_angle=math.pi / 2)
        optics = OpticalParams(nuclear_flip_rate=1.43)
        nuclear = (0.5, 0.3, 0.2)
        results = []
        for target, start in [(1, nuclear), (-1, nuclear[::-1])]:
            program = build_pt_program(
                system_30mt, target_mi=target, optics=optics, pulse_model=model
            )
            state = product_state((0.0, 1.0, 0.0), start)
            results.append(run_recursive_series(program, state, 3, system_30mt))
        for plus, minus in zip(*results, strict=True):
            assert plus == pytest.approx(minus[::-1], abs=1e-12)

    def test_pt_fixed_point(self, system_30mt):
        """Test with full transfer the second pass reproduces the first."""
        optics = OpticalParams(nuclear_flip_rate=1.43)
        series = run_recursive_series(
            build_pt_program(system_30mt, optics=optics), initial_state(), 2, system_30mt
        )
        p_b = (2 / 3) * (1 - math.exp(-1.43 * 0.25))
        assert series[1] == pytest.approx((p_b / 2, 1 - p_b, p_b / 2), abs=1e-12)
        assert series[2] == pytest.approx(series[1], abs=1e-12)

    def test_pt_without_rf_keeps_uniform(self, system_30mt):
        program = build_pt_program(system_30mt, pulse_model=PulseModel().without_rf())
        state, _ = run_program(program.with_repeat(3), initial_state(), system_30mt)
        assert state.nuclear_fractions() == pytest.approx((1 / 3, 1 / 3, 1 / 3))

    @pytest.mark.parametrize("p_b", [0.01, 0.2])
    def test_pt_full_rf_matches_toy_model(self, p_b, system_30mt):
        """Test beta = pi reaches the toy model's limit 1 - p_b after one pass."""
        optics = OpticalParams.for_flip_probability(p_b)
        program = build_pt_program(system_30mt, optics=optics)
        series = run_recursive_series(program, initial_state(), 4, system_30mt)
        toy = target_series(ToyModelParams(p_a=1.0, p_b=p_b, p_minus_0=2 / 3), 4)
        assert [fractions[1] for fractions in series] == pytest.approx(toy)

    @pytest.mark.parametrize("beta", [math.pi / 4, math.pi / 2, 3 * math.pi / 4, math.pi])
    @pytest.mark.parametrize("p_b", [0.0, 0.1, 0.2])
    def test_two_level_pt_equals_toy_model(self, beta, p_b, system_30mt):
        """Test PT on the (+1, 0) pair follows the spin-1/2 recursion at every cycle."""
        optics = OpticalParams.for_flip_probability(p_b, two_level=True)
        program = build_pt_program(
            system_30mt, optics=optics, pulse_model=PulseModel(rf_angle=beta)
        )
        state = product_state((0.0, 1.0, 0.0), (0.5, 0.5, 0.0))
        series = run_recursive_series(program, state, 12, system_30mt)
        p_a = math.sin(beta / 2) ** 2
        toy = target_series(ToyModelParams(p_a=p_a, p_b=p_b, p_minus_0=0.5), 12)
        assert [fractions[1] for fractions in series] == pytest.approx(toy, abs=1e-9)
        assert all(fractions[2] == pytest.approx(0.0, abs=1e-12) for fractions in series)

    def test_pt_half_angle_accumulates(self, system_30mt):
        """Test a pi/2 rf pulse halves the depleted population before each laser.

        With unbiased flips each of m_I = +1 and -1 reaches 0 with probability
        p_b / 2 while m_I = 0 leaves with p_b, so the depleted total D follows
        D -> (D / 2)(1 - p_b / 2) + (1 - D / 2) p_b.
        """
        p_b = 0.01
        model = PulseModel(rf_angle=math.pi / 2)
        optics = OpticalParams.for_flip_probability(p_b)
        program = build_pt_program(system_30mt, optics=optics, pulse_model=model)
        p_zero = [f[1] for f in run_recursive_series(program, initial_state(), 5, system_30mt)]

        depleted, expected = 2 / 3, [1 / 3]
        for _ in range(5):
            depleted = (depleted / 2) * (1 - p_b / 2) + (1 - depleted / 2) * p_b
            expected.append(1 - depleted)
        assert p_zero == pytest.approx(expected, abs=1e-12)
        assert all(later > earlier for earlier, later in zip(p_zero, p_zero[1:]))
        assert p_zero[-1] > 0.9

    def test_series_and_trace(self, system_30mt):
        engine = ProtocolEngine(system_30mt)
        program = build_pt_program(system_30mt)
        fractions, states, trace = engine.series(program, initial_state(), 3)
        assert len(fractions) == len(states) == 4
        assert len(trace.steps) == 18
        assert trace.steps[-1].cycle == 3
        assert trace.steps[-1].nuclear_fractions == pytest.approx(fractions[-1])

    def test_run_repeats(self, system_30mt):
        program = build_pt_program(system_30mt).with_repeat(3)
        _, trace = run_program(program, initial_state(), system_30mt)
        assert trace.summary()["executed_steps"] == 18

    def test_markers_recorded(self, system_30mt):
        program = ProtocolProgram(
            steps=(SHELVE, PulseInstruction.marker("shelved"), LASER), repeat_count=2
        )
        _, trace = run_program(program, initial_state(), system_30mt)
        assert set(trace.markers) == {"shelved@1", "shelved@2"}

    def test_series_needs_a_cycle(self, system_30mt):
        with pytest.raises(NVPumpError):
            run_recursive_series(build_pt_program(system_30mt), initial_state(), 0)

    def test_finite_pulses_stay_physical(self):
        system = SpinSystem(b_field=30.2)
        model = PulseModel(selectivity_mode=SelectivityMode.RABI)
        program = build_pt_program(system, pulse_model=model)
        state, trace = run_program(program, initial_state(), system)
        state.validate()
        assert sum(state.nuclear_fractions()) == pytest.approx(1.0)
        assert state.nuclear_fractions()[1] > 0.6
        assert trace.max_trace_drift < 1e-10
