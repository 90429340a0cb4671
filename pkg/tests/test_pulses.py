"""Tests for ideal and finite-selectivity pulses."""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from nvpump.spin.pulses import (
    DriveSpec,
    SelectivityMode,
    apply_ideal_pulse,
    finite_pulse_action,
    flip_probability,
    ideal_rotation,
)
from nvpump.spin.state import pure_state
from nvpump.spin.system import SpinSystem, Transition


SHELVE_PLUS = Transition.mw(1, -1)


class TestIdealPulses:
    """Test rotations confined to one subspace."""

    def test_pi_pulse_transfers_population(self):
        state = apply_ideal_pulse(pure_state(0, 1), SHELVE_PLUS, math.pi)
        assert state.population((-1, 1)) == pytest.approx(1.0)
        assert state.population((0, 1)) == pytest.approx(0.0, abs=1e-15)

    def test_half_pi_pulse_splits_population(self):
        state = apply_ideal_pulse(pure_state(0, 1), SHELVE_PLUS, math.pi / 2)
        assert state.population((-1, 1)) == pytest.approx(0.5)
        assert state.population((0, 1)) == pytest.approx(0.5)

    def test_two_pi_pulse_returns(self):
        state = apply_ideal_pulse(pure_state(0, 1), SHELVE_PLUS, 2 * math.pi)
        assert state.population((0, 1)) == pytest.approx(1.0)

    def test_spectator_levels_untouched(self):
        state = apply_ideal_pulse(pure_state(0, 0), SHELVE_PLUS, math.pi)
        assert state.allclose(pure_state(0, 0))

    def test_rotation_is_unitary(self):
        block = ideal_rotation(1.234)
        assert block @ block.conj().T == pytest.approx(np.eye(2))


class TestDriveSpec:
    """Test drive validation."""

    def test_angle_out_of_range(self):
        with pytest.raises(ValidationError, match="nominal_angle"):
            DriveSpec(transition=SHELVE_PLUS, nominal_angle=7.0)

    def test_rabi_mode_needs_frequency(self):
        with pytest.raises(ValidationError, match="rabi_frequency"):
            DriveSpec(transition=SHELVE_PLUS, selectivity_mode=SelectivityMode.RABI)

    def test_duration(self):
        drive = DriveSpec(transition=SHELVE_PLUS, rabi_frequency=0.5)
        assert drive.duration == pytest.approx(1.0)
        assert DriveSpec(transition=SHELVE_PLUS).duration is None


class TestFinitePulses:
    """Test pulses with a finite Rabi frequency."""

    @pytest.mark.parametrize(
        "rabi, detuning, duration, expected",
        [(1.0, 0.0, 0.5, 1.0), (1.0, 0.0, 0.25, 0.5), (0.0, 1.0, 1.0, 0.0)],
    )
    def test_flip_probability(self, rabi, detuning, duration, expected):
        assert flip_probability(rabi, detuning, duration) == pytest.approx(expected)

    def test_detuned_flip_is_bounded(self):
        """Test the generalized Rabi amplitude caps the transfer."""
        for duration in np.linspace(0.0, 3.0, 31):
            assert flip_probability(1.0, 1.0, duration) <= 0.5 + 1e-12

    def test_ideal_mode_matches_ideal_rotation(self, system_30mt):
        drive = DriveSpec(transition=SHELVE_PLUS, nominal_angle=math.pi / 2)
        action = finite_pulse_action(system_30mt, drive)
        assert action.flip_probabilities == {SHELVE_PLUS.label: pytest.approx(0.5)}
        assert action.warnings == ()

    def test_resolved_rabi_pulse(self, system_30mt):
        """Test a weak pulse at 30 mT flips its target and warns about nothing."""
        target = Transition.mw(0, -1)
        drive = DriveSpec(
            transition=target, rabi_frequency=0.5, selectivity_mode=SelectivityMode.RABI
        )
        action = finite_pulse_action(system_30mt, drive)

        assert action.flip_probabilities[target.label] == pytest.approx(1.0)
        assert action.warnings == ()
        assert action.unitary @ action.unitary.conj().T == pytest.approx(np.eye(9))
        state = pure_state(0, 0).evolve(action.unitary)
        assert state.population((-1, 0)) == pytest.approx(1.0)

    def test_degenerate_lines_warn(self):
        """Test both m_S manifolds coincide at zero field and share |0,0>."""
        drive = DriveSpec(
            transition=Transition.mw(0, -1),
            rabi_frequency=0.5,
            selectivity_mode=SelectivityMode.RABI,
        )
        action = finite_pulse_action(SpinSystem(b_field=0.0), drive)

        assert any(warning.startswith("selectivity:") for warning in action.warnings)
        assert action.flip_probabilities[Transition.mw(0, 1).label] == pytest.approx(1.0)

    def test_neighbour_line_flip(self):
        """Test a 1 MHz pi pulse partly flips the line one hyperfine step away."""
        system = SpinSystem(b_field=30.0, hyperfine=2.2)
        drive = DriveSpec(
            transition=Transition.mw(0, -1),
            rabi_frequency=1.0,
            selectivity_mode=SelectivityMode.RABI,
        )
        action = finite_pulse_action(system, drive)

        assert drive.duration == pytest.approx(0.5)
        for neighbour in (Transition.mw(1, -1), Transition.mw(-1, -1)):
            assert action.flip_probabilities[neighbour.label] == pytest.approx(0.0634, abs=1e-3)
        assert flip_probability(1.0, 2.2, 0.5) == pytest.approx(0.0634, abs=1e-3)

    def test_weak_drive_is_selective(self, system_30mt):
        """Test a hyperfine splitting of 100 Rabi frequencies leaves the neighbours alone."""
        target = Transition.mw(0, -1)
        drive = DriveSpec(
            transition=target,
            rabi_frequency=system_30mt.hyperfine / 100,
            selectivity_mode=SelectivityMode.RABI,
        )
        action = finite_pulse_action(system_30mt, drive)

        assert action.flip_probabilities[target.label] == pytest.approx(1.0)
        for neighbour in (Transition.mw(1, -1), Transition.mw(-1, -1)):
            assert action.flip_probabilities[neighbour.label] <= 1e-4
        state = pure_state(0, 1).evolve(action.unitary)
        assert state.population((0, 1)) >= 1 - 1e-4
