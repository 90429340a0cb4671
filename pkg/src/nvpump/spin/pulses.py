"""Pulse action on the 9-level pair: ideal subspace rotations and finite Rabi drives."""

import math
from enum import Enum

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.linalg import expm

from nvpump.core.settings import settings
from nvpump.spin.state import DensityMatrix
from nvpump.spin.system import (
    DIM,
    SpinSystem,
    Transition,
    channel_transitions,
    transition_frequency,
)


ANGLE_SLACK = 1e-12

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


class SelectivityMode(str, Enum):
    """How a pulse acts on transitions other than its target."""

    IDEAL = "ideal"
    RABI = "rabi"


class DriveSpec(BaseModel):
    """One resonant drive: target transition, rotation angle and drive strength."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    transition: Transition
    nominal_angle: float = Field(default=math.pi, description="Rotation angle (rad)")
    rabi_frequency: float | None = Field(default=None, description="Rabi frequency (MHz)")
    carrier_offset: float = Field(default=0.0, description="Carrier minus resonance (MHz)")
    selectivity_mode: SelectivityMode = SelectivityMode.IDEAL

    @model_validator(mode="after")
    def _check_drive(self) -> "DriveSpec":
        if not -ANGLE_SLACK <= self.nominal_angle <= 2 * math.pi + ANGLE_SLACK:
            raise ValueError(f"nominal_angle {self.nominal_angle} outside [0, 2pi]")
        if self.selectivity_mode is SelectivityMode.RABI and not (
            self.rabi_frequency is not None and self.rabi_frequency > 0
        ):
            raise ValueError("RABI selectivity needs rabi_frequency > 0")
        if self.rabi_frequency is not None and self.rabi_frequency <= 0:
            raise ValueError("rabi_frequency must be positive")
        return self

    @property
    def duration(self) -> float | None:
        """Pulse length in microseconds, when a Rabi frequency is set."""
        if self.rabi_frequency is None:
            return None
        return self.nominal_angle / (2 * math.pi * self.rabi_frequency)


class PulseAction(BaseModel):
    """Unitary of one pulse plus what went wrong building it."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    unitary: np.ndarray
    warnings: tuple[str, ...] = ()
    flip_probabilities: dict[str, float] = Field(default_factory=dict)


def subspace_rotation(rabi: float, detuning: float, duration: float) -> np.ndarray:
    """2x2 propagator exp(-i 2 pi t (Omega sigma_x + delta sigma_z) / 2), frequencies in MHz."""
    generator = (rabi * SIGMA_X + detuning * SIGMA_Z) / 2
    return np.asarray(expm(-2j * math.pi * duration * generator))


def ideal_rotation(angle: float) -> np.ndarray:
    """2x2 propagator exp(-i angle sigma_x / 2)."""
    cos, sin = math.cos(angle / 2), math.sin(angle / 2)
    return np.array([[cos, -1j * sin], [-1j * sin, cos]])


def embed(block: np.ndarray, transition: Transition) -> np.ndarray:
    """Lift a 2x2 operator on (from, to) into the 9x9 space, identity elsewhere."""
    i, j = transition.indices
    unitary = np.eye(DIM, dtype=complex)
    unitary[np.ix_([i, j], [i, j])] = block
    return unitary


def flip_probability(rabi: float, detuning: float, duration: float) -> float:
    """Generalized Rabi formula (Omega^2 / Omega_eff^2) sin^2(pi Omega_eff t)."""
    effective = math.hypot(rabi, detuning)
    if effective == 0:
        return 0.0
    return (rabi / effective) ** 2 * math.sin(math.pi * effective * duration) ** 2


def apply_ideal_pulse(state: DensityMatrix, transition: Transition, angle: float) -> DensityMatrix:
    """Rotate the (from, to) subspace by ``angle`` about x, leaving other levels alone."""
    return state.evolve(embed(ideal_rotation(angle), transition))


def finite_pulse_action(
    system: SpinSystem, drive: DriveSpec, threshold: float | None = None
) -> PulseAction:
    """Build the propagator of a finite-strength pulse.

    Every transition on the drive's channel sees the same Rabi frequency and its
    own detuning from the carrier. Overlapping rotations are composed in
    ascending transition frequency.

    Args:
        system: Level structure that fixes every detuning.
        drive: The pulse. IDEAL drives yield the ideal rotation.
        threshold: Off-target flip probability that counts as a real rotation.
            Defaults to ``settings.selectivity_threshold``.
    """
    target = drive.transition
    if drive.selectivity_mode is SelectivityMode.IDEAL or drive.rabi_frequency is None:
        return PulseAction(
            unitary=embed(ideal_rotation(drive.nominal_angle), target),
            flip_probabilities={target.label: math.sin(drive.nominal_angle / 2) ** 2},
        )

    threshold = settings.selectivity_threshold if threshold is None else threshold
    rabi = drive.rabi_frequency
    duration = drive.duration or 0.0
    carrier = transition_frequency(system, target) + drive.carrier_offset

    rotations: list[tuple[float, Transition, float]] = []
    for transition in channel_transitions(target.channel):
        frequency = transition_frequency(system, transition)
        # Orient the subspace like the target so the target keeps its phase.
        if transition.same_subspace(target):
            transition = target
        detuning = carrier - frequency
        rotations.append((frequency, transition, detuning))
    rotations.sort(key=lambda item: item[0])

    unitary = np.eye(DIM, dtype=complex)
    probabilities: dict[str, float] = {}
    active: list[Transition] = []
    for _frequency, transition, detuning in rotations:
        unitary = embed(subspace_rotation(rabi, detuning, duration), transition) @ unitary
        probability = flip_probability(rabi, detuning, duration)
        probabilities[transition.label] = probability
        if transition.same_subspace(target) or probability > threshold:
            active.append(transition)

    warnings: list[str] = []
    for index, first in enumerate(active):
        for second in active[index + 1 :]:
            if first.shares_level(second):
                off_target = second if first.same_subspace(target) else first
                warnings.append(
                    f"selectivity: {drive.transition.label} also rotates {off_target.label} "
                    f"(flip probability {probabilities[off_target.label]:.3g}) on a shared level"
                )
    return PulseAction(unitary=unitary, warnings=tuple(warnings), flip_probabilities=probabilities)


def apply_finite_pulse(state: DensityMatrix, system: SpinSystem, drive: DriveSpec) -> DensityMatrix:
    """Apply a finite-selectivity pulse; selectivity warnings go to the log."""
    action = finite_pulse_action(system, drive)
    for warning in action.warnings:
        logger.warning(warning)
    return state.evolve(action.unitary)
