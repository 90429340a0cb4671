"""Builders for the spin-exchange (SE) and population-trapping (PT) programs."""

import math
from enum import Enum
from itertools import combinations

from loguru import logger
from pydantic import BaseModel, ConfigDict, Field

from nvpump.core.exceptions import ErrorCode, ProgramBuildError
from nvpump.core.settings import settings
from nvpump.protocol.program import LaserRole, ProtocolProgram, PulseInstruction
from nvpump.spin.optics import OpticalParams
from nvpump.spin.pulses import DriveSpec, SelectivityMode
from nvpump.spin.system import (
    Channel,
    SpinSystem,
    Transition,
    check_projection,
    transition_frequency,
)


class Branch(str, Enum):
    """Electron manifold used as the PT shelf."""

    MINUS = "minus"
    PLUS = "plus"

    @property
    def m_s(self) -> int:
        """m_S of the shelf."""
        return -1 if self is Branch.MINUS else 1


class PaMapping(str, Enum):
    """How an rf flip probability p_a maps onto an rf rotation angle beta."""

    SINE = "sine"  # p_a = sin^2(beta / 2)
    LINEAR = "linear"  # beta = p_a * pi


def rf_angle_for(p_a: float, mapping: PaMapping = PaMapping.SINE) -> float:
    """rf angle (rad) that moves population with probability ``p_a``."""
    if not 0.0 <= p_a <= 1.0:
        raise ProgramBuildError(f"p_a = {p_a} is not a probability")
    if mapping is PaMapping.LINEAR:
        return p_a * math.pi
    return 2 * math.asin(math.sqrt(p_a))


def flip_probability_for(angle: float, mapping: PaMapping = PaMapping.SINE) -> float:
    """Inverse of :func:`rf_angle_for` (for SINE this is the ideal-pulse flip probability)."""
    if mapping is PaMapping.LINEAR:
        return angle / math.pi
    return math.sin(angle / 2) ** 2


class PulseModel(BaseModel):
    """Template for every mw and rf pulse a builder emits."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    mw_angle: float = Field(default=math.pi, ge=0.0, le=2 * math.pi)
    rf_angle: float = Field(default=math.pi, ge=0.0, le=2 * math.pi)
    selectivity_mode: SelectivityMode = SelectivityMode.IDEAL
    mw_rabi_frequency: float = Field(default=0.5, gt=0.0, description="MHz")
    rf_rabi_frequency: float = Field(default=0.05, gt=0.0, description="MHz")
    mw_carrier_offset: float = Field(default=0.0, description="MHz")
    rf_carrier_offset: float = Field(default=0.0, description="MHz")

    def drive(self, transition: Transition) -> DriveSpec:
        """Drive for one transition with this model's angle and strength."""
        is_mw = transition.channel is Channel.MW
        if self.selectivity_mode is SelectivityMode.IDEAL:
            return DriveSpec(
                transition=transition,
                nominal_angle=self.mw_angle if is_mw else self.rf_angle,
            )
        return DriveSpec(
            transition=transition,
            nominal_angle=self.mw_angle if is_mw else self.rf_angle,
            rabi_frequency=self.mw_rabi_frequency if is_mw else self.rf_rabi_frequency,
            carrier_offset=self.mw_carrier_offset if is_mw else self.rf_carrier_offset,
            selectivity_mode=SelectivityMode.RABI,
        )

    def pulse(self, transition: Transition) -> PulseInstruction:
        """Instruction for one transition."""
        return PulseInstruction.pulse(self.drive(transition))

    def without_rf(self) -> "PulseModel":
        """Same model with the rf amplifier off."""
        return self.model_copy(update={"rf_angle": 0.0})


def check_resolvable(
    system: SpinSystem, transitions: list[Transition], min_separation: float | None = None
) -> None:
    """Make sure no two distinct addressed transitions share a frequency.

    Raises:
        ProgramBuildError: With FREQUENCY_COLLISION when two lines sit closer
            than ``min_separation`` MHz.
    """
    separation = settings.min_line_separation_mhz if min_separation is None else min_separation
    unique: list[Transition] = []
    for transition in transitions:
        if not any(transition.same_subspace(seen) for seen in unique):
            unique.append(transition)
    for first, second in combinations(unique, 2):
        if first.channel is not second.channel:
            continue
        f1 = transition_frequency(system, first)
        f2 = transition_frequency(system, second)
        if abs(f1 - f2) <= separation:
            raise ProgramBuildError(
                f"{first.label} ({f1:.4f} MHz) and {second.label} ({f2:.4f} MHz) "
                f"are closer than {separation} MHz at B = {system.b_field} mT",
                ErrorCode.FREQUENCY_COLLISION,
            )


def build_se_program(
    system: SpinSystem,
    pulse_model: PulseModel | None = None,
    alpha_first: bool = True,
    repeat_count: int = 1,
) -> ProtocolProgram:
    """Spin-exchange program mapping |0,+1> -> |+1,0> and |0,-1> -> |-1,0>.

    Args:
        system: Level structure, used for the collision check.
        pulse_model: Angles and drive strength.
        alpha_first: Drive the m_S = +1 pair first (mw, then rf in each pair).
        repeat_count: Number of cycles.
    """
    pulse_model = pulse_model or PulseModel()
    alpha_pair = [Transition.mw(1, 1), Transition.rf(1, 1, 0)]
    gamma_pair = [Transition.mw(-1, -1), Transition.rf(-1, -1, 0)]
    ordered = alpha_pair + gamma_pair if alpha_first else gamma_pair + alpha_pair
    check_resolvable(system, ordered)
    program = ProtocolProgram(
        steps=tuple(pulse_model.pulse(t) for t in ordered), repeat_count=repeat_count, name="se"
    )
    logger.debug(f"Built SE program at B = {system.b_field} mT ({len(program.steps)} steps)")
    return program


def pt_sources(target_mi: int) -> list[int]:
    """Nuclear states a PT pass empties, in pulse order."""
    check_projection(target_mi, "target m_I")
    if target_mi == 0:
        return [1, -1]
    return [-target_mi, 0]


def build_pt_program(
    system: SpinSystem,
    branch: Branch = Branch.MINUS,
    target_mi: int = 0,
    optics: OpticalParams | None = None,
    pulse_model: PulseModel | None = None,
    repump: OpticalParams | None = None,
    repeat_count: int = 1,
) -> ProtocolProgram:
    """Population-trapping program.

    Each source state is shelved with an mw pulse |0, m_I> <-> |m_S, m_I>, moved
    one step toward ``target_mi`` by an rf pulse inside the shelf and brought back
    to m_S = 0 by a laser pulse. The first laser (p1) is a repump that leaves the
    nucleus alone unless ``repump`` says otherwise; the closing laser (p2)
    carries the optical flip calibration in ``optics``.

    Raises:
        ProgramBuildError: If two addressed lines collide.
    """
    pulse_model = pulse_model or PulseModel()
    optics = optics or OpticalParams()
    repump = repump or OpticalParams.repump(optics.pump_duration, optics.pump_efficiency)
    m_s = branch.m_s

    steps: list[PulseInstruction] = []
    for position, source in enumerate(pt_sources(target_mi)):
        toward = source + (1 if target_mi > source else -1)
        steps.append(pulse_model.pulse(Transition.mw(source, m_s)))
        steps.append(pulse_model.pulse(Transition.rf(m_s, source, toward)))
        if position == 0:
            steps.append(PulseInstruction.laser(repump, LaserRole.REPUMP))
        else:
            steps.append(PulseInstruction.laser(optics, LaserRole.PUMP))

    program = ProtocolProgram(steps=tuple(steps), repeat_count=repeat_count, name="pt")
    check_resolvable(system, program.transitions())
    logger.debug(
        f"Built PT program: branch {branch.value}, target m_I = {target_mi}, "
        f"B = {system.b_field} mT"
    )
    return program
