"""Protocol programs: ordered pulse, laser and marker instructions."""

from collections import Counter
from collections.abc import Iterator
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, model_validator

from nvpump.core.exceptions import ErrorCode, ProgramBuildError, SpinDomainError
from nvpump.spin.optics import OpticalParams
from nvpump.spin.pulses import DriveSpec, SelectivityMode
from nvpump.spin.system import Channel, Transition


SIGNATURE_DIGITS = 12


class InstructionKind(str, Enum):
    """What an instruction does."""

    MW_PULSE = "mw"
    RF_PULSE = "rf"
    LASER = "laser"
    READOUT_MARKER = "readout"


class LaserRole(str, Enum):
    """Which optics calibration a laser pulse takes."""

    PUMP = "pump"
    REPUMP = "repump"


class PulseInstruction(BaseModel):
    """A single step of a program."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: InstructionKind
    drive: DriveSpec | None = None
    optics: OpticalParams | None = None
    role: LaserRole = LaserRole.PUMP
    label: str | None = None

    @model_validator(mode="after")
    def _check_payload(self) -> "PulseInstruction":
        if self.kind in (InstructionKind.MW_PULSE, InstructionKind.RF_PULSE):
            if self.drive is None:
                raise ValueError(f"{self.kind.value} instruction needs a drive")
            expected = Channel.MW if self.kind is InstructionKind.MW_PULSE else Channel.RF
            if self.drive.transition.channel is not expected:
                raise SpinDomainError(
                    f"{self.kind.value} instruction carries {self.drive.transition.label}",
                    ErrorCode.INVALID_TRANSITION,
                )
        elif self.kind is InstructionKind.LASER and self.optics is None:
            raise ValueError("laser instruction needs optics")
        elif self.kind is InstructionKind.READOUT_MARKER and not self.label:
            raise ValueError("readout marker needs a label")
        return self

    @classmethod
    def pulse(cls, drive: DriveSpec) -> "PulseInstruction":
        """MW or RF pulse, by the channel of the drive."""
        kind = (
            InstructionKind.MW_PULSE
            if drive.transition.channel is Channel.MW
            else InstructionKind.RF_PULSE
        )
        return cls(kind=kind, drive=drive)

    @classmethod
    def laser(cls, optics: OpticalParams, role: LaserRole = LaserRole.PUMP) -> "PulseInstruction":
        """Laser pulse."""
        return cls(kind=InstructionKind.LASER, optics=optics, role=role)

    @classmethod
    def marker(cls, label: str) -> "PulseInstruction":
        """Readout marker; records the state without changing it."""
        return cls(kind=InstructionKind.READOUT_MARKER, label=label)

    @property
    def description(self) -> str:
        """Short text for logs and traces."""
        if self.drive is not None:
            return self.drive.transition.label
        if self.optics is not None:
            return f"laser {self.optics.pump_duration:g}us {self.role.value}"
        return f"readout {self.label}"

    def signature(self) -> tuple[object, ...]:
        """Structural identity: everything the program text can express."""
        if self.drive is not None:
            drive = self.drive
            # Rabi frequency and carrier offset only act on RABI drives.
            finite = drive.selectivity_mode is SelectivityMode.RABI
            return (
                self.kind.value,
                drive.transition.from_level,
                drive.transition.to_level,
                round(drive.nominal_angle, SIGNATURE_DIGITS),
                round(drive.rabi_frequency or 0.0, 9) if finite else None,
                round(drive.carrier_offset, 9) if finite else 0.0,
                drive.selectivity_mode.value,
            )
        if self.optics is not None:
            return (self.kind.value, round(self.optics.pump_duration, 9), self.role.value)
        return (self.kind.value, self.label)


class RepeatBlock(BaseModel):
    """``count`` consecutive passes of ``body``."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    count: int = Field(ge=1)
    body: tuple["Step", ...]

    @model_validator(mode="after")
    def _check_body(self) -> "RepeatBlock":
        if not self.body:
            raise ProgramBuildError("repeat block has no statements", ErrorCode.EMPTY_PROGRAM)
        return self

    def signature(self) -> tuple[object, ...]:
        """Structural identity."""
        return ("repeat", self.count, tuple(step.signature() for step in self.body))


Step = PulseInstruction | RepeatBlock
RepeatBlock.model_rebuild()


class ProtocolProgram(BaseModel):
    """An immutable program; one cycle is one pass over ``steps``.

    A program whose only step is a repeat block is normalized so the block's
    count moves into ``repeat_count``; both forms print the same text.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    steps: tuple[Step, ...]
    repeat_count: int = 1
    name: str | None = None

    @model_validator(mode="before")
    @classmethod
    def _collapse_outer_repeat(cls, data: object) -> object:
        if not isinstance(data, dict):
            return data
        steps = tuple(data.get("steps", ()))
        count = data.get("repeat_count", 1)
        while len(steps) == 1 and isinstance(steps[0], RepeatBlock):
            count = count * steps[0].count
            steps = steps[0].body
        return {**data, "steps": steps, "repeat_count": count}

    @model_validator(mode="after")
    def _check_program(self) -> "ProtocolProgram":
        if not self.steps:
            raise ProgramBuildError("program has no instructions", ErrorCode.EMPTY_PROGRAM)
        if self.repeat_count < 1:
            raise ProgramBuildError(
                f"repeat count must be >= 1, got {self.repeat_count}", ErrorCode.EMPTY_PROGRAM
            )
        return self

    def instructions(self) -> Iterator[PulseInstruction]:
        """Flattened instructions of a single cycle."""
        yield from _flatten(self.steps)

    def transitions(self) -> list[Transition]:
        """Every transition the program drives."""
        return [
            instruction.drive.transition
            for instruction in self.instructions()
            if instruction.drive is not None
        ]

    def with_repeat(self, repeat_count: int) -> "ProtocolProgram":
        """Copy with another cycle count."""
        return ProtocolProgram(steps=self.steps, repeat_count=repeat_count, name=self.name)

    def calibrated(self, pump: OpticalParams, repump: OpticalParams) -> "ProtocolProgram":
        """Replace every laser's calibration, keeping its duration and role."""
        return ProtocolProgram(
            steps=_recalibrate(self.steps, pump, repump),
            repeat_count=self.repeat_count,
            name=self.name,
        )

    def without_rf(self) -> "ProtocolProgram":
        """Copy with every rf pulse removed, as with the rf amplifier off.

        Raises:
            ProgramBuildError: EMPTY_PROGRAM if nothing but rf pulses remain.
        """
        return ProtocolProgram(
            steps=_drop_rf(self.steps), repeat_count=self.repeat_count, name=self.name
        )

    def signature(self) -> tuple[object, ...]:
        """Structural identity (ignores laser calibration and name)."""
        return (self.repeat_count, tuple(step.signature() for step in self.steps))

    def structurally_equal(self, other: "ProtocolProgram") -> bool:
        """Whether two programs print to the same text."""
        return self.signature() == other.signature()

    def summary(self) -> dict[str, object]:
        """Structure of one cycle: instruction counts, order and driven lines."""
        instructions = list(self.instructions())
        return {
            "name": self.name,
            "repeat_count": self.repeat_count,
            "instructions_per_cycle": len(instructions),
            "counts": dict(Counter(instruction.kind.value for instruction in instructions)),
            "instructions": [instruction.description for instruction in instructions],
            "transitions": [transition.label for transition in self.transitions()],
        }


def _flatten(steps: tuple[Step, ...]) -> Iterator[PulseInstruction]:
    for step in steps:
        if isinstance(step, RepeatBlock):
            for _ in range(step.count):
                yield from _flatten(step.body)
        else:
            yield step


def _recalibrate(
    steps: tuple[Step, ...], pump: OpticalParams, repump: OpticalParams
) -> tuple[Step, ...]:
    out: list[Step] = []
    for step in steps:
        if isinstance(step, RepeatBlock):
            out.append(RepeatBlock(count=step.count, body=_recalibrate(step.body, pump, repump)))
        elif step.optics is not None:
            base = repump if step.role is LaserRole.REPUMP else pump
            out.append(
                PulseInstruction.laser(base.with_duration(step.optics.pump_duration), step.role)
            )
        else:
            out.append(step)
    return tuple(out)


def _drop_rf(steps: tuple[Step, ...]) -> tuple[Step, ...]:
    out: list[Step] = []
    for step in steps:
        if isinstance(step, RepeatBlock):
            body = _drop_rf(step.body)
            if body:
                out.append(RepeatBlock(count=step.count, body=body))
        elif step.kind is not InstructionKind.RF_PULSE:
            out.append(step)
    return tuple(out)
