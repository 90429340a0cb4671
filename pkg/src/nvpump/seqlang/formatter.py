"""Canonical program text."""

import math

from nvpump.protocol.program import (
    InstructionKind,
    LaserRole,
    ProtocolProgram,
    PulseInstruction,
    RepeatBlock,
    Step,
)
from nvpump.spin.pulses import SelectivityMode
from nvpump.spin.system import format_level


INDENT = "    "


def format_angle(angle: float) -> str:
    """Angle as a multiple of pi, shortest round-tripping digits (``1.0pi``)."""
    return f"{angle / math.pi!r}pi"


def format_instruction(instruction: PulseInstruction) -> str:
    """One statement, without indentation."""
    if instruction.drive is not None:
        drive = instruction.drive
        transition = drive.transition
        text = (
            f"{transition.channel.value} {format_level(transition.from_level)} -> "
            f"{format_level(transition.to_level)} {format_angle(drive.nominal_angle)}"
        )
        if drive.selectivity_mode is SelectivityMode.RABI and drive.rabi_frequency is not None:
            text += f" rabi {drive.rabi_frequency!r}MHz"
            if drive.carrier_offset:
                text += f" offset {drive.carrier_offset!r}MHz"
        return text
    if instruction.kind is InstructionKind.LASER and instruction.optics is not None:
        text = f"laser {instruction.optics.pump_duration!r}us"
        if instruction.role is LaserRole.REPUMP:
            text += " repump"
        return text
    return f"readout {instruction.label}"


def _format_steps(steps: tuple[Step, ...], depth: int) -> list[str]:
    lines: list[str] = []
    pad = INDENT * depth
    for step in steps:
        if isinstance(step, RepeatBlock):
            lines.append(f"{pad}repeat {step.count} {{")
            lines.extend(_format_steps(step.body, depth + 1))
            lines.append(f"{pad}}}")
        else:
            lines.append(pad + format_instruction(step))
    return lines


def format_program(program: ProtocolProgram) -> str:
    """Canonical text of a program; ``parse_program`` reads it back unchanged.

    Angles are printed as multiples of pi, durations in microseconds and
    frequencies in MHz. A program with ``repeat_count > 1`` is wrapped in an
    outer repeat block. Laser calibration is not part of the text.
    """
    lines = [f"# program: {program.name}"] if program.name else []
    if program.repeat_count > 1:
        lines.append(f"repeat {program.repeat_count} {{")
        lines.extend(_format_steps(program.steps, 1))
        lines.append("}")
    else:
        lines.extend(_format_steps(program.steps, 0))
    return "\n".join(lines) + "\n"
