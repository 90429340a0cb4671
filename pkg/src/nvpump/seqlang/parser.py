"""Parse program text into a ProtocolProgram."""

import math
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Any

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedInput, UnexpectedToken, VisitError
from lark.tree import Meta
from loguru import logger
from pydantic import ValidationError

from nvpump.core.exceptions import (
    ErrorCode,
    NVPumpError,
    OutputError,
    SeqSemanticError,
    SeqSyntaxError,
)
from nvpump.protocol.program import LaserRole, ProtocolProgram, PulseInstruction, RepeatBlock
from nvpump.spin.optics import OpticalParams
from nvpump.spin.pulses import ANGLE_SLACK, DriveSpec, SelectivityMode
from nvpump.spin.system import Channel, Transition


NS_PER_US = 1000.0


def read_grammar() -> str:
    """Grammar shipped with the package."""
    return resources.files("nvpump.seqlang").joinpath("seq.lark").read_text(encoding="utf-8")


@lru_cache(maxsize=1)
def get_parser() -> Lark:
    """LALR parser for program text, built once."""
    return Lark(read_grammar(), start="program", parser="lalr", propagate_positions=True)


def _first_error(exc: ValidationError) -> str:
    error = exc.errors()[0]
    return str(error.get("msg", exc))


class ProgramBuilder(Transformer[Token, ProtocolProgram]):
    """Turns the parse tree into instructions; statement errors keep their location."""

    def __init__(self, text: str, pump: OpticalParams, repump: OpticalParams, name: str | None):
        super().__init__()
        self._lines = text.splitlines()
        self._pump = pump
        self._repump = repump
        self._name = name

    def _semantic(self, meta: Meta, message: str) -> SeqSemanticError:
        line = getattr(meta, "line", 1)
        column = getattr(meta, "column", 1)
        source = self._lines[line - 1] if 0 < line <= len(self._lines) else ""
        return SeqSemanticError(message, line, column, source)

    @v_args(meta=True)
    def program(self, meta: Meta, children: list[Any]) -> ProtocolProgram:
        return ProtocolProgram(steps=tuple(children), name=self._name)

    @v_args(meta=True)
    def level(self, meta: Meta, children: list[Token]) -> tuple[int, int]:
        return int(children[0]), int(children[1])

    @v_args(meta=True)
    def angle(self, meta: Meta, children: list[Token]) -> float:
        value, unit = float(children[0]), str(children[1])
        angle = value * math.pi if unit == "pi" else value
        if angle > 2 * math.pi + ANGLE_SLACK:
            raise self._semantic(meta, f"angle {value}{unit} exceeds 2pi")
        return min(angle, 2 * math.pi)

    @v_args(meta=True)
    def rabi(self, meta: Meta, children: list[Token]) -> tuple[str, float]:
        value = float(children[0])
        if value <= 0:
            raise self._semantic(meta, f"Rabi frequency must be positive, got {value} MHz")
        return "rabi", value

    @v_args(meta=True)
    def offset(self, meta: Meta, children: list[Token]) -> tuple[str, float]:
        return "offset", float(children[0])

    @v_args(meta=True)
    def pulse(self, meta: Meta, children: list[Any]) -> PulseInstruction:
        channel, source, target, angle, *options = children
        extras = dict(options)
        if "offset" in extras and "rabi" not in extras:
            raise self._semantic(meta, "a carrier offset needs a Rabi frequency")
        try:
            transition = Transition(
                channel=Channel(str(channel)), from_level=source, to_level=target
            )
            drive = DriveSpec(
                transition=transition,
                nominal_angle=angle,
                rabi_frequency=extras.get("rabi"),
                carrier_offset=extras.get("offset", 0.0),
                selectivity_mode=(
                    SelectivityMode.RABI if "rabi" in extras else SelectivityMode.IDEAL
                ),
            )
        except NVPumpError as exc:
            raise self._semantic(meta, exc.message) from exc
        except ValidationError as exc:
            raise self._semantic(meta, _first_error(exc)) from exc
        return PulseInstruction.pulse(drive)

    @v_args(meta=True)
    def laser(self, meta: Meta, children: list[Token]) -> PulseInstruction:
        value, unit = float(children[0]), str(children[1])
        duration = value / NS_PER_US if unit == "ns" else value
        if len(children) > 2:
            return PulseInstruction.laser(self._repump.with_duration(duration), LaserRole.REPUMP)
        return PulseInstruction.laser(self._pump.with_duration(duration), LaserRole.PUMP)

    @v_args(meta=True)
    def repeat(self, meta: Meta, children: list[Any]) -> RepeatBlock:
        count, *body = children
        if int(count) < 1:
            raise self._semantic(meta, f"repeat count must be >= 1, got {count}")
        return RepeatBlock(count=int(count), body=tuple(body))

    @v_args(meta=True)
    def marker(self, meta: Meta, children: list[Token]) -> PulseInstruction:
        return PulseInstruction.marker(str(children[0]))


def _syntax_error(exc: UnexpectedInput, text: str) -> SeqSyntaxError:
    lines = text.splitlines() or [""]
    line = exc.line if isinstance(exc.line, int) and exc.line > 0 else len(lines)
    column = exc.column if isinstance(exc.column, int) and exc.column > 0 else 1
    if isinstance(exc, UnexpectedToken):
        if exc.token.type == "$END":
            message = "unexpected end of input"
        else:
            expected = ", ".join(sorted(exc.expected))
            message = f"unexpected {exc.token.type} {str(exc.token)!r}, expected one of: {expected}"
    elif isinstance(exc, UnexpectedCharacters):
        message = f"unexpected character {exc.char!r}"
    else:
        message = "unexpected input"
    source = lines[line - 1] if 0 < line <= len(lines) else ""
    return SeqSyntaxError(message, line, column, source)


def parse_program(
    text: str,
    pump: OpticalParams | None = None,
    repump: OpticalParams | None = None,
    name: str | None = None,
) -> ProtocolProgram:
    """Parse program text.

    Laser lines carry only a duration and a role; their calibration comes from
    ``pump`` (default :class:`OpticalParams`) and ``repump`` (default a flip-free
    repump).

    Raises:
        SeqSyntaxError: Text does not match the grammar.
        SeqSemanticError: A statement breaks a selection rule or range.
    """
    pump = pump or OpticalParams()
    repump = repump or OpticalParams.repump(pump.pump_duration, pump.pump_efficiency)
    try:
        tree = get_parser().parse(text)
    except UnexpectedInput as exc:
        error = _syntax_error(exc, text)
        logger.debug(f"Program syntax error: {error.message}")
        raise error from exc

    try:
        program = ProgramBuilder(text, pump, repump, name).transform(tree)
    except VisitError as exc:
        if isinstance(exc.orig_exc, NVPumpError):
            raise exc.orig_exc from None
        raise
    logger.debug(f"Parsed program with {len(program.steps)} steps x {program.repeat_count}")
    return program


def parse_file(
    path: str | Path, pump: OpticalParams | None = None, repump: OpticalParams | None = None
) -> ProtocolProgram:
    """Parse a ``.seq`` file; the program is named after the file stem.

    Raises:
        OutputError: FILE_NOT_FOUND if the file cannot be read.
    """
    source = Path(path)
    try:
        text = source.read_text(encoding="utf-8")
    except OSError as exc:
        raise OutputError(str(source), exc.strerror or str(exc), ErrorCode.FILE_NOT_FOUND) from exc
    return parse_program(text, pump, repump, name=source.stem)
