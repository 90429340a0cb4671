"""Protocol simulation tool."""

from enum import Enum
from typing import Any

from mcp.types import TextContent
from pydantic import BaseModel, Field, ValidationError

from nvpump.core.exceptions import ConfigurationError
from nvpump.experiment.config import (
    ExperimentConfig,
    OpticsConfig,
    ProtocolConfig,
    ProtocolKind,
    PulsesConfig,
    ReadoutConfig,
    ReadoutKind,
    format_validation,
)
from nvpump.experiment.runner import build_program, program_from_text, simulate, target_index
from nvpump.protocol.builders import Branch, PaMapping
from nvpump.protocol.program import ProtocolProgram
from nvpump.spin.state import InitialStateKind
from nvpump.spin.system import SpinSystem
from nvpump.tools.base import CachedTool


class ProgramSource(str, Enum):
    """Which program the tool runs."""

    SE = "se"
    PT = "pt"
    TEXT = "text"


class RunProtocolSchema(BaseModel):
    """Schema for protocol run arguments."""

    protocol: ProgramSource = Field(default=ProgramSource.PT, description="se, pt or text")
    program_text: str | None = Field(
        default=None, description="Program text, required when protocol is 'text'"
    )
    cycles: int = Field(default=1, ge=1, le=1_000, description="Number of program passes N")
    b_field: float = Field(default=30.2, ge=0.0, description="Axial magnetic field (mT)")
    branch: Branch = Field(default=Branch.MINUS, description="PT shelf: minus or plus")
    target_mi: int = Field(default=0, ge=-1, le=1, description="PT target nuclear state")
    mw_angle_pi: float = Field(default=1.0, ge=0.0, le=2.0, description="mw angle / pi")
    rf_angle_pi: float = Field(default=1.0, ge=0.0, le=2.0, description="rf angle / pi")
    p_a: float | None = Field(
        default=None, ge=0.0, le=1.0, description="rf flip probability; overrides rf_angle_pi"
    )
    pa_mapping: PaMapping = Field(default=PaMapping.SINE, description="sine or linear")
    nuclear_flip_rate: float = Field(default=1.43, ge=0.0, description="Optical flip rate (1/us)")
    flip_probability: float | None = Field(
        default=None, ge=0.0, description="p_b of the closing laser; overrides the rate"
    )
    pump_duration: float = Field(default=0.25, gt=0.0, description="Laser duration (us)")
    initial_state: InitialStateKind = Field(
        default=InitialStateKind.OPTICALLY_INITIALIZED,
        description="optically_initialized, fully_mixed or custom",
    )
    populations: list[float] | None = Field(
        default=None, description="Nine populations for a custom initial state"
    )
    reset: bool = Field(default=False, description="Apply the 10 us reset pulse first")


class RunProtocolTool(CachedTool):
    """Run SE, PT or a program text through the nine-level engine.

    Examples:
        - Single PT pass: {"protocol": "pt", "b_field": 30.2}
        - Recursive PT: {"protocol": "pt", "cycles": 6, "rf_angle_pi": 0.5}
        - Program text: {"protocol": "text", "program_text": "mw (0,-1) -> (-1,-1) 1pi"}
    """

    name = "nvpump_run_protocol"
    description = (
        "Simulate the spin-exchange (se) or population-trapping (pt) protocol, or a program "
        "text, for N cycles on the NV-14N density matrix. Returns nuclear fractions "
        "(P+1, P0, P-1) after every cycle and a trace summary with warnings. "
        'Example: {"protocol": "pt", "cycles": 3, "p_a": 0.5, "flip_probability": 0.2}'
    )
    args_schema = RunProtocolSchema

    @staticmethod
    def config_for(args: RunProtocolSchema) -> ExperimentConfig:
        """Experiment config equivalent to the tool arguments."""
        kind = ProtocolKind.SE if args.protocol is ProgramSource.SE else ProtocolKind.PT
        try:
            return ExperimentConfig(
                name=f"tool-{args.protocol.value}",
                system=SpinSystem(b_field=args.b_field),
                optics=OpticsConfig(
                    nuclear_flip_rate=args.nuclear_flip_rate,
                    flip_probability=args.flip_probability,
                    pump_duration=args.pump_duration,
                ),
                protocol=ProtocolConfig(
                    kind=kind,
                    branch=args.branch,
                    target_mi=args.target_mi,
                    cycles=args.cycles,
                    initial_state=args.initial_state,
                    populations=args.populations,
                    reset=args.reset,
                ),
                pulses=PulsesConfig(
                    mw_angle_pi=args.mw_angle_pi,
                    rf_angle_pi=args.rf_angle_pi,
                    p_a=args.p_a,
                    pa_mapping=args.pa_mapping,
                ),
                readout=ReadoutConfig(kind=ReadoutKind.NONE),
            )
        except ValidationError as exc:
            message = f"invalid protocol arguments: {format_validation(exc)}"
            raise ConfigurationError(message) from exc

    @classmethod
    def simulate(cls, args: RunProtocolSchema) -> dict[str, Any]:
        """Blocking part of the tool."""
        config = cls.config_for(args)
        program: ProtocolProgram
        if args.protocol is ProgramSource.TEXT:
            if args.program_text is None:
                raise ConfigurationError("protocol 'text' needs program_text")
            program = program_from_text(config, args.program_text, name="text")
        else:
            program = build_program(config)
        fractions, trace = simulate(config, program)
        return {
            "program": [instruction.description for instruction in program.instructions()],
            "target_index": target_index(config),
            "rows": [
                {"n": n, "p_plus1": value[0], "p_0": value[1], "p_minus1": value[2]}
                for n, value in enumerate(fractions)
            ],
            "trace": trace.summary(),
        }

    async def _run_impl(self, arguments: dict[str, Any]) -> list[TextContent]:
        """Execute the tool."""
        args = self.parse_arguments(arguments, RunProtocolSchema)
        return self.render(await self.offload(self.simulate, args))
