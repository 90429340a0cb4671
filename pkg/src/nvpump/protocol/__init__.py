"""Protocol engine: programs, SE/PT builders and the sequencer."""

from nvpump.protocol.builders import (
    Branch,
    PaMapping,
    PulseModel,
    build_pt_program,
    build_se_program,
    check_resolvable,
    flip_probability_for,
    rf_angle_for,
)
from nvpump.protocol.engine import (
    ProtocolEngine,
    RunTrace,
    StepRecord,
    run_program,
    run_recursive_series,
)
from nvpump.protocol.program import (
    InstructionKind,
    LaserRole,
    ProtocolProgram,
    PulseInstruction,
    RepeatBlock,
)


__all__ = [
    "Branch",
    "InstructionKind",
    "LaserRole",
    "PaMapping",
    "ProtocolEngine",
    "ProtocolProgram",
    "PulseInstruction",
    "PulseModel",
    "RepeatBlock",
    "RunTrace",
    "StepRecord",
    "build_pt_program",
    "build_se_program",
    "check_resolvable",
    "flip_probability_for",
    "rf_angle_for",
    "run_program",
    "run_recursive_series",
]
