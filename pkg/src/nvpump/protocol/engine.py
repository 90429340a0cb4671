"""Sequencer that folds a protocol program over the spin core."""

from collections.abc import Callable
from dataclasses import dataclass

from loguru import logger
from pydantic import BaseModel, ConfigDict, Field

from nvpump.core.exceptions import ErrorCode, NVPumpError
from nvpump.core.settings import settings
from nvpump.protocol.program import InstructionKind, ProtocolProgram, PulseInstruction
from nvpump.spin.optics import apply_optical_channel
from nvpump.spin.pulses import finite_pulse_action
from nvpump.spin.state import DensityMatrix, Fractions
from nvpump.spin.system import SpinSystem


class StepRecord(BaseModel):
    """What one executed instruction did."""

    model_config = ConfigDict(frozen=True)

    index: int
    cycle: int
    instruction: str
    nuclear_fractions: Fractions
    trace_drift: float
    warnings: tuple[str, ...] = ()


class RunTrace(BaseModel):
    """Per-step record of a run, one entry per executed instruction."""

    steps: list[StepRecord] = Field(default_factory=list)
    markers: dict[str, Fractions] = Field(default_factory=dict)

    @property
    def warnings(self) -> list[str]:
        """All warnings, in execution order, without repeats."""
        seen: dict[str, None] = {}
        for step in self.steps:
            for warning in step.warnings:
                seen.setdefault(warning, None)
        return list(seen)

    @property
    def max_trace_drift(self) -> float:
        """Largest per-step trace deviation."""
        return max((step.trace_drift for step in self.steps), default=0.0)

    def summary(self) -> dict[str, object]:
        """Compact view for tool output and manifests."""
        return {
            "executed_steps": len(self.steps),
            "max_trace_drift": self.max_trace_drift,
            "warnings": self.warnings,
            "markers": {label: list(value) for label, value in self.markers.items()},
        }


@dataclass(frozen=True)
class _CompiledStep:
    instruction: PulseInstruction
    apply: Callable[[DensityMatrix], DensityMatrix]
    warnings: tuple[str, ...]


class ProtocolEngine:
    """Runs programs on a fixed spin system.

    Pulse propagators depend only on the instruction and the system, so they are
    built once per program and reused for every cycle.
    """

    def __init__(self, system: SpinSystem | None = None) -> None:
        """Initialize the engine.

        Args:
            system: Level structure for detunings. Defaults to zero field.
        """
        self.system = system or SpinSystem()

    def compile(self, program: ProtocolProgram) -> list[_CompiledStep]:
        """Turn one cycle of ``program`` into state maps."""
        compiled: list[_CompiledStep] = []
        for instruction in program.instructions():
            if instruction.drive is not None:
                action = finite_pulse_action(self.system, instruction.drive)
                for warning in action.warnings:
                    logger.warning(warning)
                unitary = action.unitary
                compiled.append(
                    _CompiledStep(instruction, lambda s, u=unitary: s.evolve(u), action.warnings)
                )
            elif instruction.optics is not None:
                optics = instruction.optics
                compiled.append(
                    _CompiledStep(instruction, lambda s, o=optics: apply_optical_channel(s, o), ())
                )
            else:
                compiled.append(_CompiledStep(instruction, lambda s: s, ()))
        return compiled

    def _execute(
        self,
        compiled: list[_CompiledStep],
        state: DensityMatrix,
        trace: RunTrace,
        cycle: int,
    ) -> DensityMatrix:
        tolerance = settings.trace_drift_tolerance
        for step in compiled:
            before = state.trace.real
            state = step.apply(state)
            drift = abs(state.trace.real - before)
            warnings = step.warnings
            if drift > tolerance:
                message = f"trace drift {drift:.3e} after {step.instruction.description}"
                logger.warning(message)
                warnings = (*warnings, message)
            fractions = state.nuclear_fractions()
            if step.instruction.kind is InstructionKind.READOUT_MARKER:
                trace.markers[f"{step.instruction.label}@{cycle}"] = fractions
            trace.steps.append(
                StepRecord(
                    index=len(trace.steps),
                    cycle=cycle,
                    instruction=step.instruction.description,
                    nuclear_fractions=fractions,
                    trace_drift=drift,
                    warnings=warnings,
                )
            )
        return state

    def run(
        self, program: ProtocolProgram, state: DensityMatrix
    ) -> tuple[DensityMatrix, RunTrace]:
        """Execute ``program`` ``repeat_count`` times from ``state``."""
        compiled = self.compile(program)
        trace = RunTrace()
        for cycle in range(1, program.repeat_count + 1):
            state = self._execute(compiled, state, trace, cycle)
        logger.debug(
            f"Ran {program.name or 'program'} for {program.repeat_count} cycle(s), "
            f"final fractions {state.nuclear_fractions()}"
        )
        return state, trace

    def series(
        self, program: ProtocolProgram, state: DensityMatrix, n_max: int
    ) -> tuple[list[Fractions], list[DensityMatrix], RunTrace]:
        """Nuclear fractions after n = 0..n_max cycles, with the states themselves."""
        if n_max < 1:
            raise NVPumpError(f"n_max must be >= 1, got {n_max}", ErrorCode.VALIDATION_FAILED)
        compiled = self.compile(program)
        trace = RunTrace()
        fractions = [state.nuclear_fractions()]
        states = [state]
        for cycle in range(1, n_max + 1):
            state = self._execute(compiled, state, trace, cycle)
            fractions.append(state.nuclear_fractions())
            states.append(state)
        return fractions, states, trace


def run_program(
    program: ProtocolProgram, state: DensityMatrix, system: SpinSystem | None = None
) -> tuple[DensityMatrix, RunTrace]:
    """Fold ``program`` over ``state`` ``repeat_count`` times."""
    return ProtocolEngine(system).run(program, state)


def run_recursive_series(
    program: ProtocolProgram,
    state: DensityMatrix,
    n_max: int,
    system: SpinSystem | None = None,
) -> list[Fractions]:
    """Nuclear fractions after each of n = 0..n_max passes of ``program``."""
    fractions, _states, _trace = ProtocolEngine(system).series(program, state, n_max)
    return fractions
