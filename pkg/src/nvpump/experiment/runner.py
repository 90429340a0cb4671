"""Single experiment runs: build, simulate, observe, write."""

from pathlib import Path
from typing import Any

import arrow
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field

from nvpump.core.exceptions import ErrorCode, NVPumpError
from nvpump.core.settings import settings
from nvpump.experiment.config import ExperimentConfig, ProtocolKind, ReadoutKind
from nvpump.experiment.output import build_manifest, write_manifest, write_spectrum, write_table
from nvpump.protocol.builders import (
    PulseModel,
    build_pt_program,
    build_se_program,
    check_resolvable,
)
from nvpump.protocol.engine import ProtocolEngine, RunTrace
from nvpump.protocol.program import LaserRole, ProtocolProgram, PulseInstruction
from nvpump.readout.esr import synthesize_esr_from_config
from nvpump.readout.estimate import estimate_populations
from nvpump.readout.ramsey import ramsey_spectrum
from nvpump.readout.spectra import SpectrumTrace
from nvpump.seqlang.parser import parse_file, parse_program
from nvpump.spin.state import DensityMatrix, Fractions, initial_state
from nvpump.spin.system import SpinSystem
from nvpump.toymodel import (
    MonteCarloEstimate,
    ToyModelParams,
    limit_population,
    monte_carlo_oracle,
    target_series,
)


SERIES_COLUMNS = ("n", "p_plus1", "p_0", "p_minus1")


class PointResult(BaseModel):
    """Outcome of one parameter point."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    fractions: list[Fractions] = Field(description="Nuclear fractions after n = 0..cycles")
    p_a: float
    p_b: float
    p0_limit: float | None
    toy_target: list[float] | None = None
    monte_carlo: MonteCarloEstimate | None = None
    spectra: dict[str, SpectrumTrace] = Field(default_factory=dict)
    estimates: dict[str, Fractions] = Field(default_factory=dict)
    warnings: list[str] = Field(default_factory=list)

    @property
    def final(self) -> Fractions:
        """Fractions after the last cycle."""
        return self.fractions[-1]


class RunResult(BaseModel):
    """Files written by a run and the numbers behind them."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    directory: Path
    files: list[Path]
    manifest: dict[str, Any]
    point: PointResult | None = None


def target_index(config: ExperimentConfig) -> int:
    """Position of the target m_I in (P+1, P0, P-1)."""
    target = 0 if config.protocol.kind is ProtocolKind.SE else config.protocol.target_mi
    return 1 - target


def build_program(
    config: ExperimentConfig, pulse_model: PulseModel | None = None
) -> ProtocolProgram:
    """One cycle of the configured protocol, lasers calibrated from ``config.optics``.

    Raises:
        ProgramBuildError: If addressed lines collide at the configured field.
    """
    system = config.system
    pulse_model = pulse_model or config.pulses.pulse_model()
    protocol = config.protocol
    pump, repump = config.optics.pump(), config.optics.repump()
    if protocol.kind is ProtocolKind.SE:
        return build_se_program(system, pulse_model, alpha_first=protocol.alpha_first)
    if protocol.kind is ProtocolKind.PT:
        return build_pt_program(
            system,
            branch=protocol.branch,
            target_mi=protocol.target_mi,
            optics=pump,
            pulse_model=pulse_model,
            repump=repump,
        )
    if protocol.seq_file is None:
        raise NVPumpError("seq protocol without a program file", ErrorCode.CONFIGURATION_ERROR)
    return _single_cycle(system, parse_file(protocol.seq_file, pump, repump))


def _single_cycle(system: SpinSystem, program: ProtocolProgram) -> ProtocolProgram:
    check_resolvable(system, program.transitions())
    if program.repeat_count > 1:
        # An outer repeat in the text belongs to every cycle.
        program = ProtocolProgram(steps=program.steps * program.repeat_count, name=program.name)
    return program


def program_from_text(
    config: ExperimentConfig, text: str, name: str | None = None
) -> ProtocolProgram:
    """One cycle of a program given as text, lasers calibrated from ``config.optics``.

    Raises:
        SeqSyntaxError: Text does not parse.
        ProgramBuildError: If addressed lines collide at the configured field.
    """
    program = parse_program(text, config.optics.pump(), config.optics.repump(), name)
    return _single_cycle(config.system, program)


def prepare_state(config: ExperimentConfig, engine: ProtocolEngine) -> DensityMatrix:
    """Initial state, after the long reset pulse when ``protocol.reset`` is set."""
    protocol = config.protocol
    state = initial_state(protocol.initial_state, protocol.populations)
    if protocol.reset:
        reset = ProtocolProgram(
            steps=(PulseInstruction.laser(config.optics.reset(), LaserRole.PUMP),), name="reset"
        )
        state, _trace = engine.run(reset, state)
    return state


def observe(config: ExperimentConfig, fractions: Fractions) -> SpectrumTrace | None:
    """Spectrum of the configured readout, or None without one."""
    readout = config.readout
    if readout.kind is ReadoutKind.ESR:
        return synthesize_esr_from_config(fractions, config.system, readout.esr)
    if readout.kind is ReadoutKind.RAMSEY:
        _signal, spectrum = ramsey_spectrum(fractions, config.system, readout.ramsey)
        return spectrum
    return None


def simulate(
    config: ExperimentConfig, program: ProtocolProgram
) -> tuple[list[Fractions], RunTrace]:
    """Fractions after 0..cycles passes of ``program`` and the trace of the passes."""
    engine = ProtocolEngine(config.system)
    state = prepare_state(config, engine)
    fractions, _states, trace = engine.series(program, state, config.protocol.cycles)
    return fractions, trace


def _toy_columns(
    config: ExperimentConfig, fractions: list[Fractions]
) -> tuple[float, float, float | None, list[float] | None, MonteCarloEstimate | None]:
    p_a = config.pulses.effective_p_a
    p_b = config.toy_flip_probability()
    try:
        p0_limit: float | None = limit_population(p_a, p_b)
    except NVPumpError:
        p0_limit = None
    if not config.toy.enabled:
        return p_a, p_b, p0_limit, None, None

    start = fractions[0][target_index(config)]
    depleted = min(max(1 - start, 0.0), 1.0)
    params = ToyModelParams(p_a=p_a, p_b=min(p_b, 1.0), p_minus_0=depleted)
    toy = target_series(params, config.protocol.cycles)
    estimate = None
    if config.toy.monte_carlo_trials:
        estimate = monte_carlo_oracle(
            params, config.protocol.cycles, config.toy.monte_carlo_trials, config.seed
        )
    return p_a, p_b, p0_limit, toy, estimate


def evaluate_point(config: ExperimentConfig) -> PointResult:
    """Simulate one configuration and observe it; nothing is written.

    Spectra are keyed ``final``, ``n<k>`` (with ``readout.every_cycle``),
    ``rf_off`` and ``optimum`` (for the companion runs).
    """
    program = build_program(config)
    fractions, trace = simulate(config, program)
    p_a, p_b, p0_limit, toy, estimate = _toy_columns(config, fractions)

    spectra: dict[str, SpectrumTrace] = {}
    cycles = range(1, len(fractions) - 1) if config.readout.every_cycle else ()
    for n in cycles:
        spectrum = observe(config, fractions[n])
        if spectrum is not None:
            spectra[f"n{n}"] = spectrum
    final = observe(config, fractions[-1])
    if final is not None:
        spectra["final"] = final

    if config.protocol.rf_off_companion:
        rf_off_program = build_program(config).without_rf()
        rf_off, _ = simulate(config, rf_off_program)
        companion = observe(config, rf_off[-1])
        if companion is not None:
            spectra["rf_off"] = companion

    if config.protocol.optimum_reference:
        optimum_config = config.model_copy(
            update={
                "pulses": config.pulses.model_copy(
                    update={"mw_angle_pi": 1.0, "rf_angle_pi": 1.0, "p_a": None}
                ),
                "protocol": config.protocol.model_copy(update={"cycles": 1}),
            }
        )
        optimum, _ = simulate(optimum_config, build_program(optimum_config))
        reference = observe(config, optimum[-1])
        if reference is not None:
            spectra["optimum"] = reference

    estimates = {key: estimate_populations(spectrum) for key, spectrum in spectra.items()}
    return PointResult(
        fractions=fractions,
        p_a=p_a,
        p_b=p_b,
        p0_limit=p0_limit,
        toy_target=toy,
        monte_carlo=estimate,
        spectra=spectra,
        estimates=estimates,
        warnings=trace.warnings,
    )


def series_table(
    config: ExperimentConfig, point: PointResult
) -> tuple[list[str], list[list[float | int | None]]]:
    """Per-cycle table: engine fractions, toy model and spectral estimate of P0."""
    columns = list(SERIES_COLUMNS)
    if point.toy_target is not None:
        columns.append("toy_target")
    if point.monte_carlo is not None:
        columns.extend(["mc_target", "mc_stderr"])
    readout = config.readout.kind is not ReadoutKind.NONE
    if readout:
        columns.append("est_p_0")

    last = len(point.fractions) - 1
    rows: list[list[float | int | None]] = []
    for n, fractions in enumerate(point.fractions):
        row: list[float | int | None] = [n, *fractions]
        if point.toy_target is not None:
            row.append(point.toy_target[n])
        if point.monte_carlo is not None:
            mc = point.monte_carlo
            row.extend([1 - mc.estimate, mc.standard_error] if n == last else [None, None])
        if readout:
            key = "final" if n == last else f"n{n}"
            estimate = point.estimates.get(key)
            row.append(estimate[1] if estimate is not None else None)
        rows.append(row)
    return columns, rows


def output_directory(config: ExperimentConfig, override: Path | None = None) -> Path:
    """Where a run writes: explicit override, then the config, then settings."""
    if override is not None:
        return Path(override)
    if config.output.directory is not None:
        return config.output.directory
    return Path(settings.output_dir) / config.name


def run_experiment(config: ExperimentConfig, output_dir: Path | None = None) -> RunResult:
    """Run the configured protocol and write its series table, spectra and manifest.

    Raises:
        NVPumpError: Build, readout or output failures; nothing is written
            before the simulation succeeds.
    """
    started = arrow.utcnow()
    protocol = config.protocol
    logger.info(f"Running '{config.name}' ({protocol.kind.value}, {protocol.cycles} cycles)")
    point = evaluate_point(config)
    directory = output_directory(config, output_dir)
    write_json = config.output.write_json

    columns, rows = series_table(config, point)
    metadata = {
        "p_a": point.p_a,
        "p_b": point.p_b,
        "p0_limit": point.p0_limit,
        "estimates": {key: list(value) for key, value in point.estimates.items()},
        "warnings": point.warnings,
    }
    files = write_table(directory / "series.csv", columns, rows, metadata, write_json)
    for key, spectrum in point.spectra.items():
        files += write_spectrum(directory / f"spectrum_{key}.csv", spectrum, write_json)

    final = point.final
    manifest = build_manifest(
        config.model_dump(mode="json"),
        files,
        directory,
        started,
        {"final_fractions": list(final), "p0_limit": point.p0_limit},
    )
    files.append(write_manifest(directory, manifest))
    elapsed = (arrow.utcnow() - started).total_seconds()
    logger.info(
        f"Finished '{config.name}' in {elapsed:.2f}s: P0 = {final[1]:.4f}, "
        f"{len(files)} files in {directory}"
    )
    return RunResult(directory=directory, files=files, manifest=manifest, point=point)
