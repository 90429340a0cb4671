"""Experiment configuration loaded from YAML."""

import math
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np
import yaml
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from nvpump.core.exceptions import ConfigurationError, ErrorCode, SpinDomainError
from nvpump.protocol.builders import (
    Branch,
    PaMapping,
    PulseModel,
    flip_probability_for,
    rf_angle_for,
)
from nvpump.readout.esr import EsrConfig
from nvpump.readout.ramsey import RamseyConfig
from nvpump.spin.optics import OpticalParams, leave_probability
from nvpump.spin.pulses import SelectivityMode
from nvpump.spin.state import InitialStateKind
from nvpump.spin.system import SpinSystem


class ProtocolKind(str, Enum):
    """Which program a run executes."""

    SE = "se"
    PT = "pt"
    SEQ = "seq"


class ReadoutKind(str, Enum):
    """How the final state is observed."""

    NONE = "none"
    ESR = "esr"
    RAMSEY = "ramsey"


class SweepAxis(str, Enum):
    """Parameters a sweep can vary."""

    CYCLES = "cycles"
    P_A = "p_a"
    RF_ANGLE_PI = "rf_angle_pi"
    P2_DURATION_US = "p2_duration_us"
    B_FIELD_MT = "b_field_mt"
    FLIP_RATE = "flip_rate"


class _Section(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class OpticsConfig(_Section):
    """Laser calibration. Durations in us, rates in 1/us.

    ``flip_probability`` overrides ``nuclear_flip_rate`` with the rate that gives
    that p_b over ``pump_duration``; ``two_level`` selects the biased form in
    which the (+1, 0) pair flips like a spin-1/2.
    """

    nuclear_flip_rate: float = Field(default=1.43, ge=0.0)
    flip_bias: float = Field(default=0.0, ge=-1.0, le=1.0)
    pump_efficiency: float = Field(default=1.0, ge=0.0, le=1.0)
    pumping_rate: float = Field(default=0.0, ge=0.0)
    pump_duration: float = Field(default=0.25, gt=0.0)
    flip_probability: float | None = Field(default=None, ge=0.0)
    two_level: bool = False
    repump_duration: float | None = Field(default=None, gt=0.0)
    repump_flip_rate: float = Field(default=0.0, ge=0.0)
    reset_duration: float = Field(default=10.0, gt=0.0)

    @model_validator(mode="after")
    def _check_flip_probability(self) -> "OpticsConfig":
        if self.flip_probability is not None:
            try:
                self.pump()
            except SpinDomainError as exc:
                raise ValueError(exc.message) from exc
        return self

    def pump(self) -> OpticalParams:
        """Calibration of the closing (p2) laser."""
        if self.flip_probability is not None:
            base = OpticalParams.for_flip_probability(
                self.flip_probability, self.pump_duration, two_level=self.two_level
            )
            return base.model_copy(
                update={
                    "pump_efficiency": self.pump_efficiency,
                    "pumping_rate": self.pumping_rate,
                }
            )
        return OpticalParams(
            pump_duration=self.pump_duration,
            nuclear_flip_rate=self.nuclear_flip_rate,
            flip_bias=self.flip_bias,
            pump_efficiency=self.pump_efficiency,
            pumping_rate=self.pumping_rate,
        )

    def repump(self) -> OpticalParams:
        """Calibration of mid-cycle (p1) lasers."""
        return OpticalParams(
            pump_duration=self.repump_duration or self.pump_duration,
            nuclear_flip_rate=self.repump_flip_rate,
            pump_efficiency=self.pump_efficiency,
        )

    def reset(self) -> OpticalParams:
        """Long readout pulse that erases the previous run's polarization."""
        return self.pump().with_duration(self.reset_duration)


class ProtocolConfig(_Section):
    """Program selection and initial state."""

    kind: ProtocolKind = ProtocolKind.PT
    branch: Branch = Branch.MINUS
    target_mi: int = Field(default=0, ge=-1, le=1)
    alpha_first: bool = True
    seq_file: Path | None = None
    cycles: int = Field(default=1, ge=1)
    initial_state: InitialStateKind = InitialStateKind.OPTICALLY_INITIALIZED
    populations: list[float] | None = None
    reset: bool = False
    rf_off_companion: bool = False
    optimum_reference: bool = False

    @model_validator(mode="after")
    def _check_protocol(self) -> "ProtocolConfig":
        if self.kind is ProtocolKind.SEQ and self.seq_file is None:
            raise ValueError("protocol kind 'seq' needs seq_file")
        if self.initial_state is InitialStateKind.CUSTOM and self.populations is None:
            raise ValueError("initial_state 'custom' needs populations")
        return self


class PulsesConfig(_Section):
    """mw/rf pulse template. Angles in units of pi, frequencies in MHz.

    ``p_a`` sets the rf angle through ``pa_mapping`` and wins over ``rf_angle_pi``.
    """

    mw_angle_pi: float = Field(default=1.0, ge=0.0, le=2.0)
    rf_angle_pi: float = Field(default=1.0, ge=0.0, le=2.0)
    p_a: float | None = Field(default=None, ge=0.0, le=1.0)
    pa_mapping: PaMapping = PaMapping.SINE
    selectivity_mode: SelectivityMode = SelectivityMode.IDEAL
    mw_rabi_frequency: float = Field(default=0.5, gt=0.0)
    rf_rabi_frequency: float = Field(default=0.05, gt=0.0)
    mw_carrier_offset: float = 0.0
    rf_carrier_offset: float = 0.0

    @property
    def rf_angle(self) -> float:
        """rf rotation angle (rad)."""
        if self.p_a is not None:
            return rf_angle_for(self.p_a, self.pa_mapping)
        return self.rf_angle_pi * math.pi

    @property
    def effective_p_a(self) -> float:
        """rf flip probability implied by the rf angle."""
        if self.p_a is not None:
            return self.p_a
        return flip_probability_for(self.rf_angle, PaMapping.SINE)

    def pulse_model(self) -> PulseModel:
        """Builder template."""
        return PulseModel(
            mw_angle=self.mw_angle_pi * math.pi,
            rf_angle=self.rf_angle,
            selectivity_mode=self.selectivity_mode,
            mw_rabi_frequency=self.mw_rabi_frequency,
            rf_rabi_frequency=self.rf_rabi_frequency,
            mw_carrier_offset=self.mw_carrier_offset,
            rf_carrier_offset=self.rf_carrier_offset,
        )


class ReadoutConfig(_Section):
    """Observation of the final state."""

    kind: ReadoutKind = ReadoutKind.ESR
    esr: EsrConfig = Field(default_factory=EsrConfig)
    ramsey: RamseyConfig = Field(default_factory=RamseyConfig)
    every_cycle: bool = False


class AxisSpec(_Section):
    """Explicit ``values`` or an inclusive ``start``/``stop``/``num`` grid."""

    values: list[float] | None = None
    start: float | None = None
    stop: float | None = None
    num: int | None = Field(default=None, ge=0)

    def points(self) -> list[float]:
        """Axis values in order.

        Raises:
            ConfigurationError: EMPTY_SWEEP_AXIS when there are none.
        """
        if self.values is not None:
            points = list(self.values)
        elif self.start is not None and self.stop is not None and self.num is not None:
            points = np.linspace(self.start, self.stop, self.num).tolist()
        else:
            points = []
        if not points:
            raise ConfigurationError("sweep axis has no values", ErrorCode.EMPTY_SWEEP_AXIS)
        return points


class SweepConfig(_Section):
    """Axes of a Cartesian sweep; the first axis varies slowest."""

    axes: dict[SweepAxis, AxisSpec] = Field(default_factory=dict)

    def check_axes(self) -> None:
        """Make sure every axis has values.

        Raises:
            ConfigurationError: EMPTY_SWEEP_AXIS naming the offending axis.
        """
        if not self.axes:
            raise ConfigurationError("sweep needs at least one axis", ErrorCode.EMPTY_SWEEP_AXIS)
        for axis, spec in self.axes.items():
            try:
                spec.points()
            except ConfigurationError as exc:
                raise ConfigurationError(
                    f"sweep axis '{axis.value}' has no values", ErrorCode.EMPTY_SWEEP_AXIS
                ) from exc

    def grid(self) -> list[dict[SweepAxis, float]]:
        """Every point of the product, lexicographic in axis order."""
        points: list[dict[SweepAxis, float]] = [{}]
        for axis, spec in self.axes.items():
            points = [{**point, axis: value} for point in points for value in spec.points()]
        return points


class OutputConfig(_Section):
    """Where results go; ``directory`` defaults to ``<settings.output_dir>/<name>``.

    ``sweep_spectra`` makes a sweep write every point's spectra as
    ``spectrum_<index>_<key>.csv``.
    """

    directory: Path | None = None
    write_json: bool = True
    sweep_spectra: bool = False


class ToyConfig(_Section):
    """Spin-1/2 reference columns."""

    enabled: bool = True
    monte_carlo_trials: int = Field(default=0, ge=0)


class ExperimentConfig(_Section):
    """Everything a run needs; every default ends up in the manifest."""

    name: str = "experiment"
    description: str = ""
    system: SpinSystem = Field(default_factory=SpinSystem)
    optics: OpticsConfig = Field(default_factory=OpticsConfig)
    protocol: ProtocolConfig = Field(default_factory=ProtocolConfig)
    pulses: PulsesConfig = Field(default_factory=PulsesConfig)
    readout: ReadoutConfig = Field(default_factory=ReadoutConfig)
    sweep: SweepConfig | None = None
    output: OutputConfig = Field(default_factory=OutputConfig)
    toy: ToyConfig = Field(default_factory=ToyConfig)
    seed: int = Field(default=0, ge=0)

    def toy_flip_probability(self) -> float:
        """p_b of the closing laser, the optical flip probability per cycle."""
        return leave_probability(self.optics.pump(), 0)

    def with_point(self, point: dict[SweepAxis, float]) -> "ExperimentConfig":
        """Copy with sweep values applied."""
        sections: dict[str, dict[str, Any]] = {}
        for axis, value in point.items():
            if axis is SweepAxis.CYCLES:
                sections.setdefault("protocol", {})["cycles"] = int(value)
            elif axis is SweepAxis.P_A:
                sections.setdefault("pulses", {})["p_a"] = value
            elif axis is SweepAxis.RF_ANGLE_PI:
                sections.setdefault("pulses", {}).update(rf_angle_pi=value, p_a=None)
            elif axis is SweepAxis.P2_DURATION_US:
                # Keep the flip rate fixed while the pulse gets longer.
                pump = self.optics.pump()
                sections.setdefault("optics", {}).update(
                    pump_duration=value,
                    repump_duration=self.optics.repump_duration or self.optics.pump_duration,
                    nuclear_flip_rate=pump.nuclear_flip_rate,
                    flip_bias=pump.flip_bias,
                    flip_probability=None,
                )
            elif axis is SweepAxis.B_FIELD_MT:
                sections.setdefault("system", {})["b_field"] = value
            elif axis is SweepAxis.FLIP_RATE:
                sections.setdefault("optics", {}).update(
                    nuclear_flip_rate=value, flip_probability=None
                )
        data = self.model_dump()
        for section, update in sections.items():
            data[section].update(update)
        return ExperimentConfig.model_validate(data)


def format_validation(exc: ValidationError) -> str:
    """One line per failing field, ``location: message``."""
    parts = []
    for error in exc.errors():
        location = ".".join(str(item) for item in error["loc"]) or "<root>"
        parts.append(f"{location}: {error['msg']}")
    return "; ".join(parts)


def config_from_dict(data: dict[str, Any], base_dir: Path | None = None) -> ExperimentConfig:
    """Validate a config mapping; a relative ``seq_file`` is resolved against ``base_dir``.

    Raises:
        ConfigurationError: On any validation failure or a missing program file.
    """
    try:
        config = ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigurationError(f"invalid configuration: {format_validation(exc)}") from exc
    if config.sweep is not None:
        config.sweep.check_axes()
    if config.readout.kind is ReadoutKind.RAMSEY:
        config.readout.ramsey.check_tones(config.system)

    seq_file = config.protocol.seq_file
    if seq_file is not None:
        if not seq_file.is_absolute() and base_dir is not None:
            seq_file = (base_dir / seq_file).resolve()
        if not seq_file.is_file():
            raise ConfigurationError(
                f"program file not found: {seq_file}", ErrorCode.FILE_NOT_FOUND
            )
        config = config.model_copy(
            update={"protocol": config.protocol.model_copy(update={"seq_file": seq_file})}
        )
    return config


def load_config(path: str | Path) -> ExperimentConfig:
    """Read and validate a YAML experiment file.

    Raises:
        ConfigurationError: If the file is missing, not YAML, or invalid.
    """
    config_file = Path(path).expanduser()
    if not config_file.is_file():
        raise ConfigurationError(f"config file not found: {config_file}", ErrorCode.FILE_NOT_FOUND)
    try:
        with config_file.open(encoding="utf-8") as handle:
            data = yaml.safe_load(handle)
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"{config_file} is not valid YAML: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigurationError(f"{config_file} must contain a mapping of sections")
    config = config_from_dict(data, base_dir=config_file.resolve().parent)
    logger.info(f"Loaded experiment '{config.name}' from {config_file}")
    return config
