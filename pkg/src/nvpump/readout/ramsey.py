"""Ramsey free-induction signals and their Fourier spectra."""

import math
from collections.abc import Sequence

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, field_validator

from nvpump.core.exceptions import ConfigurationError, ErrorCode, ReadoutError
from nvpump.readout.spectra import (
    SpectrumKind,
    SpectrumMetadata,
    SpectrumMode,
    SpectrumTrace,
    check_fractions,
)
from nvpump.spin.system import SpinSystem


PARSEVAL_TOLERANCE = 1e-9


class RamseyConfig(BaseModel):
    """Sampling of a Ramsey measurement. ``dephasing_time=None`` disables the decay."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    detuning: float = Field(default=5.0, description="Carrier offset delta (MHz)")
    dephasing_time: float | None = Field(default=2.0, gt=0.0, description="T2* (us)")
    dwell: float = Field(default=0.05, gt=0.0, description="Sample spacing (us)")
    n_points: int = Field(default=512, ge=2)
    mode: SpectrumMode = SpectrumMode.MAGNITUDE
    zero_fill: int = Field(default=1, ge=1, description="FFT length as a multiple of n_points")

    @field_validator("n_points")
    @classmethod
    def _power_of_two(cls, value: int) -> int:
        if value & (value - 1):
            raise ValueError(f"n_points must be a power of two, got {value}")
        return value

    @property
    def nyquist(self) -> float:
        """Highest representable frequency (MHz)."""
        return 1 / (2 * self.dwell)

    def check_tones(self, system: SpinSystem) -> None:
        """Reject tones that alias or fold through zero.

        Raises:
            ConfigurationError: ALIASING if a tone leaves (0, Nyquist).
        """
        high = self.detuning + abs(system.hyperfine)
        low = self.detuning - abs(system.hyperfine)
        if high >= self.nyquist:
            raise ConfigurationError(
                f"Ramsey tone {high:.4g} MHz exceeds Nyquist {self.nyquist:.4g} MHz "
                f"(dwell {self.dwell} us)",
                ErrorCode.ALIASING,
            )
        if low <= 0:
            raise ConfigurationError(
                f"Ramsey tone {low:.4g} MHz is not positive; raise the detuning above "
                f"{abs(system.hyperfine):.4g} MHz",
                ErrorCode.ALIASING,
            )


class RamseySignal(BaseModel):
    """Sampled time-domain Ramsey signal."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    times: np.ndarray
    values: np.ndarray
    config: RamseyConfig
    tones: tuple[float, float, float]


def ramsey_line_frequencies(
    system: SpinSystem, config: RamseyConfig
) -> tuple[float, float, float]:
    """Tone frequencies delta + A m_I for m_I = +1, 0, -1."""
    return (
        config.detuning + system.hyperfine,
        config.detuning,
        config.detuning - system.hyperfine,
    )


def synthesize_ramsey(
    fractions: Sequence[float], system: SpinSystem, config: RamseyConfig
) -> RamseySignal:
    """s(t_k) = sum_m P_m cos(2 pi (delta + A m) t_k) exp(-t_k / T2*), k = 0..n_points-1.

    Raises:
        ConfigurationError: If a tone aliases.
        ReadoutError: If the fractions are not a distribution.
    """
    values = check_fractions(fractions)
    config.check_tones(system)
    times = np.arange(config.n_points) * config.dwell
    tones = ramsey_line_frequencies(system, config)
    signal = sum(
        weight * np.cos(2 * math.pi * tone * times)
        for weight, tone in zip(values, tones, strict=True)
    )
    if config.dephasing_time is not None:
        signal = signal * np.exp(-times / config.dephasing_time)
    return RamseySignal(
        times=times, values=np.asarray(signal, dtype=float), config=config, tones=tones
    )


def _parseval_error(samples: np.ndarray, transform: np.ndarray) -> float:
    length = samples.size
    weights = np.full(transform.size, 2.0)
    weights[0] = 1.0
    if length % 2 == 0:
        weights[-1] = 1.0
    time_energy = float(np.sum(samples**2))
    freq_energy = float(np.sum(weights * np.abs(transform) ** 2) / length)
    if time_energy == 0.0:
        return abs(freq_energy)
    return abs(time_energy - freq_energy) / time_energy


def fft_spectrum(
    signal: Sequence[float] | np.ndarray,
    dwell: float,
    mode: SpectrumMode = SpectrumMode.MAGNITUDE,
    zero_fill: int = 1,
    dephasing_time: float | None = None,
    line_centers: Sequence[float] = (),
) -> SpectrumTrace:
    """One-sided spectrum of a uniformly sampled signal, 0 up to Nyquist.

    Amplitudes are scaled by 2 / len(signal), so an undamped unit cosine at a
    bin centre peaks at 1. Absorption mode halves the first sample and keeps
    the real part.

    Args:
        signal: Samples at spacing ``dwell``.
        dwell: Sample spacing (us).
        mode: Magnitude or absorption.
        zero_fill: FFT length as a multiple of the signal length.
        dephasing_time: T2* of the signal, recorded so lines can be modelled.
        line_centers: Expected tone frequencies, recorded in the metadata.
    """
    samples = np.asarray(signal, dtype=float).copy()
    n_signal = samples.size
    if samples.ndim != 1 or n_signal < 2 or dwell <= 0:
        raise ReadoutError(
            f"need a 1-D signal of at least 2 samples and dwell > 0, got shape {samples.shape}"
        )
    halved = mode is SpectrumMode.ABSORPTION
    if halved and n_signal:
        samples[0] *= 0.5
    n_fft = n_signal * zero_fill
    padded = np.zeros(n_fft)
    padded[:n_signal] = samples

    transform = np.fft.rfft(padded)
    frequencies = np.fft.rfftfreq(n_fft, d=dwell)
    error = _parseval_error(padded, transform)
    if error > PARSEVAL_TOLERANCE:
        logger.warning(f"Parseval check off by {error:.3g} (relative)")

    scale = 2.0 / n_signal
    part = transform.real if halved else np.abs(transform)
    if dephasing_time is None:
        decay = 1.0
        linewidth = 1 / (n_signal * dwell)
    else:
        decay = math.exp(-dwell / dephasing_time)
        linewidth = 1 / (math.pi * dephasing_time)

    return SpectrumTrace(
        frequencies=frequencies,
        amplitudes=scale * part,
        metadata=SpectrumMetadata(
            kind=SpectrumKind.RAMSEY_FFT,
            linewidth=linewidth,
            mode=mode,
            dwell=dwell,
            n_signal=n_signal,
            decay_per_sample=decay,
            halved_first_point=halved,
            scale=scale,
            line_centers=tuple(line_centers),
            parseval_error=error,
        ),
    )


def ramsey_spectrum(
    fractions: Sequence[float], system: SpinSystem, config: RamseyConfig
) -> tuple[RamseySignal, SpectrumTrace]:
    """Synthesize a Ramsey signal and transform it with the config's FFT settings."""
    signal = synthesize_ramsey(fractions, system, config)
    spectrum = fft_spectrum(
        signal.values,
        config.dwell,
        mode=config.mode,
        zero_fill=config.zero_fill,
        dephasing_time=config.dephasing_time,
        line_centers=signal.tones,
    )
    return signal, spectrum

