"""Pulsed-ESR dip spectra of the hyperfine-split |0> <-> |-1> lines."""

from collections.abc import Sequence

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, model_validator

from nvpump.core.exceptions import ReadoutError
from nvpump.readout.spectra import (
    LineShape,
    SpectrumKind,
    SpectrumMetadata,
    SpectrumTrace,
    check_fractions,
    line_profile,
)
from nvpump.spin.system import SpinSystem, esr_line_frequencies


AUTO_MARGIN_MHZ = 3.0


class EsrConfig(BaseModel):
    """Probe sweep of an ESR spectrum. ``f_min``/``f_max`` default to the lines +/- 3 MHz."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    f_min: float | None = Field(default=None, description="MHz")
    f_max: float | None = Field(default=None, description="MHz")
    n_points: int = Field(default=1201, ge=3)
    linewidth: float = Field(default=0.4, gt=0.0, description="FWHM (MHz)")
    contrast: float = Field(default=0.3, ge=0.0, le=1.0)
    lineshape: LineShape = LineShape.LORENTZIAN

    @model_validator(mode="after")
    def _check_range(self) -> "EsrConfig":
        if self.f_min is not None and self.f_max is not None and self.f_max <= self.f_min:
            raise ValueError("f_max must exceed f_min")
        return self

    def frequency_range(self, system: SpinSystem) -> tuple[float, float]:
        """Explicit range, or one centred on the three lines."""
        lines = esr_line_frequencies(system)
        low = self.f_min if self.f_min is not None else min(lines) - AUTO_MARGIN_MHZ
        high = self.f_max if self.f_max is not None else max(lines) + AUTO_MARGIN_MHZ
        return low, high


def synthesize_esr(
    fractions: Sequence[float],
    system: SpinSystem,
    f_range: tuple[float, float],
    n_points: int = 1201,
    linewidth: float = 0.4,
    contrast: float = 0.3,
    lineshape: LineShape = LineShape.LORENTZIAN,
) -> SpectrumTrace:
    """Normalized fluorescence S(f) = 1 - contrast * sum_m P_m L(f - f_m).

    Args:
        fractions: Nuclear populations (P+1, P0, P-1).
        system: Sets the line positions f_m on the |0> <-> |-1> manifold.
        f_range: Probe range (MHz).
        n_points: Samples across the range.
        linewidth: Line FWHM (MHz).
        contrast: Depth of a fully populated line.
        lineshape: Lorentzian or Gaussian.
    """
    values = check_fractions(fractions)
    if linewidth <= 0:
        raise ReadoutError(f"linewidth must be positive, got {linewidth}")
    f_low, f_high = f_range
    if f_high <= f_low or n_points < 3:
        raise ReadoutError(f"empty probe range {f_range} with {n_points} points")

    centers = esr_line_frequencies(system)
    frequencies = np.linspace(f_low, f_high, n_points)
    depth = sum(
        weight * line_profile(frequencies, center, linewidth, lineshape)
        for weight, center in zip(values, centers, strict=True)
    )
    warnings: tuple[str, ...] = ()
    if all(not f_low <= center <= f_high for center in centers):
        message = f"probe range {f_low:.3f}-{f_high:.3f} MHz misses every line {centers}"
        logger.warning(message)
        warnings = (message,)

    return SpectrumTrace(
        frequencies=frequencies,
        amplitudes=1.0 - contrast * depth,
        metadata=SpectrumMetadata(
            kind=SpectrumKind.ESR,
            linewidth=linewidth,
            contrast=contrast,
            baseline=1.0,
            lineshape=lineshape,
            line_centers=centers,
            warnings=warnings,
        ),
    )


def synthesize_esr_from_config(
    fractions: Sequence[float], system: SpinSystem, config: EsrConfig
) -> SpectrumTrace:
    """:func:`synthesize_esr` with the settings of an :class:`EsrConfig`."""
    return synthesize_esr(
        fractions,
        system,
        config.frequency_range(system),
        n_points=config.n_points,
        linewidth=config.linewidth,
        contrast=config.contrast,
        lineshape=config.lineshape,
    )
