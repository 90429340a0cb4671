"""Sampled spectra and the line shapes used to synthesize them."""

from collections.abc import Sequence
from enum import Enum
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from nvpump.core.exceptions import ReadoutError


FRACTION_TOLERANCE = 1e-6


class SpectrumKind(str, Enum):
    """Where a spectrum came from."""

    ESR = "esr"
    RAMSEY_FFT = "ramsey_fft"


class LineShape(str, Enum):
    """ESR dip profile, normalized to peak 1."""

    LORENTZIAN = "lorentzian"
    GAUSSIAN = "gaussian"


class SpectrumMode(str, Enum):
    """Which part of the Fourier transform is kept."""

    MAGNITUDE = "magnitude"
    ABSORPTION = "absorption"


class SpectrumMetadata(BaseModel):
    """How a spectrum was made; enough to model a single line's response."""

    model_config = ConfigDict(frozen=True)

    kind: SpectrumKind
    linewidth: float = Field(description="FWHM (MHz)")
    contrast: float = 1.0
    baseline: float = 0.0
    lineshape: LineShape = LineShape.LORENTZIAN
    mode: SpectrumMode = SpectrumMode.MAGNITUDE
    dwell: float | None = None
    n_signal: int | None = None
    decay_per_sample: float = 1.0
    halved_first_point: bool = False
    scale: float = 1.0
    line_centers: tuple[float, ...] = ()
    parseval_error: float | None = None
    warnings: tuple[str, ...] = ()


class SpectrumTrace(BaseModel):
    """Sampled (frequency, amplitude) series."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    frequencies: np.ndarray
    amplitudes: np.ndarray
    metadata: SpectrumMetadata

    @field_validator("frequencies", "amplitudes", mode="before")
    @classmethod
    def _as_array(cls, value: Any) -> np.ndarray:
        array = np.array(value, dtype=float, copy=True)
        array.setflags(write=False)
        return array

    @model_validator(mode="after")
    def _check_axes(self) -> "SpectrumTrace":
        if self.frequencies.shape != self.amplitudes.shape or self.frequencies.ndim != 1:
            raise ReadoutError("frequencies and amplitudes must be 1-D arrays of equal length")
        if self.frequencies.size > 1 and np.any(np.diff(self.frequencies) <= 0):
            raise ReadoutError("frequencies must be strictly increasing")
        return self

    @property
    def resolution(self) -> float:
        """Spacing of the frequency grid (MHz)."""
        if self.frequencies.size < 2:
            return 0.0
        return float(self.frequencies[1] - self.frequencies[0])

    @property
    def signal(self) -> np.ndarray:
        """Line content relative to the baseline (dip depth for ESR, peak height for FFT)."""
        if self.metadata.kind is SpectrumKind.ESR:
            return self.metadata.baseline - self.amplitudes
        return self.amplitudes - self.metadata.baseline

    def rows(self) -> list[tuple[float, float]]:
        """(freq_mhz, amplitude) pairs."""
        return list(zip(self.frequencies.tolist(), self.amplitudes.tolist(), strict=True))

    def to_dict(self) -> dict[str, Any]:
        """JSON-ready form."""
        return {
            "metadata": self.metadata.model_dump(mode="json"),
            "freq_mhz": self.frequencies.tolist(),
            "amplitude": self.amplitudes.tolist(),
        }


def lorentzian(frequencies: np.ndarray, center: float, fwhm: float) -> np.ndarray:
    """Peak-normalized Lorentzian."""
    half = fwhm / 2
    return half**2 / ((frequencies - center) ** 2 + half**2)


def gaussian(frequencies: np.ndarray, center: float, fwhm: float) -> np.ndarray:
    """Peak-normalized Gaussian."""
    sigma = fwhm / (2 * np.sqrt(2 * np.log(2)))
    return np.exp(-0.5 * ((frequencies - center) / sigma) ** 2)


def line_profile(
    frequencies: np.ndarray, center: float, fwhm: float, shape: LineShape
) -> np.ndarray:
    """Profile of one line with the given shape."""
    if shape is LineShape.GAUSSIAN:
        return gaussian(frequencies, center, fwhm)
    return lorentzian(frequencies, center, fwhm)


def check_fractions(fractions: Sequence[float]) -> np.ndarray:
    """Validate (P+1, P0, P-1) as a distribution.

    Raises:
        ReadoutError: If there are not three nonnegative values summing to 1.
    """
    values = np.asarray(fractions, dtype=float)
    if values.shape != (3,) or np.any(values < -FRACTION_TOLERANCE):
        raise ReadoutError(f"expected three nonnegative fractions, got {values.tolist()}")
    if abs(values.sum() - 1.0) > FRACTION_TOLERANCE:
        raise ReadoutError(f"fractions sum to {values.sum():.9g}, not 1")
    return values
