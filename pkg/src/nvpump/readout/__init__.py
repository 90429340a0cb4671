"""Synthetic ESR and Ramsey-FFT readout, and population estimation."""

from nvpump.readout.esr import EsrConfig, synthesize_esr, synthesize_esr_from_config
from nvpump.readout.estimate import estimate_populations, interpolate_peak
from nvpump.readout.ramsey import (
    RamseyConfig,
    RamseySignal,
    fft_spectrum,
    ramsey_line_frequencies,
    ramsey_spectrum,
    synthesize_ramsey,
)
from nvpump.readout.spectra import (
    LineShape,
    SpectrumKind,
    SpectrumMetadata,
    SpectrumMode,
    SpectrumTrace,
)


__all__ = [
    "EsrConfig",
    "LineShape",
    "RamseyConfig",
    "RamseySignal",
    "SpectrumKind",
    "SpectrumMetadata",
    "SpectrumMode",
    "SpectrumTrace",
    "estimate_populations",
    "fft_spectrum",
    "interpolate_peak",
    "ramsey_line_frequencies",
    "ramsey_spectrum",
    "synthesize_esr",
    "synthesize_esr_from_config",
    "synthesize_ramsey",
]
