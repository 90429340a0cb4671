"""Spectrum synthesis and population estimation tools."""

from typing import Any

from mcp.types import TextContent
from pydantic import BaseModel, Field, ValidationError

from nvpump.core.exceptions import ReadoutError
from nvpump.experiment.config import format_validation
from nvpump.readout.esr import EsrConfig, synthesize_esr_from_config
from nvpump.readout.estimate import estimate_populations
from nvpump.readout.spectra import LineShape, SpectrumKind, SpectrumMetadata, SpectrumTrace
from nvpump.spin.system import SpinSystem, esr_line_frequencies
from nvpump.tools.base import CachedTool


class SynthesizeEsrSchema(BaseModel):
    """Schema for ESR synthesis arguments."""

    fractions: tuple[float, float, float] = Field(description="Nuclear fractions (P+1, P0, P-1)")
    b_field: float = Field(default=30.0, ge=0.0, description="Axial magnetic field (mT)")
    f_min: float | None = Field(default=None, description="Probe start (MHz); auto when unset")
    f_max: float | None = Field(default=None, description="Probe stop (MHz); auto when unset")
    n_points: int = Field(default=1201, ge=3, le=100_001, description="Samples")
    linewidth: float = Field(default=0.4, gt=0.0, description="Line FWHM (MHz)")
    contrast: float = Field(default=0.3, ge=0.0, le=1.0, description="Full-line dip depth")
    lineshape: LineShape = Field(default=LineShape.LORENTZIAN, description="Line profile")
    include_trace: bool = Field(default=False, description="Return every sample as well")


class SynthesizeEsrTool(CachedTool):
    """Pulsed-ESR spectrum of given nuclear fractions.

    Examples:
        - Polarized: {"fractions": [0.05, 0.9, 0.05], "b_field": 30}
        - With samples: {"fractions": [0.33, 0.34, 0.33], "include_trace": true}
    """

    name = "nvpump_synthesize_esr"
    description = (
        "Synthesize the normalized fluorescence S(f) = 1 - contrast * sum P_m L(f - f_m) of the "
        "three hyperfine-split |0> <-> |-1> lines, and read the populations back from it. "
        'Example: {"fractions": [0.05, 0.9, 0.05], "b_field": 30.0}'
    )
    args_schema = SynthesizeEsrSchema

    @staticmethod
    def synthesize(args: SynthesizeEsrSchema) -> dict[str, Any]:
        """Blocking part of the tool."""
        system = SpinSystem(b_field=args.b_field)
        try:
            config = EsrConfig(
                f_min=args.f_min,
                f_max=args.f_max,
                n_points=args.n_points,
                linewidth=args.linewidth,
                contrast=args.contrast,
                lineshape=args.lineshape,
            )
        except ValidationError as exc:
            raise ReadoutError(f"invalid probe sweep: {format_validation(exc)}") from exc
        spectrum = synthesize_esr_from_config(args.fractions, system, config)
        payload: dict[str, Any] = {
            "line_centers_mhz": list(spectrum.metadata.line_centers),
            "minimum": float(spectrum.amplitudes.min()),
            "resolution_mhz": spectrum.resolution,
            "warnings": list(spectrum.metadata.warnings),
            "estimated_fractions": (
                None if spectrum.metadata.warnings else list(estimate_populations(spectrum))
            ),
        }
        if args.include_trace:
            payload["trace"] = spectrum.to_dict()
        return payload

    async def _run_impl(self, arguments: dict[str, Any]) -> list[TextContent]:
        """Execute the tool."""
        args = self.parse_arguments(arguments, SynthesizeEsrSchema)
        return self.render(await self.offload(self.synthesize, args))


class EstimatePopulationsSchema(BaseModel):
    """Schema for population estimation arguments."""

    freq_mhz: list[float] = Field(min_length=3, description="Increasing probe frequencies (MHz)")
    amplitude: list[float] = Field(min_length=3, description="Normalized fluorescence")
    linewidth: float = Field(default=0.4, gt=0.0, description="Line FWHM (MHz)")
    contrast: float = Field(default=0.3, gt=0.0, le=1.0, description="Full-line dip depth")
    lineshape: LineShape = Field(default=LineShape.LORENTZIAN, description="Line profile")
    baseline: float = Field(default=1.0, description="Fluorescence far from the lines")
    b_field: float = Field(default=30.0, ge=0.0, description="Sets the expected line centres")
    expected_lines: tuple[float, float, float] | None = Field(
        default=None, description="Centres of the m_I = +1, 0, -1 lines; overrides b_field"
    )


class EstimatePopulationsTool(CachedTool):
    """Nuclear fractions from a measured or synthesized ESR spectrum."""

    name = "nvpump_estimate_populations"
    description = (
        "Estimate (P+1, P0, P-1) from an ESR dip spectrum: read each line by quadratic "
        "interpolation, correct the crosstalk of overlapping tails and normalize. "
        'Example: {"freq_mhz": [...], "amplitude": [...], "b_field": 30.0}'
    )
    args_schema = EstimatePopulationsSchema

    @staticmethod
    def estimate(args: EstimatePopulationsSchema) -> dict[str, Any]:
        """Blocking part of the tool."""
        centers = args.expected_lines or esr_line_frequencies(SpinSystem(b_field=args.b_field))
        spectrum = SpectrumTrace(
            frequencies=args.freq_mhz,
            amplitudes=args.amplitude,
            metadata=SpectrumMetadata(
                kind=SpectrumKind.ESR,
                linewidth=args.linewidth,
                contrast=args.contrast,
                baseline=args.baseline,
                lineshape=args.lineshape,
                line_centers=tuple(centers),
            ),
        )
        fractions = estimate_populations(spectrum)
        return {"line_centers_mhz": list(centers), "fractions": list(fractions)}

    async def _run_impl(self, arguments: dict[str, Any]) -> list[TextContent]:
        """Execute the tool."""
        args = self.parse_arguments(arguments, EstimatePopulationsSchema)
        return self.render(await self.offload(self.estimate, args))
