"""Nuclear populations from the line amplitudes of a spectrum.

Each line is read at its centre by quadratic interpolation over the three
nearest bins. The readings are then corrected for overlap between lines with
the known single-line response sampled on the same grid, so a spectrum
synthesized by this package is inverted exactly.
"""

from collections.abc import Sequence

import numpy as np
from loguru import logger
from scipy.optimize import least_squares

from nvpump.core.exceptions import ErrorCode, ReadoutError
from nvpump.readout.spectra import SpectrumKind, SpectrumMode, SpectrumTrace, line_profile
from nvpump.spin.state import Fractions


MAX_CONDITION = 1e6


def interpolate_peak(frequencies: np.ndarray, values: np.ndarray, center: float) -> float:
    """Value at ``center`` from the parabola through the three nearest bins."""
    index = int(np.clip(np.argmin(np.abs(frequencies - center)), 1, frequencies.size - 2))
    step = frequencies[index + 1] - frequencies[index]
    x = (center - frequencies[index]) / step
    below, middle, above = values[index - 1], values[index], values[index + 1]
    return float(middle + x * (above - below) / 2 + x**2 * (above - 2 * middle + below) / 2)


def _geometric_sum(ratio: np.ndarray, count: int) -> np.ndarray:
    denominator = 1 - ratio
    near_one = np.abs(denominator) < 1e-12
    safe = np.where(near_one, 1.0, denominator)
    return np.where(near_one, float(count), (1 - ratio**count) / safe)


def tone_response(spectrum: SpectrumTrace, tone: float) -> np.ndarray:
    """Complex, scaled DFT of a unit decaying cosine at ``tone`` on the spectrum's grid."""
    meta = spectrum.metadata
    if meta.dwell is None or meta.n_signal is None:
        raise ReadoutError("FFT spectrum lacks dwell and signal length metadata")
    frequencies = spectrum.frequencies

    def geometric(offset: np.ndarray) -> np.ndarray:
        ratio = meta.decay_per_sample * np.exp(-2j * np.pi * offset * meta.dwell)
        return _geometric_sum(ratio, meta.n_signal)

    response = 0.5 * (geometric(frequencies - tone) + geometric(frequencies + tone))
    if meta.halved_first_point:
        response = response - 0.5
    return meta.scale * response


def line_responses(spectrum: SpectrumTrace, centers: Sequence[float]) -> list[np.ndarray]:
    """Signal of a fully populated line at each centre, sampled like ``spectrum``."""
    meta = spectrum.metadata
    if meta.kind is SpectrumKind.ESR:
        grid = spectrum.frequencies
        return [
            meta.contrast * line_profile(grid, center, meta.linewidth, meta.lineshape)
            for center in centers
        ]
    return [tone_response(spectrum, center) for center in centers]


def _check_lines(spectrum: SpectrumTrace, centers: Sequence[float]) -> None:
    frequencies = spectrum.frequencies
    low, high = float(frequencies[0]), float(frequencies[-1])
    ordered = sorted(centers)
    separation = min(b - a for a, b in zip(ordered, ordered[1:], strict=False))
    diagnostic: dict[str, object] = {
        "line_centers": list(centers),
        "range": [low, high],
        "min_separation": separation,
        "linewidth": spectrum.metadata.linewidth,
        "resolution": spectrum.resolution,
    }
    if frequencies.size < 3:
        raise ReadoutError("spectrum has fewer than 3 points", diagnostic=diagnostic)
    outside = [center for center in centers if not low <= center <= high]
    if outside:
        raise ReadoutError(
            f"lines {outside} lie outside the spectrum range {low:.4g}-{high:.4g} MHz",
            ErrorCode.LINES_UNRESOLVED,
            diagnostic,
        )
    if separation <= spectrum.metadata.linewidth or separation <= 2 * spectrum.resolution:
        raise ReadoutError(
            f"lines {separation:.4g} MHz apart are not resolved "
            f"(linewidth {spectrum.metadata.linewidth:.4g} MHz, "
            f"bin {spectrum.resolution:.4g} MHz)",
            ErrorCode.LINES_UNRESOLVED,
            diagnostic,
        )


def _normalize(raw: np.ndarray, diagnostic: dict[str, object]) -> Fractions:
    clipped = np.clip(raw, 0.0, None)
    total = float(clipped.sum())
    if total <= 0.0:
        raise ReadoutError(
            "spectrum shows no line content at the expected frequencies",
            diagnostic={**diagnostic, "raw": raw.tolist()},
        )
    normalized = clipped / total
    return float(normalized[0]), float(normalized[1]), float(normalized[2])


def estimate_populations(
    spectrum: SpectrumTrace, expected_lines: Sequence[float] | None = None
) -> Fractions:
    """Estimate (P+1, P0, P-1) from line amplitudes.

    Args:
        spectrum: ESR or Ramsey-FFT spectrum.
        expected_lines: Centres of the m_I = +1, 0, -1 lines (MHz). Defaults to
            the centres recorded in the spectrum metadata.

    Raises:
        ReadoutError: If a line is out of range, lines overlap, or the
            crosstalk correction is ill-conditioned.
    """
    centers = list(expected_lines if expected_lines is not None else spectrum.metadata.line_centers)
    if len(centers) != 3:
        raise ReadoutError(f"expected 3 line centres, got {centers}")
    _check_lines(spectrum, centers)

    frequencies = spectrum.frequencies
    readings = np.array(
        [interpolate_peak(frequencies, spectrum.signal, center) for center in centers]
    )
    responses = line_responses(spectrum, centers)
    magnitude = (
        spectrum.metadata.kind is SpectrumKind.RAMSEY_FFT
        and spectrum.metadata.mode is SpectrumMode.MAGNITUDE
    )

    def sampled(values: np.ndarray) -> np.ndarray:
        return np.array([interpolate_peak(frequencies, values, center) for center in centers])

    linear_part = np.abs if magnitude else np.real
    matrix = np.column_stack([sampled(linear_part(response)) for response in responses])
    condition = float(np.linalg.cond(matrix))
    diagnostic: dict[str, object] = {"readings": readings.tolist(), "condition": condition}
    if not np.isfinite(condition) or condition > MAX_CONDITION:
        raise ReadoutError(
            f"line crosstalk matrix is ill-conditioned (condition number {condition:.3g})",
            ErrorCode.LINES_UNRESOLVED,
            diagnostic,
        )
    raw = np.linalg.solve(matrix, readings)

    if magnitude:
        stacked = np.stack(responses)

        def residual(weights: np.ndarray) -> np.ndarray:
            return sampled(np.abs(weights @ stacked)) - readings

        start = np.clip(raw, 1e-6, None)
        raw = least_squares(residual, start, bounds=(0.0, np.inf)).x

    fractions = _normalize(raw, diagnostic)
    logger.debug(f"estimated populations {fractions} from readings {readings.tolist()}")
    return fractions
