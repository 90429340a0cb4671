"""Result files: CSV tables, JSON mirrors and the run manifest."""

import csv
import io
import json
from collections.abc import Sequence
from pathlib import Path
from typing import Any

import arrow
from loguru import logger
from tenacity import retry, retry_if_exception_type, stop_after_attempt, wait_exponential

from nvpump import __version__
from nvpump.core.exceptions import OutputError
from nvpump.core.settings import settings
from nvpump.readout.spectra import SpectrumTrace


TOOL_NAME = "nvpump"
SPECTRUM_COLUMNS = ("freq_mhz", "amplitude")

Row = Sequence[float | int | str | None]


def format_value(value: float | int | str | None) -> str:
    """Cell text; floats keep 12 significant digits so re-runs are byte-identical."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


@retry(
    stop=stop_after_attempt(3),
    wait=wait_exponential(multiplier=0.1, min=0.1, max=1),
    reraise=True,
    retry=retry_if_exception_type(OSError),  # Transient filesystem errors only
)
def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def write_text(path: Path, text: str) -> Path:
    """Write ``text`` to ``path``, creating parent directories.

    Raises:
        OutputError: If the file still cannot be written after retries.
    """
    try:
        _write(path, text)
    except OSError as exc:
        logger.error(f"Failed to write {path}: {exc}")
        raise OutputError(str(path), exc.strerror or str(exc)) from exc
    logger.debug(f"Wrote {path}")
    return path


def table_text(columns: Sequence[str], rows: Sequence[Row]) -> str:
    """CSV text with a header row."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(value) for value in row])
    return buffer.getvalue()


def write_table(
    path: Path,
    columns: Sequence[str],
    rows: Sequence[Row],
    metadata: dict[str, Any] | None = None,
    write_json: bool = True,
) -> list[Path]:
    """Write ``rows`` as CSV and, optionally, a JSON mirror next to it."""
    written = [write_text(path, table_text(columns, rows))]
    if write_json:
        payload = {
            "metadata": metadata or {},
            "columns": list(columns),
            "rows": [dict(zip(columns, row, strict=True)) for row in rows],
        }
        written.append(write_text(path.with_suffix(".json"), json_text(payload)))
    return written


def json_text(payload: Any) -> str:
    """Indented JSON with a trailing newline."""
    return json.dumps(payload, indent=2) + "\n"


def write_spectrum(path: Path, spectrum: SpectrumTrace, write_json: bool = True) -> list[Path]:
    """Two-column ``freq_mhz,amplitude`` CSV plus a JSON mirror with metadata."""
    written = [write_text(path, table_text(SPECTRUM_COLUMNS, spectrum.rows()))]
    if write_json:
        written.append(write_text(path.with_suffix(".json"), json_text(spectrum.to_dict())))
    return written


def build_manifest(
    config: dict[str, Any],
    files: Sequence[Path],
    directory: Path,
    started: arrow.Arrow,
    extra: dict[str, Any] | None = None,
) -> dict[str, Any]:
    """Everything needed to reproduce a run."""
    finished = arrow.utcnow()
    return {
        "tool": TOOL_NAME,
        "version": __version__,
        "config_name": config.get("name"),
        "seed": config.get("seed"),
        "config": config,
        "settings": {
            "selectivity_threshold": settings.selectivity_threshold,
            "trace_drift_tolerance": settings.trace_drift_tolerance,
            "min_line_separation_mhz": settings.min_line_separation_mhz,
            "workers": settings.workers,
        },
        "files": sorted(str(path.relative_to(directory)) for path in files),
        "started": started.isoformat(),
        "duration_s": (finished - started).total_seconds(),
        **(extra or {}),
    }


def write_manifest(directory: Path, manifest: dict[str, Any]) -> Path:
    """Write ``manifest.json`` into ``directory``."""
    return write_text(directory / "manifest.json", json_text(manifest))
