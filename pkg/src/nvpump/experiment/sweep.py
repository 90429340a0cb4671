"""Cartesian parameter sweeps evaluated on a worker pool."""

from pathlib import Path

import anyio
import arrow
from loguru import logger
from pydantic import BaseModel, ConfigDict, ValidationError

from nvpump.core.exceptions import ConfigurationError, ErrorCode, NVPumpError
from nvpump.core.settings import settings
from nvpump.experiment.config import ExperimentConfig, SweepAxis
from nvpump.experiment.output import (
    build_manifest,
    write_manifest,
    write_spectrum,
    write_table,
)
from nvpump.experiment.runner import PointResult, RunResult, evaluate_point, output_directory


RESULT_COLUMNS = (
    "n",
    "p_a",
    "p_b",
    "p0_lim",
    "toy_p0",
    "p_plus1",
    "p_0",
    "p_minus1",
    "est_p_0",
)


class SweepTable(BaseModel):
    """Long-format sweep result, one row per point in axis order."""

    model_config = ConfigDict(frozen=True)

    columns: list[str]
    rows: list[list[float | int | None]]

    def column(self, name: str) -> list[float | int | None]:
        """Values of one column."""
        index = self.columns.index(name)
        return [row[index] for row in self.rows]


def point_configs(
    config: ExperimentConfig,
) -> list[tuple[dict[SweepAxis, float], ExperimentConfig]]:
    """Every grid point with its resolved config, validated before anything runs.

    Raises:
        ConfigurationError: If the config has no sweep or a point is invalid.
    """
    if config.sweep is None:
        raise ConfigurationError("config has no sweep section", ErrorCode.EMPTY_SWEEP_AXIS)
    config.sweep.check_axes()
    resolved = []
    for point in config.sweep.grid():
        try:
            resolved.append((point, config.with_point(point)))
        except (ValidationError, NVPumpError) as exc:
            values = {axis.value: value for axis, value in point.items()}
            raise ConfigurationError(f"sweep point {values} is invalid: {exc}") from exc
    return resolved


def _row(
    point: dict[SweepAxis, float], config: ExperimentConfig, result: PointResult
) -> list[float | int | None]:
    final = result.final
    toy = result.toy_target[-1] if result.toy_target is not None else None
    estimate = result.estimates.get("final")
    return [
        *point.values(),
        config.protocol.cycles,
        result.p_a,
        result.p_b,
        result.p0_limit,
        toy,
        *final,
        estimate[1] if estimate is not None else None,
    ]


async def evaluate_grid(
    config: ExperimentConfig,
) -> list[tuple[dict[SweepAxis, float], ExperimentConfig, PointResult]]:
    """Evaluate every grid point with up to ``settings.workers`` points in flight.

    Results come back in grid order whatever order the points finish in. The
    first failing point (in grid order) is re-raised.
    """
    resolved = point_configs(config)
    results: list[PointResult | None] = [None] * len(resolved)
    errors: list[BaseException | None] = [None] * len(resolved)
    limiter = anyio.CapacityLimiter(settings.workers)

    async def evaluate(index: int, point_config: ExperimentConfig) -> None:
        try:
            results[index] = await anyio.to_thread.run_sync(
                evaluate_point, point_config, limiter=limiter
            )
        except NVPumpError as exc:
            errors[index] = exc
        except Exception as exc:
            # Unexpected failures become per-point errors as well.
            values = {axis.value: value for axis, value in resolved[index][0].items()}
            logger.opt(exception=exc).error(f"sweep point {values} crashed")
            error = NVPumpError(f"sweep point {values} failed: {exc}", ErrorCode.INTERNAL_ERROR)
            error.__cause__ = exc
            errors[index] = error

    async with anyio.create_task_group() as group:
        for index, (_point, point_config) in enumerate(resolved):
            group.start_soon(evaluate, index, point_config)

    for error in errors:
        if error is not None:
            raise error

    return [
        (point, point_config, result)
        for (point, point_config), result in zip(resolved, results, strict=True)
        if result is not None
    ]


def sweep_table(
    evaluated: list[tuple[dict[SweepAxis, float], ExperimentConfig, PointResult]],
) -> SweepTable:
    """Long-format table of evaluated points; axis columns come first."""
    columns = [axis.value for axis in evaluated[0][0]] + list(RESULT_COLUMNS)
    rows = [_row(point, point_config, result) for point, point_config, result in evaluated]
    return SweepTable(columns=columns, rows=rows)


async def sweep_async(config: ExperimentConfig) -> SweepTable:
    """Evaluate the sweep grid and tabulate it."""
    return sweep_table(await evaluate_grid(config))


def sweep(config: ExperimentConfig) -> SweepTable:
    """Blocking form of :func:`sweep_async`."""
    return anyio.run(sweep_async, config)


def run_sweep(config: ExperimentConfig, output_dir: Path | None = None) -> RunResult:
    """Run a sweep and write ``sweep.csv`` (plus JSON) and the manifest."""
    started = arrow.utcnow()
    points = len(point_configs(config))
    logger.info(f"Sweeping '{config.name}': {points} points on {settings.workers} workers")
    evaluated = anyio.run(evaluate_grid, config)
    table = sweep_table(evaluated)
    directory = output_directory(config, output_dir)
    files = write_table(
        directory / "sweep.csv",
        table.columns,
        table.rows,
        {"config_name": config.name, "points": len(table.rows)},
        config.output.write_json,
    )
    if config.output.sweep_spectra:
        for index, (_point, _config, result) in enumerate(evaluated):
            for key, spectrum in result.spectra.items():
                path = directory / f"spectrum_{index:03d}_{key}.csv"
                files += write_spectrum(path, spectrum, config.output.write_json)
    manifest = build_manifest(config.model_dump(mode="json"), files, directory, started)
    files.append(write_manifest(directory, manifest))
    elapsed = (arrow.utcnow() - started).total_seconds()
    logger.info(f"Finished sweep '{config.name}' in {elapsed:.2f}s, {len(table.rows)} rows")
    return RunResult(directory=directory, files=files, manifest=manifest)
