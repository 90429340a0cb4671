"""Command line interface for nvpump."""

import asyncio
import contextlib
import json
import math
import signal
import sys
from collections.abc import Iterator
from pathlib import Path
from typing import TYPE_CHECKING

import anyio
import typer
import uvloop
from loguru import logger
from mcp.server.stdio import stdio_server

from nvpump import __version__
from nvpump.core.exceptions import NVPumpError
from nvpump.core.settings import settings
from nvpump.experiment.config import load_config
from nvpump.experiment.output import format_value, table_text, write_text
from nvpump.experiment.presets import list_presets, load_preset, preset_text, run_config
from nvpump.experiment.runner import RunResult
from nvpump.experiment.sweep import run_sweep
from nvpump.protocol.builders import PaMapping, flip_probability_for
from nvpump.seqlang.formatter import format_program
from nvpump.seqlang.parser import parse_file
from nvpump.toymodel import (
    ToyModelParams,
    closed_form_depleted,
    iterate_populations,
    limit_population,
    monte_carlo_oracle,
)


if TYPE_CHECKING:
    from mcp.server import Server


EXIT_RUNTIME = 1
EXIT_VALIDATION = 2


def version_callback(value: bool) -> None:
    """Show version and exit.

    Args:
        value: True if version flag was provided.
    """
    if value:
        typer.echo(f"nvpump {__version__}")
        raise typer.Exit()


def configure_logging() -> None:
    """Route loguru to stderr and, when configured, a rotating JSON run log."""
    logger.remove()
    logger.add(sys.stderr, format=settings.log_format, level=settings.log_level)

    if settings.run_log_path:
        logger.add(
            settings.run_log_path,
            rotation=settings.run_log_rotation,
            retention=settings.run_log_retention,
            level="DEBUG",
            format=(
                "{time:YYYY-MM-DD HH:mm:ss.SSS} | {level} | "
                "{name}:{function}:{line} | {message} | {extra}"
            ),
            serialize=settings.run_log_serialize,
        )


@contextlib.contextmanager
def cli_errors() -> Iterator[None]:
    """Map failures to exit codes: 2 for invalid input, 1 for everything else."""
    try:
        yield
    except NVPumpError as e:
        logger.error(f"{e.code.name}: {e.message}")
        typer.echo(f"Error: {e.get_user_message()}", err=True)
        raise typer.Exit(EXIT_VALIDATION if e.is_validation else EXIT_RUNTIME) from e


def echo_result(result: RunResult) -> None:
    """Short report of what a run wrote."""
    typer.echo(f"Wrote {len(result.files)} files to {result.directory}")
    for path in result.files:
        typer.echo(f"  {path.name}")
    if result.point is not None:
        p_plus, p_zero, p_minus = result.point.final
        typer.echo(f"Final fractions: P+1={p_plus:.6f} P0={p_zero:.6f} P-1={p_minus:.6f}")
        for warning in result.point.warnings:
            typer.echo(f"Warning: {warning}", err=True)


def run_mcp_server(app_mcp: "Server") -> None:
    """Run the MCP server with proper signal handling.

    Args:
        app_mcp: Initialized MCP Server instance.
    """
    shutdown_event = asyncio.Event()

    def signal_handler() -> None:
        logger.info("Received shutdown signal, stopping server...")
        shutdown_event.set()

    async def run_server() -> None:
        loop = asyncio.get_running_loop()
        for sig in (signal.SIGINT, signal.SIGTERM):
            loop.add_signal_handler(sig, signal_handler)

        try:
            async with stdio_server() as (read_stream, write_stream):
                server_task = asyncio.create_task(
                    app_mcp.run(
                        read_stream,
                        write_stream,
                        app_mcp.create_initialization_options(),
                    )
                )
                shutdown_task = asyncio.create_task(shutdown_event.wait())

                _done, pending = await asyncio.wait(
                    [server_task, shutdown_task], return_when=asyncio.FIRST_COMPLETED
                )

                for task in pending:
                    task.cancel()
                    with contextlib.suppress(asyncio.CancelledError):
                        await task

                logger.info("Server stopped")
        finally:
            for sig in (signal.SIGINT, signal.SIGTERM):
                loop.remove_signal_handler(sig)

    try:
        asyncio.run(run_server())
    except KeyboardInterrupt:
        pass
    except BaseException as e:
        # BrokenResourceError is expected while the client hangs up.
        if isinstance(e, anyio.BrokenResourceError):
            pass
        elif hasattr(e, "exceptions"):
            real_errors = [
                exc for exc in e.exceptions if not isinstance(exc, anyio.BrokenResourceError)
            ]
            if real_errors:
                logger.exception(f"Server crashed: {e}")
                sys.exit(EXIT_RUNTIME)
        elif not isinstance(e, (SystemExit, KeyboardInterrupt)):
            logger.exception(f"Server crashed: {e}")
            sys.exit(EXIT_RUNTIME)


cli = typer.Typer(
    help="Dynamic nuclear polarization of the NV-14N pair: runs, sweeps, programs, presets.",
    no_args_is_help=True,
)
presets_app = typer.Typer(help="Shipped experiment presets.", no_args_is_help=True)
cli.add_typer(presets_app, name="presets")


@cli.callback()
def main(
    version: bool = typer.Option(
        False,
        "--version",
        "-V",
        callback=version_callback,
        is_eager=True,
        help="Show version and exit",
    ),
    log_level: str = typer.Option(
        None,
        "--log-level",
        "-l",
        help="Log level (DEBUG, INFO, WARNING, ERROR)",
        envvar="NVPUMP_LOG_LEVEL",
    ),
) -> None:
    """nvpump command line."""
    if log_level:
        try:
            settings.log_level = log_level
        except ValueError as e:
            raise typer.BadParameter(f"unknown log level {log_level!r}") from e
    configure_logging()


@cli.command()
def run(
    config: Path = typer.Argument(..., help="Experiment YAML file"),
    output: Path = typer.Option(None, "--output", "-o", help="Output directory"),
) -> None:
    """Run one experiment (or its sweep, if it has axes) and write the results."""
    with cli_errors():
        echo_result(run_config(load_config(config), output))


@cli.command()
def sweep(
    config: Path = typer.Argument(..., help="Experiment YAML file with a sweep section"),
    output: Path = typer.Option(None, "--output", "-o", help="Output directory"),
    workers: int = typer.Option(None, "--workers", "-w", min=1, help="Parallel sweep points"),
) -> None:
    """Run a parameter sweep and write the long-format table."""
    if workers:
        settings.workers = workers
    with cli_errors():
        echo_result(run_sweep(load_config(config), output))


@cli.command()
def parse(program: Path = typer.Argument(..., help="Program file (.seq)")) -> None:
    """Parse a program file and print its structure."""
    with cli_errors():
        typer.echo(json.dumps(parse_file(program).summary(), indent=2))


@cli.command()
def fmt(
    program: Path = typer.Argument(..., help="Program file (.seq)"),
    write: bool = typer.Option(False, "--write", help="Rewrite the file in place"),
) -> None:
    """Print the canonical text of a program file."""
    with cli_errors():
        text = format_program(parse_file(program))
        if write:
            write_text(program, text)
            logger.info(f"Rewrote {program}")
        else:
            typer.echo(text, nl=False)


@cli.command()
def toy(
    pa: float = typer.Option(None, "--pa", min=0.0, max=1.0, help="rf flip probability p_a"),
    pb: float = typer.Option(..., "--pb", min=0.0, max=1.0, help="Optical flip probability"),
    n: int = typer.Option(10, "--n", min=0, help="Number of cycles"),
    p0: float = typer.Option(0.5, "--p0", min=0.0, max=1.0, help="Initial depleted population"),
    rf_angle_pi: float = typer.Option(
        None, "--rf-angle-pi", min=0.0, max=2.0, help="rf angle / pi instead of --pa"
    ),
    mapping: PaMapping = typer.Option(
        PaMapping.SINE, "--mapping", help="rf angle to p_a mapping (sine or linear)"
    ),
    trials: int = typer.Option(0, "--trials", min=0, help="Monte Carlo trials (0 = none)"),
    seed: int = typer.Option(0, "--seed", min=0, help="Monte Carlo seed"),
) -> None:
    """Spin-1/2 pumping model: per-cycle table, closed form and limit."""
    if (pa is None) == (rf_angle_pi is None):
        raise typer.BadParameter("give exactly one of --pa and --rf-angle-pi")
    with cli_errors():
        p_a = pa if pa is not None else flip_probability_for(rf_angle_pi * math.pi, mapping)
        params = ToyModelParams(p_a=p_a, p_b=pb, p_minus_0=p0)
        depleted = iterate_populations(params, n)
        rows = [
            [k, value, 1 - value, closed_form_depleted(params, k)]
            for k, value in enumerate(depleted)
        ]
        typer.echo(table_text(["n", "depleted", "target", "closed_form"], rows), nl=False)
        typer.echo(f"# p_a = {format_value(p_a)}, q = {format_value(params.q)}")
        with contextlib.suppress(NVPumpError):
            typer.echo(f"# limit target population = {format_value(limit_population(p_a, pb))}")
        if trials:
            estimate = monte_carlo_oracle(params, n, trials, seed)
            typer.echo(
                f"# monte carlo depleted = {format_value(estimate.estimate)} "
                f"+/- {format_value(estimate.standard_error)} ({trials} trials, seed {seed})"
            )


@presets_app.command("list")
def presets_list() -> None:
    """List shipped presets."""
    with cli_errors():
        for preset in list_presets():
            kind = "sweep" if preset.sweep else "run"
            typer.echo(f"{preset.name:<12} {kind:<6} {preset.description}")


@presets_app.command("show")
def presets_show(name: str = typer.Argument(..., help="Preset name")) -> None:
    """Print a preset's YAML."""
    with cli_errors():
        typer.echo(preset_text(name), nl=False)


@presets_app.command("run")
def presets_run(
    name: str = typer.Argument(..., help="Preset name"),
    output: Path = typer.Option(None, "--output", "-o", help="Output directory"),
) -> None:
    """Run a preset and write its results."""
    with cli_errors():
        echo_result(run_config(load_preset(name), output))


@cli.command()
def serve(
    readonly: bool = typer.Option(
        False,
        "--readonly",
        help="Block tools that write files",
        envvar="NVPUMP_READONLY",
    ),
) -> None:
    """Start the MCP server on stdio."""
    settings.readonly = readonly
    from nvpump.server import app_mcp

    uvloop.install()
    logger.info(f"Starting nvpump MCP server (readonly={settings.readonly})")

    if sys.stdin.isatty():
        sys.stderr.write(
            "\nThis server expects JSON-RPC input from an MCP client.\n"
            "    Press Ctrl+C to exit.\n\n"
        )

    run_mcp_server(app_mcp)
