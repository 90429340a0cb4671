"""Shipped preset tools."""

from pathlib import Path
from typing import Any

from mcp.types import TextContent
from pydantic import BaseModel, Field

from nvpump.experiment.presets import list_presets, load_preset, run_config
from nvpump.tools.base import CachedTool, MutatingTool


class ListPresetsSchema(BaseModel):
    """Schema for list presets arguments (none)."""


class ListPresetsTool(CachedTool):
    """Names and descriptions of the shipped experiment presets."""

    name = "nvpump_list_presets"
    description = (
        "List the shipped experiment presets (SE and PT spectra, recursive PT with "
        "Ramsey readout, p_a and p2 sweeps) with a one-line description each. "
        "Example: {}"
    )
    args_schema = ListPresetsSchema

    async def _run_impl(self, arguments: dict[str, Any]) -> list[TextContent]:
        """Execute the tool."""
        self.parse_arguments(arguments, ListPresetsSchema)
        presets = await self.offload(list_presets)
        return self.render([preset.model_dump() for preset in presets])


class RunPresetSchema(BaseModel):
    """Schema for run preset arguments."""

    name: str = Field(description="Preset name, see nvpump_list_presets")
    output_dir: str | None = Field(
        default=None, description="Output directory; defaults to <output_dir>/<preset name>"
    )


class RunPresetTool(MutatingTool):
    """Run a preset and write its tables, spectra and manifest.

    Writes files, so it is blocked in read-only mode.

    Examples:
        - {"name": "fig1c"}
        - {"name": "fig4d", "output_dir": "/tmp/fig4d"}
    """

    name = "nvpump_run_preset"
    description = (
        "Run a shipped preset (single run or sweep) and write CSV/JSON results plus a "
        "manifest.json. Returns the output directory, the written files and the final "
        'nuclear fractions. Example: {"name": "fig2c_ii"}'
    )
    args_schema = RunPresetSchema

    @staticmethod
    def execute(args: RunPresetSchema) -> dict[str, Any]:
        """Blocking part of the tool."""
        config = load_preset(args.name)
        output_dir = Path(args.output_dir).expanduser() if args.output_dir else None
        result = run_config(config, output_dir)
        payload: dict[str, Any] = {
            "preset": args.name,
            "directory": str(result.directory),
            "files": [str(path) for path in result.files],
        }
        if result.point is not None:
            payload["final_fractions"] = list(result.point.final)
            payload["estimates"] = {
                key: list(value) for key, value in result.point.estimates.items()
            }
            payload["warnings"] = result.point.warnings
        return payload

    async def _run_impl(self, arguments: dict[str, Any]) -> list[TextContent]:
        """Execute the tool."""
        args = self.parse_arguments(arguments, RunPresetSchema)
        return self.render(await self.offload(self.execute, args))
