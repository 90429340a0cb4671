"""MCP resources: preset configurations and canonical programs."""

from mcp.types import Resource, ResourceTemplate
from pydantic import AnyUrl

from nvpump.core.exceptions import ConfigurationError, ErrorCode
from nvpump.experiment.presets import preset_names, preset_text
from nvpump.protocol.builders import build_pt_program, build_se_program
from nvpump.protocol.program import ProtocolProgram
from nvpump.seqlang.formatter import format_program
from nvpump.spin.system import SpinSystem


SCHEME = "nvpump"
CANONICAL_FIELD_MT = 30.0
PROGRAM_BUILDERS = {"se": build_se_program, "pt": build_pt_program}


def canonical_program(kind: str) -> ProtocolProgram:
    """Default SE or PT program at the canonical field.

    Raises:
        ConfigurationError: FILE_NOT_FOUND for an unknown kind.
    """
    builder = PROGRAM_BUILDERS.get(kind)
    if builder is None:
        raise ConfigurationError(f"unknown program '{kind}'", ErrorCode.FILE_NOT_FOUND)
    return builder(SpinSystem(b_field=CANONICAL_FIELD_MT))


class SimulatorResources:
    """Read-only resources of the simulator."""

    async def list_resources(self) -> list[Resource]:
        """Every preset and canonical program as a concrete resource."""
        presets = [
            Resource(
                uri=AnyUrl(f"{SCHEME}://presets/{name}"),
                name=f"Preset {name}",
                description=f"Experiment configuration '{name}' (YAML)",
                mimeType="application/yaml",
            )
            for name in preset_names()
        ]
        programs = [
            Resource(
                uri=AnyUrl(f"{SCHEME}://programs/{kind}"),
                name=f"{kind.upper()} program",
                description=f"Canonical {kind.upper()} program text at {CANONICAL_FIELD_MT:g} mT",
                mimeType="text/plain",
            )
            for kind in PROGRAM_BUILDERS
        ]
        return presets + programs

    async def list_resource_templates(self) -> list[ResourceTemplate]:
        """URI templates of the resources."""
        return [
            ResourceTemplate(
                uriTemplate=f"{SCHEME}://presets/{{name}}",
                name="Preset",
                description="Shipped experiment configuration (YAML)",
                mimeType="application/yaml",
            ),
            ResourceTemplate(
                uriTemplate=f"{SCHEME}://programs/{{kind}}",
                name="Canonical program",
                description="Program text of the default SE or PT builder (kind: se, pt)",
                mimeType="text/plain",
            ),
        ]

    async def read_resource(self, uri: AnyUrl) -> str:
        """Read a resource.

        Supported URIs:
        - nvpump://presets/<name>
        - nvpump://programs/<se|pt>

        Raises:
            ValueError: For another scheme or an unknown collection.
            ConfigurationError: For an unknown preset or program.
        """
        if uri.scheme != SCHEME:
            raise ValueError(f"Unsupported scheme: {uri.scheme}")

        collection = uri.host or ""
        item = (uri.path or "").strip("/")
        if collection == "presets":
            return preset_text(item)
        if collection == "programs":
            return format_program(canonical_program(item))
        raise ValueError(f"Unknown resource type: {collection}")
