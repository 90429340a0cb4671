"""nvpump MCP server wiring.

This module builds the MCP server and registers all handlers. For the command
line, see nvpump.cli.
"""

from typing import Any

from mcp.server import Server
from mcp.types import Resource, ResourceTemplate, TextContent, Tool
from pydantic import AnyUrl

from nvpump.handlers import MCPHandlers
from nvpump.registry import create_tool_registry
from nvpump.resources import SimulatorResources


SERVER_NAME = "nvpump"

app_mcp = Server(SERVER_NAME)

simulator_resources = SimulatorResources()

tools_list, tools_map = create_tool_registry()

mcp_handlers = MCPHandlers(simulator_resources, tools_list, tools_map)


@app_mcp.list_resources()  # type: ignore
async def list_resources() -> list[Resource]:
    """List available resources."""
    return await mcp_handlers.list_resources()


@app_mcp.list_resource_templates()  # type: ignore
async def list_resource_templates() -> list[ResourceTemplate]:
    """List available resource templates."""
    return await mcp_handlers.list_resource_templates()


@app_mcp.read_resource()  # type: ignore
async def read_resource(uri: AnyUrl) -> str | bytes:
    """Read a resource."""
    return await mcp_handlers.read_resource(uri)


@app_mcp.list_tools()  # type: ignore
async def list_tools() -> list[Tool]:
    """List all simulator tools."""
    return await mcp_handlers.list_tools()


@app_mcp.call_tool()  # type: ignore
async def call_tool(name: str, arguments: Any) -> list[TextContent]:
    """Handle tool calls."""
    return await mcp_handlers.call_tool(name, arguments)


if __name__ == "__main__":
    from nvpump.cli import cli

    cli()
