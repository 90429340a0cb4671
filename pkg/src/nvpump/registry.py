"""Tool registry for the MCP server with auto-discovery."""

import importlib
import inspect
import pkgutil
from pathlib import Path

from loguru import logger

from nvpump.tools.base import CachedTool, MutatingTool, SimulatorTool


TOOLS_PACKAGE = "nvpump.tools"
_BASES = (SimulatorTool, CachedTool, MutatingTool)


def discover_tools() -> list[SimulatorTool]:
    """Import every module of the tools package and instantiate its tools.

    Returns:
        Tool instances, in module then class-name order.
    """
    tools_list: list[SimulatorTool] = []
    tools_module = importlib.import_module(TOOLS_PACKAGE)
    tools_path = Path(tools_module.__file__).parent

    for module_info in pkgutil.iter_modules([str(tools_path)]):
        if module_info.name == "base":
            continue

        module_name = f"{TOOLS_PACKAGE}.{module_info.name}"
        try:
            module = importlib.import_module(module_name)
        except Exception as e:
            logger.error(f"Failed to import module {module_name}: {e}")
            continue

        for name, obj in inspect.getmembers(module, inspect.isclass):
            if (
                issubclass(obj, SimulatorTool)
                and obj not in _BASES
                and not inspect.isabstract(obj)
                and obj.__module__ == module_name  # Only from this module
            ):
                try:
                    tool_instance = obj()
                except Exception as e:
                    logger.error(f"Failed to instantiate tool {name} from {module_name}: {e}")
                    continue
                tools_list.append(tool_instance)
                logger.debug(f"Discovered tool: {tool_instance.name}")

    logger.info(f"Discovered {len(tools_list)} tools")
    return tools_list


def create_tool_registry() -> tuple[list[SimulatorTool], dict[str, SimulatorTool]]:
    """Create the tool registry.

    Returns:
        Tuple of (tools_list, tools_map) for easy access.
    """
    tools_list = discover_tools()
    tools_map = {tool.name: tool for tool in tools_list}
    if len(tools_map) != len(tools_list):
        logger.warning("Duplicate tool names found; later definitions win")
    return tools_list, tools_map
