"""Tests for tool registry and auto-discovery."""

from nvpump.registry import create_tool_registry, discover_tools
from nvpump.tools.base import SimulatorTool


EXPECTED_TOOLS = {
    "nvpump_toy_series",
    "nvpump_toy_limit",
    "nvpump_toy_monte_carlo",
    "nvpump_transition_frequencies",
    "nvpump_run_protocol",
    "nvpump_parse_program",
    "nvpump_format_program",
    "nvpump_synthesize_esr",
    "nvpump_estimate_populations",
    "nvpump_list_presets",
    "nvpump_run_preset",
}


class TestToolDiscovery:
    """Test auto-discovery of tools."""

    def test_discover_tools_finds_all_tools(self):
        """Test that discover_tools finds every tool module's tools."""
        tools = discover_tools()

        assert all(isinstance(tool, SimulatorTool) for tool in tools)
        assert {tool.name for tool in tools} == EXPECTED_TOOLS

    def test_discover_tools_no_duplicates(self):
        """Test that discover_tools doesn't create duplicate tools."""
        names = [tool.name for tool in discover_tools()]
        assert len(names) == len(set(names)), f"Found duplicate tools: {names}"

    def test_discover_tools_skips_base_classes(self):
        """Test abstract bases are never instantiated."""
        classes = {type(tool).__name__ for tool in discover_tools()}
        assert not classes & {"SimulatorTool", "CachedTool", "MutatingTool"}

    def test_discover_tools_all_have_required_attributes(self):
        """Test that all discovered tools have required attributes."""
        for tool in discover_tools():
            assert tool.name.startswith("nvpump_")
            assert tool.description
            assert tool.args_schema is not None
            assert isinstance(tool.is_mutation, bool)


class TestToolRegistry:
    """Test tool registry functionality."""

    def test_tools_map_keys_match_tool_names(self):
        """Test that tools_map keys match the actual tool names."""
        tools_list, tools_map = create_tool_registry()

        assert len(tools_map) == len(tools_list)
        for key, tool in tools_map.items():
            assert key == tool.name
            assert tool in tools_list

    def test_only_run_preset_mutates(self):
        """Test that writing files is limited to the preset runner."""
        _, tools_map = create_tool_registry()
        mutating = {name for name, tool in tools_map.items() if tool.is_mutation}
        assert mutating == {"nvpump_run_preset"}
