"""Tests for tool documentation quality."""

import pytest

from nvpump.registry import discover_tools


TOOLS = discover_tools()


class TestToolDocumentation:
    """Test that tools have proper documentation."""

    @pytest.mark.parametrize("tool", TOOLS, ids=lambda tool: tool.name)
    def test_description_has_example(self, tool):
        """Test every description ends with a usage example."""
        assert "example" in tool.description.lower()

    @pytest.mark.parametrize("tool", TOOLS, ids=lambda tool: tool.name)
    def test_description_is_detailed(self, tool):
        """Test descriptions say more than the name."""
        assert len(tool.description) > 80

    @pytest.mark.parametrize("tool", TOOLS, ids=lambda tool: tool.name)
    def test_schema_fields_are_described(self, tool):
        """Test every argument carries a description for the client."""
        properties = tool.get_definition().inputSchema.get("properties", {})
        for field_name, field_schema in properties.items():
            assert "description" in field_schema, f"{tool.name}.{field_name} lacks a description"

    @pytest.mark.parametrize("tool", TOOLS, ids=lambda tool: tool.name)
    def test_class_docstring(self, tool):
        """Test each tool class documents itself."""
        assert type(tool).__doc__

    def test_run_preset_mentions_read_only(self):
        """Test the writing tool says it is blocked in read-only mode."""
        tool = next(tool for tool in TOOLS if tool.name == "nvpump_run_preset")
        assert "read-only" in (type(tool).__doc__ or "")
