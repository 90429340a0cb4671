import json
from typing import Any

import pytest
from pydantic import BaseModel, Field

from nvpump.core.exceptions import ErrorCode, ReadoutError
from nvpump.tools.base import SimulatorTool


class SchemaForTest(BaseModel):
    b_field: float = Field(ge=0.0, description="Axial magnetic field (mT)")


class ToolForTest(SimulatorTool):
    name = "test_tool"
    description = "A test tool"
    args_schema = SchemaForTest

    async def _run_impl(self, arguments: dict[str, Any]):
        args = self.parse_arguments(arguments, SchemaForTest)
        if args.b_field > 1000:
            raise ReadoutError("field too high", ErrorCode.LINES_UNRESOLVED)
        return self.render({"b_field": args.b_field})


@pytest.mark.asyncio
async def test_simulator_tool_definition():
    definition = ToolForTest().get_definition()
    assert definition.name == "test_tool"
    assert definition.description == "A test tool"
    assert "b_field" in definition.inputSchema["properties"]


@pytest.mark.parametrize(
    "name, inputs, expected_output_contains, expected_error",
    [
        ("Success", {"b_field": 30.0}, '"b_field": 30.0', None),
        ("Invalid argument", {"b_field": -1}, "b_field", "invalid arguments for test_tool"),
        ("Missing argument", {}, "b_field", "invalid arguments for test_tool"),
        ("Domain failure", {"b_field": 5000}, "field too high", "Error executing test_tool"),
    ],
)
@pytest.mark.asyncio
async def test_simulator_tool_execution(name, inputs, expected_output_contains, expected_error):
    """Table-driven test for SimulatorTool execution."""
    result = await ToolForTest().run(inputs)

    assert len(result) == 1
    text = result[0].text
    assert expected_output_contains in text
    if expected_error:
        assert expected_error in text
    else:
        assert json.loads(text) == {"b_field": 30.0}


@pytest.mark.asyncio
async def test_error_text_carries_hint():
    result = await ToolForTest().run({"b_field": 5000})
    assert "Hint:" in result[0].text


def test_render_plain_text():
    assert SimulatorTool.render("mw (0,+1) -> (-1,+1) 1.0pi\n")[0].text.startswith("mw")


@pytest.mark.asyncio
async def test_offload_runs_function():
    assert await SimulatorTool.offload(sum, [1, 2, 3]) == 6
