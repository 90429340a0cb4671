"""Program text tools."""

from typing import Any

from mcp.types import TextContent
from pydantic import BaseModel, Field

from nvpump.seqlang.formatter import format_program
from nvpump.seqlang.parser import parse_program
from nvpump.tools.base import CachedTool


class ProgramTextSchema(BaseModel):
    """Schema for program text arguments."""

    text: str = Field(description="Program text, one statement per line")


class ParseProgramTool(CachedTool):
    """Parse program text and describe its structure.

    Examples:
        - {"text": "repeat 3 {\\n mw (0,-1) -> (-1,-1) 1pi\\n laser 250ns\\n}"}
    """

    name = "nvpump_parse_program"
    description = (
        "Parse a pulse program (mw/rf pulses, laser, repeat N { ... }, readout markers) and "
        "return instruction counts, order and driven transitions. Syntax and semantic "
        "errors report line and column. "
        'Example: {"text": "mw (0,+1) -> (-1,+1) 1pi\\nlaser 0.25us"}'
    )
    args_schema = ProgramTextSchema

    async def _run_impl(self, arguments: dict[str, Any]) -> list[TextContent]:
        """Execute the tool."""
        args = self.parse_arguments(arguments, ProgramTextSchema)
        return self.render(parse_program(args.text).summary())


class FormatProgramTool(CachedTool):
    """Canonical text of a program."""

    name = "nvpump_format_program"
    description = (
        "Parse a pulse program and print it in canonical form (one statement per line, "
        "angles in units of pi, four-space indentation inside repeat blocks). "
        'Example: {"text": "mw (0,-1)->(-1,-1) 3.14159265rad"}'
    )
    args_schema = ProgramTextSchema

    async def _run_impl(self, arguments: dict[str, Any]) -> list[TextContent]:
        """Execute the tool."""
        args = self.parse_arguments(arguments, ProgramTextSchema)
        return self.render(format_program(parse_program(args.text)))
