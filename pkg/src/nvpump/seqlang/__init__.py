"""Program text: parse and format ``.seq`` files."""

from nvpump.seqlang.formatter import format_angle, format_instruction, format_program
from nvpump.seqlang.parser import get_parser, parse_file, parse_program


__all__ = [
    "format_angle",
    "format_instruction",
    "format_program",
    "get_parser",
    "parse_file",
    "parse_program",
]
