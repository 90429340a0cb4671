"""Level structure tools."""

from typing import Any

from mcp.types import TextContent
from pydantic import BaseModel, Field

from nvpump.spin.system import (
    Channel,
    SpinSystem,
    channel_transitions,
    esr_line_frequencies,
    transition_frequency,
)
from nvpump.tools.base import CachedTool


class TransitionFrequenciesSchema(BaseModel):
    """Schema for transition frequency arguments."""

    b_field: float = Field(default=0.0, ge=0.0, description="Axial magnetic field (mT)")
    zero_field_splitting: float = Field(default=2.87, ge=0.0, description="D (GHz)")
    quadrupole: float = Field(default=4.945, ge=0.0, description="Q (MHz)")
    hyperfine: float = Field(default=2.16, ge=0.0, description="A (MHz)")


class TransitionFrequenciesTool(CachedTool):
    """Every mw and rf line of the NV-14N pair at one field.

    Examples:
        - Ensemble field: {"b_field": 30.2}
        - Custom hyperfine: {"b_field": 5.7, "hyperfine": 2.14}
    """

    name = "nvpump_transition_frequencies"
    description = (
        "List the resonance frequencies (MHz) of all mw (m_S changes, m_I kept) and rf "
        "(m_I changes, m_S kept) transitions at a given axial field, plus the three ESR "
        'lines of the |0> <-> |-1> manifold. Example: {"b_field": 30.0}'
    )
    args_schema = TransitionFrequenciesSchema

    async def _run_impl(self, arguments: dict[str, Any]) -> list[TextContent]:
        """Execute the tool."""
        args = self.parse_arguments(arguments, TransitionFrequenciesSchema)
        system = SpinSystem(**args.model_dump())
        lines = {
            channel.value: [
                {"transition": t.label, "frequency_mhz": transition_frequency(system, t)}
                for t in channel_transitions(channel)
            ]
            for channel in Channel
        }
        esr = dict(zip(("m_i=+1", "m_i=0", "m_i=-1"), esr_line_frequencies(system), strict=True))
        return self.render({"b_field_mt": system.b_field, "lines": lines, "esr_lines_mhz": esr})
