"""Spin-1/2 pumping model tools."""

from typing import Any

from mcp.types import TextContent
from pydantic import BaseModel, Field

from nvpump.core.exceptions import NVPumpError
from nvpump.protocol.builders import PaMapping, rf_angle_for
from nvpump.tools.base import CachedTool
from nvpump.toymodel import (
    ToyModelParams,
    closed_form_depleted,
    cycles_to_converge,
    iterate_populations,
    limit_population,
    monte_carlo_oracle,
    steady_state_depleted,
)


MAX_TRIALS = 5_000_000


class ToySeriesSchema(BaseModel):
    """Schema for toy series arguments."""

    p_a: float = Field(ge=0.0, le=1.0, description="rf flip probability per cycle")
    p_b: float = Field(ge=0.0, le=1.0, description="Optical flip probability per cycle")
    n: int = Field(default=10, ge=0, le=10_000, description="Number of cycles")
    p_minus_0: float = Field(default=0.5, ge=0.0, le=1.0, description="Initial depleted population")


class ToySeriesTool(CachedTool):
    """Depleted and target populations after 0..n pumping cycles.

    Examples:
        - Strong rf, weak optics: {"p_a": 1.0, "p_b": 0.01, "n": 5}
        - Half-angle rf: {"p_a": 0.5, "p_b": 0.2, "n": 10, "p_minus_0": 0.6667}
    """

    name = "nvpump_toy_series"
    description = (
        "Iterate the spin-1/2 pumping recursion P(k+1) = P(k)(1-p_a)(1-2p_b) + p_b. "
        "Returns per-cycle depleted and target populations and the closed form at n. "
        'Example: {"p_a": 1.0, "p_b": 0.01, "n": 5}'
    )
    args_schema = ToySeriesSchema

    async def _run_impl(self, arguments: dict[str, Any]) -> list[TextContent]:
        """Execute the tool."""
        args = self.parse_arguments(arguments, ToySeriesSchema)
        params = ToyModelParams(p_a=args.p_a, p_b=args.p_b, p_minus_0=args.p_minus_0)
        depleted = iterate_populations(params, args.n)
        return self.render(
            {
                "q": params.q,
                "rows": [
                    {"n": k, "depleted": value, "target": 1 - value}
                    for k, value in enumerate(depleted)
                ],
                "closed_form_depleted": closed_form_depleted(params, args.n),
            }
        )


class ToyLimitSchema(BaseModel):
    """Schema for toy limit arguments."""

    p_a: float = Field(ge=0.0, le=1.0, description="rf flip probability per cycle")
    p_b: float = Field(ge=0.0, le=1.0, description="Optical flip probability per cycle")
    p_minus_0: float = Field(default=0.5, ge=0.0, le=1.0, description="Initial depleted population")
    tolerance: float = Field(default=1e-3, gt=0.0, description="Convergence tolerance")


class ToyLimitTool(CachedTool):
    """Asymptotic target population and how fast it is reached."""

    name = "nvpump_toy_limit"
    description = (
        "Limit target population 1 - p_b/(p_a + 2 p_b (1 - p_a)) of the spin-1/2 model, "
        "the matching rf angles and the number of cycles to converge. "
        'Example: {"p_a": 0.5, "p_b": 0.2}'
    )
    args_schema = ToyLimitSchema

    async def _run_impl(self, arguments: dict[str, Any]) -> list[TextContent]:
        """Execute the tool."""
        args = self.parse_arguments(arguments, ToyLimitSchema)
        params = ToyModelParams(p_a=args.p_a, p_b=args.p_b, p_minus_0=args.p_minus_0)
        limit = limit_population(args.p_a, args.p_b)
        try:
            cycles: int | None = cycles_to_converge(params, args.tolerance)
        except NVPumpError:
            cycles = None
        return self.render(
            {
                "p0_limit": limit,
                "depleted_limit": steady_state_depleted(args.p_a, args.p_b),
                "cycles_to_converge": cycles,
                "rf_angle_rad": {
                    mapping.value: rf_angle_for(args.p_a, mapping) for mapping in PaMapping
                },
            }
        )


class ToyMonteCarloSchema(BaseModel):
    """Schema for Monte Carlo arguments."""

    p_a: float = Field(ge=0.0, le=1.0, description="rf flip probability per cycle")
    p_b: float = Field(ge=0.0, le=1.0, description="Optical flip probability per cycle")
    n: int = Field(default=10, ge=0, le=1_000, description="Number of cycles")
    p_minus_0: float = Field(default=0.5, ge=0.0, le=1.0, description="Initial depleted population")
    trials: int = Field(default=100_000, ge=1, le=MAX_TRIALS, description="Simulated spins")
    seed: int = Field(default=0, ge=0, description="Seed; equal seeds give equal results")


class ToyMonteCarloTool(CachedTool):
    """Stochastic estimate of the depleted population next to the recursion."""

    name = "nvpump_toy_monte_carlo"
    description = (
        "Simulate independent spin-1/2 nuclei through n pumping cycles and compare the "
        "depleted fraction with the recursion. Deterministic in the seed. "
        'Example: {"p_a": 0.5, "p_b": 0.2, "n": 10, "trials": 100000, "seed": 1}'
    )
    args_schema = ToyMonteCarloSchema

    async def _run_impl(self, arguments: dict[str, Any]) -> list[TextContent]:
        """Execute the tool."""
        args = self.parse_arguments(arguments, ToyMonteCarloSchema)
        params = ToyModelParams(p_a=args.p_a, p_b=args.p_b, p_minus_0=args.p_minus_0)
        estimate = await self.offload(monte_carlo_oracle, params, args.n, args.trials, args.seed)
        exact = iterate_populations(params, args.n)[-1]
        return self.render(
            {
                **estimate.model_dump(),
                "recursion": exact,
                "deviation_in_stderr": (
                    abs(estimate.estimate - exact) / estimate.standard_error
                    if estimate.standard_error > 0
                    else None
                ),
            }
        )
