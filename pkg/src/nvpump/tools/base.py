"""Base classes for nvpump MCP tools."""

import json
from abc import ABC, abstractmethod
from collections.abc import Callable
from typing import Any, ClassVar, TypeVar

import anyio
from loguru import logger
from mcp.types import TextContent, Tool
from pydantic import BaseModel, ValidationError

from nvpump.core.cache import get_cache
from nvpump.core.exceptions import ErrorCode, NVPumpError
from nvpump.core.settings import settings
from nvpump.experiment.config import format_validation


SchemaT = TypeVar("SchemaT", bound=BaseModel)
ResultT = TypeVar("ResultT")


class SimulatorTool(ABC):
    """Base class for all nvpump MCP tools."""

    name: ClassVar[str]
    description: ClassVar[str]
    args_schema: ClassVar[type[BaseModel]]
    is_mutation: ClassVar[bool] = False  # True for tools that write files

    def get_definition(self) -> Tool:
        """Get the MCP Tool definition.

        Returns:
            The Tool object.
        """
        return Tool(
            name=self.name,
            description=self.description,
            inputSchema=self.args_schema.model_json_schema(),
        )

    def parse_arguments(self, arguments: dict[str, Any], schema: type[SchemaT]) -> SchemaT:
        """Validate raw arguments against ``schema``.

        Raises:
            NVPumpError: VALIDATION_FAILED listing every bad field.
        """
        try:
            return schema.model_validate(arguments or {})
        except ValidationError as exc:
            raise NVPumpError(
                f"invalid arguments for {self.name}: {format_validation(exc)}",
                ErrorCode.VALIDATION_FAILED,
            ) from exc

    @staticmethod
    async def offload(func: Callable[..., ResultT], *args: Any) -> ResultT:
        """Run a CPU-bound simulation off the event loop."""
        return await anyio.to_thread.run_sync(func, *args)

    @staticmethod
    def render(payload: Any) -> list[TextContent]:
        """Tool output: JSON for structured payloads, plain text for strings."""
        if isinstance(payload, str):
            return [TextContent(type="text", text=payload)]
        return [TextContent(type="text", text=json.dumps(payload, indent=2))]

    def render_error(self, error: NVPumpError) -> list[TextContent]:
        """User-facing error text with the remediation hint."""
        logger.warning(f"{self.name} failed: {error.to_dict()}")
        text = f"Error executing {self.name}:\n{error.get_user_message()}"
        return [TextContent(type="text", text=text)]

    async def run(self, arguments: dict[str, Any]) -> list[TextContent]:
        """Run the tool, turning domain errors into error text.

        Args:
            arguments: Tool arguments.

        Returns:
            List of TextContent results.
        """
        try:
            return await self._run_impl(arguments)
        except NVPumpError as exc:
            return self.render_error(exc)

    @abstractmethod
    async def _run_impl(self, arguments: dict[str, Any]) -> list[TextContent]:
        """Actual tool implementation; may raise NVPumpError."""


class CachedTool(SimulatorTool):
    """Tool whose result depends only on its arguments.

    Results are kept in the shared cache for ``settings.cache_ttl`` seconds.
    Errors are never cached.
    """

    async def run(self, arguments: dict[str, Any]) -> list[TextContent]:
        """Run the tool with caching."""
        cache = get_cache()
        ttl = settings.cache_ttl
        cached_result = await cache.get(self.name, arguments, ttl)
        if cached_result is not None:
            return cached_result

        try:
            result = await self._run_impl(arguments)
        except NVPumpError as exc:
            return self.render_error(exc)

        if ttl > 0:
            await cache.set(self.name, arguments, result)
        return result


class MutatingTool(SimulatorTool):
    """Tool that writes files; blocked in read-only mode.

    The cache is cleared after every successful run.
    """

    is_mutation: ClassVar[bool] = True

    async def run(self, arguments: dict[str, Any]) -> list[TextContent]:
        """Run the tool and invalidate the cache."""
        try:
            result = await self._run_impl(arguments)
        except NVPumpError as exc:
            return self.render_error(exc)

        await get_cache().invalidate_all()
        return result
