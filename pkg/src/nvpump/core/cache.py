"""TTL cache for agent tool results.

Simulations are deterministic in their arguments, so a repeated call with the
same arguments can be answered from memory until the entry expires.
"""

import asyncio
import json
import time
from typing import Any

from loguru import logger


class ResultCache:
    """Per-tool TTL cache keyed by canonical JSON of the arguments.

    Mutating tools clear it after they run, since they may rewrite files that
    read-only tools report on.
    """

    def __init__(self) -> None:
        """Initialize the cache."""
        self._entries: dict[str, tuple[Any, float]] = {}
        self._lock = asyncio.Lock()

    @staticmethod
    def make_key(tool_name: str, arguments: dict[str, Any]) -> str:
        """Key that does not depend on argument order.

        Args:
            tool_name: Name of the tool.
            arguments: Tool arguments.

        Returns:
            String cache key.
        """
        canonical = json.dumps(arguments or {}, sort_keys=True, default=str)
        return f"{tool_name}:{canonical}"

    async def get(
        self, tool_name: str, arguments: dict[str, Any], ttl_seconds: float
    ) -> Any | None:
        """Cached result, or None if missing or older than ``ttl_seconds``."""
        async with self._lock:
            key = self.make_key(tool_name, arguments)
            entry = self._entries.get(key)
            if entry is None:
                return None

            result, stored = entry
            age = time.monotonic() - stored
            if age > ttl_seconds:
                del self._entries[key]
                logger.debug(f"Cache expired for {tool_name}")
                return None

            logger.debug(f"Cache hit for {tool_name} (age: {age:.1f}s)")
            return result

    async def set(self, tool_name: str, arguments: dict[str, Any], result: Any) -> None:
        """Store ``result``."""
        async with self._lock:
            self._entries[self.make_key(tool_name, arguments)] = (result, time.monotonic())
            logger.debug(f"Cached result for {tool_name}")

    async def invalidate(self, tool_name: str | None = None) -> int:
        """Drop entries of one tool, or all of them when ``tool_name`` is None.

        Returns:
            Number of entries removed.
        """
        async with self._lock:
            if tool_name is None:
                count = len(self._entries)
                self._entries.clear()
                logger.info(f"Invalidated all cache entries ({count} items)")
                return count
            stale = [key for key in self._entries if key.startswith(f"{tool_name}:")]
            for key in stale:
                del self._entries[key]
            logger.info(f"Invalidated {len(stale)} cache entries for {tool_name}")
            return len(stale)

    async def invalidate_all(self) -> int:
        """Drop every entry."""
        return await self.invalidate(None)

    def get_stats(self) -> dict[str, Any]:
        """Entry counts, total and per tool."""
        tools: dict[str, int] = {}
        for key in self._entries:
            tool_name = key.split(":", 1)[0]
            tools[tool_name] = tools.get(tool_name, 0) + 1
        return {"total_entries": len(self._entries), "tools": tools}


_global_cache = ResultCache()


def get_cache() -> ResultCache:
    """Process-wide cache shared by all tools."""
    return _global_cache
