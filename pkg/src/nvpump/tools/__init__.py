"""MCP tools exposing the simulator."""
