"""Tests for server module."""

import re
import subprocess
import sys


def run_module(*args: str) -> subprocess.CompletedProcess[str]:
    return subprocess.run(
        [sys.executable, "-m", "nvpump.server", *args],
        check=False,
        capture_output=True,
        text=True,
        timeout=30,
    )


class TestServerCLI:
    """Tests for CLI functionality."""

    def test_version_flag(self) -> None:
        """Test --version flag returns version and exits."""
        result = run_module("--version")
        assert result.returncode == 0
        assert "nvpump 0.1.0" in result.stdout

    def test_help_flag(self) -> None:
        """Test --help flag shows usage information."""
        result = run_module("--help")
        # Strip ANSI escape codes
        output = re.sub(r"\x1b\[[0-9;]*m", "", result.stdout)
        assert result.returncode == 0
        assert "serve" in output
        assert "log" in output.lower()

    def test_invalid_option(self) -> None:
        """Test invalid option returns error."""
        result = run_module("--invalid-option")
        assert result.returncode != 0


class TestServerImports:
    """Tests for module imports and configuration."""

    def test_server_module_imports(self) -> None:
        """Test that server module wires handlers and tools."""
        from nvpump import server

        assert server.app_mcp.name == "nvpump"
        assert len(server.tools_list) == len(server.tools_map)
        assert "nvpump_run_protocol" in server.tools_map

    def test_version_is_valid_semver(self) -> None:
        """Test that version follows semver pattern."""
        from nvpump import __version__

        parts = __version__.split(".")
        assert len(parts) == 3
        assert all(p.isdigit() for p in parts)

    def test_settings_defaults(self) -> None:
        """Test that settings module imports correctly."""
        from nvpump.core.settings import Settings

        fresh_settings = Settings()
        assert fresh_settings.readonly is False
        assert fresh_settings.workers >= 1
        assert fresh_settings.cache_ttl == 300.0

    def test_settings_from_environment(self, monkeypatch) -> None:
        """Test NVPUMP_ variables override defaults."""
        from nvpump.core.settings import Settings

        monkeypatch.setenv("NVPUMP_WORKERS", "2")
        monkeypatch.setenv("NVPUMP_LOG_LEVEL", "debug")
        fresh_settings = Settings()
        assert fresh_settings.workers == 2
        assert fresh_settings.log_level == "DEBUG"
