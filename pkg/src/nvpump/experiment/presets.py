"""Experiment presets shipped with the package."""

from importlib import resources
from pathlib import Path

import yaml
from pydantic import BaseModel, ConfigDict

from nvpump.core.exceptions import ConfigurationError, ErrorCode
from nvpump.experiment.config import ExperimentConfig, config_from_dict
from nvpump.experiment.runner import RunResult, run_experiment
from nvpump.experiment.sweep import run_sweep


PRESET_SUFFIX = ".yaml"


class PresetInfo(BaseModel):
    """Name and one-paragraph description of a preset."""

    model_config = ConfigDict(frozen=True)

    name: str
    description: str
    sweep: bool


def preset_directory() -> Path:
    """Directory holding the preset YAML files and their program texts."""
    return Path(str(resources.files("nvpump").joinpath("presets")))


def preset_names() -> list[str]:
    """Sorted preset names."""
    return sorted(
        path.stem for path in preset_directory().iterdir() if path.suffix == PRESET_SUFFIX
    )


def preset_path(name: str) -> Path:
    """Path of one preset file.

    Raises:
        ConfigurationError: FILE_NOT_FOUND listing the known presets.
    """
    path = preset_directory() / f"{name}{PRESET_SUFFIX}"
    if not path.is_file():
        known = ", ".join(preset_names())
        raise ConfigurationError(
            f"unknown preset '{name}' (available: {known})", ErrorCode.FILE_NOT_FOUND
        )
    return path


def preset_text(name: str) -> str:
    """Raw YAML of a preset."""
    return preset_path(name).read_text(encoding="utf-8")


def load_preset(name: str) -> ExperimentConfig:
    """Validated config of a preset; its program files resolve next to it."""
    path = preset_path(name)
    data = yaml.safe_load(path.read_text(encoding="utf-8"))
    return config_from_dict(data, base_dir=path.parent)


def list_presets() -> list[PresetInfo]:
    """Every preset with its description."""
    infos = []
    for name in preset_names():
        config = load_preset(name)
        infos.append(
            PresetInfo(name=name, description=config.description, sweep=config.sweep is not None)
        )
    return infos


def run_config(config: ExperimentConfig, output_dir: Path | None = None) -> RunResult:
    """Sweep when the config has axes, single run otherwise."""
    if config.sweep is not None:
        return run_sweep(config, output_dir)
    return run_experiment(config, output_dir)


def run_preset(name: str, output_dir: Path | None = None) -> RunResult:
    """Load and run a preset."""
    return run_config(load_preset(name), output_dir)
