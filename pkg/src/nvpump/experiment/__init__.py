"""Experiments: YAML configs, runs, sweeps and shipped presets."""

from nvpump.experiment.config import (
    ExperimentConfig,
    ProtocolKind,
    ReadoutKind,
    SweepAxis,
    config_from_dict,
    load_config,
)
from nvpump.experiment.presets import (
    PresetInfo,
    list_presets,
    load_preset,
    preset_names,
    preset_text,
    run_config,
    run_preset,
)
from nvpump.experiment.runner import PointResult, RunResult, evaluate_point, run_experiment
from nvpump.experiment.sweep import SweepTable, run_sweep, sweep, sweep_async


__all__ = [
    "ExperimentConfig",
    "PointResult",
    "PresetInfo",
    "ProtocolKind",
    "ReadoutKind",
    "RunResult",
    "SweepAxis",
    "SweepTable",
    "config_from_dict",
    "evaluate_point",
    "list_presets",
    "load_config",
    "load_preset",
    "preset_names",
    "preset_text",
    "run_config",
    "run_experiment",
    "run_preset",
    "run_sweep",
    "sweep",
    "sweep_async",
]
