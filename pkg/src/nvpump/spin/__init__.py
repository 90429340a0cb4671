"""Spin core: levels, states, pulses and the optical channel of the NV-14N pair."""

from nvpump.spin.optics import (
    OpticalParams,
    apply_optical_channel,
    effective_flip_probability,
    leave_probability,
    nuclear_transfer_matrix,
)
from nvpump.spin.pulses import (
    DriveSpec,
    SelectivityMode,
    apply_finite_pulse,
    apply_ideal_pulse,
    finite_pulse_action,
    flip_probability,
)
from nvpump.spin.state import (
    DensityMatrix,
    Fractions,
    InitialStateKind,
    initial_state,
    nuclear_fractions,
    populations,
    product_state,
    pure_state,
)
from nvpump.spin.system import (
    SPIN_PROJECTIONS,
    Channel,
    Level,
    SpinSystem,
    Transition,
    esr_line_frequencies,
    level_energy,
    level_index,
    transition_frequency,
)


__all__ = [
    "SPIN_PROJECTIONS",
    "Channel",
    "DensityMatrix",
    "DriveSpec",
    "Fractions",
    "InitialStateKind",
    "Level",
    "OpticalParams",
    "SelectivityMode",
    "SpinSystem",
    "Transition",
    "apply_finite_pulse",
    "apply_ideal_pulse",
    "apply_optical_channel",
    "effective_flip_probability",
    "esr_line_frequencies",
    "finite_pulse_action",
    "flip_probability",
    "initial_state",
    "leave_probability",
    "level_energy",
    "level_index",
    "nuclear_fractions",
    "nuclear_transfer_matrix",
    "populations",
    "product_state",
    "pure_state",
    "transition_frequency",
]
