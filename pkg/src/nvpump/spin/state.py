"""Density matrices of the NV-14N pair."""

from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from nvpump.core.exceptions import StateValidationError
from nvpump.spin.system import DIM, Level, level_index


HERMITICITY_TOLERANCE = 1e-12
TRACE_TOLERANCE = 1e-12
PSD_TOLERANCE = 1e-10
NORMALIZATION_TOLERANCE = 1e-9

Fractions = tuple[float, float, float]
"""Populations indexed by projection +1, 0, -1."""


class InitialStateKind(str, Enum):
    """Starting states understood by :func:`initial_state`."""

    OPTICALLY_INITIALIZED = "optically_initialized"
    FULLY_MIXED = "fully_mixed"
    CUSTOM = "custom"


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Immutable 9x9 density matrix over |m_S, m_I>.

    The array is copied on construction and made read-only, so instances can be
    shared between threads.
    """

    elements: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        array = np.array(self.elements, dtype=complex, copy=True)
        if array.shape != (DIM, DIM):
            raise StateValidationError(f"density matrix must be 9x9, got {array.shape}")
        array.setflags(write=False)
        object.__setattr__(self, "elements", array)

    @classmethod
    def from_array(cls, elements: np.ndarray | Sequence[Sequence[complex]]) -> "DensityMatrix":
        """Build and validate a state from user data."""
        state = cls(np.asarray(elements))
        state.validate()
        return state

    @classmethod
    def diagonal(cls, populations: Sequence[float] | np.ndarray) -> "DensityMatrix":
        """Diagonal state with the given nine populations."""
        return cls(np.diag(np.asarray(populations, dtype=float)))

    @property
    def trace(self) -> complex:
        """Trace of the matrix."""
        return complex(np.trace(self.elements))

    @property
    def trace_deviation(self) -> float:
        """|tr(rho) - 1|."""
        return abs(self.trace - 1.0)

    @property
    def hermiticity_error(self) -> float:
        """Largest elementwise deviation from rho = rho^dagger."""
        return float(np.max(np.abs(self.elements - self.elements.conj().T)))

    @property
    def min_eigenvalue(self) -> float:
        """Smallest eigenvalue of the Hermitian part."""
        hermitian = (self.elements + self.elements.conj().T) / 2
        return float(np.linalg.eigvalsh(hermitian)[0])

    def validate(self) -> None:
        """Check Hermiticity, unit trace and positivity.

        Raises:
            StateValidationError: If any invariant is violated.
        """
        if self.hermiticity_error > HERMITICITY_TOLERANCE:
            raise StateValidationError(f"state is not Hermitian ({self.hermiticity_error:.3e})")
        if self.trace_deviation > TRACE_TOLERANCE:
            raise StateValidationError(f"trace deviates from 1 by {self.trace_deviation:.3e}")
        if self.min_eigenvalue < -PSD_TOLERANCE:
            raise StateValidationError(f"state has eigenvalue {self.min_eigenvalue:.3e} < 0")

    def populations(self) -> np.ndarray:
        """The nine diagonal populations in basis order."""
        return np.clip(self.elements.diagonal().real, 0.0, None)

    def population(self, level: Level) -> float:
        """Population of a single level."""
        return float(self.elements[level_index(*level), level_index(*level)].real)

    def population_grid(self) -> np.ndarray:
        """Populations as a 3x3 array, rows m_S and columns m_I (both +1, 0, -1)."""
        return self.populations().reshape(3, 3)

    def nuclear_fractions(self) -> Fractions:
        """(P+1, P0, P-1) of the nucleus, traced over m_S."""
        grid = self.population_grid()
        sums = grid.sum(axis=0)
        total = sums.sum()
        p_plus, p_zero, p_minus = (sums / total) if total > 0 else sums
        return float(p_plus), float(p_zero), float(p_minus)

    def electron_fractions(self) -> Fractions:
        """(P+1, P0, P-1) of the electron, traced over m_I."""
        sums = self.population_grid().sum(axis=1)
        return float(sums[0]), float(sums[1]), float(sums[2])

    def evolve(self, unitary: np.ndarray) -> "DensityMatrix":
        """U rho U^dagger."""
        return DensityMatrix(unitary @ self.elements @ unitary.conj().T)

    def allclose(self, other: "DensityMatrix", atol: float = 1e-12) -> bool:
        """Elementwise comparison."""
        return bool(np.allclose(self.elements, other.elements, rtol=0.0, atol=atol))


def populations(state: DensityMatrix) -> np.ndarray:
    """Nine nonnegative populations summing to one."""
    return state.populations()


def nuclear_fractions(state: DensityMatrix) -> Fractions:
    """Nuclear populations (P+1, P0, P-1) traced over m_S."""
    return state.nuclear_fractions()


def pure_state(m_s: int, m_i: int) -> DensityMatrix:
    """|m_S, m_I><m_S, m_I|."""
    pops = np.zeros(DIM)
    pops[level_index(m_s, m_i)] = 1.0
    # Rounding within the tolerance is folded back into an exact trace.
    return DensityMatrix.diagonal(pops / pops.sum())


def product_state(electron: Sequence[float], nuclear: Sequence[float]) -> DensityMatrix:
    """Diagonal product of electron and nuclear populations (each ordered +1, 0, -1)."""
    return initial_state(
        InitialStateKind.CUSTOM, np.outer(np.asarray(electron), np.asarray(nuclear)).ravel()
    )


def initial_state(
    kind: InitialStateKind | str = InitialStateKind.OPTICALLY_INITIALIZED,
    populations: Sequence[float] | np.ndarray | None = None,
) -> DensityMatrix:
    """Starting state of a run.

    Args:
        kind: Which preparation to use.
        populations: Nine populations (or a 3x3 grid, rows m_S) for CUSTOM.

    Raises:
        StateValidationError: If CUSTOM populations are negative or not normalized.
    """
    kind = InitialStateKind(kind)
    if kind is InitialStateKind.OPTICALLY_INITIALIZED:
        return product_state((0.0, 1.0, 0.0), (1 / 3, 1 / 3, 1 / 3))
    if kind is InitialStateKind.FULLY_MIXED:
        return DensityMatrix(np.eye(DIM) / DIM)

    if populations is None:
        raise StateValidationError("CUSTOM initial state needs populations")
    pops = np.asarray(populations, dtype=float).ravel()
    if pops.size != DIM:
        raise StateValidationError(f"CUSTOM initial state needs 9 populations, got {pops.size}")
    if np.any(pops < 0):
        raise StateValidationError("CUSTOM populations must be nonnegative")
    if abs(pops.sum() - 1.0) > NORMALIZATION_TOLERANCE:
        raise StateValidationError(f"CUSTOM populations sum to {pops.sum():.12g}, not 1")
    # Rounding within the tolerance is folded back into an exact trace.
    return DensityMatrix.diagonal(pops / pops.sum())
