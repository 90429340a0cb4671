"""Optical repumping with laser-induced nuclear spin flips.

The electron is pumped into m_S = 0 with probability ``pump_efficiency``. During
the same pulse the nucleus performs a nearest-neighbour random walk over
m_I = +1, 0, -1 (continuous-time Markov chain). The (+1, 0) edge flips at rate
(kappa / 3)(1 + bias) and the (0, -1) edge at (kappa / 3)(1 - bias), both
directions alike. An optional one-way ``pumping_rate`` adds m_I-raising flips.

For bias = 0 the probability of leaving m_I = 0 is (2/3)(1 - exp(-kappa t)) and
the uniform nuclear state is stationary. For bias = +1 the (0, -1) edge is
frozen and the (+1, 0) pair flips like a spin-1/2 with probability
(1/2)(1 - exp(-4 kappa t / 3)).
"""

import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy.linalg import expm

from nvpump.core.exceptions import SpinDomainError
from nvpump.spin.state import DensityMatrix


class OpticalParams(BaseModel):
    """One laser pulse."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    pump_duration: float = Field(default=0.25, ge=0.0, description="Pulse length (us)")
    nuclear_flip_rate: float = Field(default=1.43, ge=0.0, description="kappa (1/us)")
    flip_bias: float = Field(default=0.0, ge=-1.0, le=1.0, description="Edge asymmetry")
    pump_efficiency: float = Field(default=1.0, ge=0.0, le=1.0, description="P(m_S -> 0)")
    pumping_rate: float = Field(default=0.0, ge=0.0, description="One-way raising rate (1/us)")

    @classmethod
    def repump(cls, pump_duration: float = 0.25, pump_efficiency: float = 1.0) -> "OpticalParams":
        """Electron repump that leaves the nucleus untouched."""
        return cls(
            pump_duration=pump_duration, nuclear_flip_rate=0.0, pump_efficiency=pump_efficiency
        )

    @classmethod
    def for_flip_probability(
        cls, p_b: float, pump_duration: float = 0.25, two_level: bool = False
    ) -> "OpticalParams":
        """Pulse whose optical flip probability out of m_I = 0 equals ``p_b``.

        Args:
            p_b: Target flip probability.
            pump_duration: Pulse length (us).
            two_level: Freeze the (0, -1) edge so the (+1, 0) pair behaves as a
                spin-1/2 flipping with probability ``p_b``.

        Raises:
            SpinDomainError: If ``p_b`` cannot be reached (2/3, or 1/2 for two_level).
        """
        ceiling = 0.5 if two_level else 2 / 3
        if not 0.0 <= p_b < ceiling or pump_duration <= 0:
            raise SpinDomainError(
                f"flip probability {p_b} is not reachable (must lie in [0, {ceiling:.4g}))"
            )
        if two_level:
            rate = -0.75 * math.log(1 - 2 * p_b) / pump_duration
            return cls(pump_duration=pump_duration, nuclear_flip_rate=rate, flip_bias=1.0)
        rate = -math.log(1 - 1.5 * p_b) / pump_duration
        return cls(pump_duration=pump_duration, nuclear_flip_rate=rate)

    def with_duration(self, pump_duration: float) -> "OpticalParams":
        """Same calibration, another pulse length."""
        return self.model_copy(update={"pump_duration": pump_duration})


def effective_flip_probability(optics: OpticalParams) -> float:
    """p_b = (2/3)(1 - exp(-kappa t)), the chance of leaving m_I = 0 for unbiased flips."""
    return (2 / 3) * (1 - math.exp(-optics.nuclear_flip_rate * optics.pump_duration))


def nuclear_generator(optics: OpticalParams) -> np.ndarray:
    """Rate matrix G with G[i, j] the j -> i rate, basis m_I = +1, 0, -1."""
    upper = optics.nuclear_flip_rate / 3 * (1 + optics.flip_bias)
    lower = optics.nuclear_flip_rate / 3 * (1 - optics.flip_bias)
    raise_rate = optics.pumping_rate
    rates = np.array(
        [
            [0.0, upper + raise_rate, 0.0],
            [upper, 0.0, lower + raise_rate],
            [0.0, lower, 0.0],
        ]
    )
    return rates - np.diag(rates.sum(axis=0))


def nuclear_transfer_matrix(optics: OpticalParams) -> np.ndarray:
    """Column-stochastic matrix T[i, j] = P(m_I j -> m_I i) over one pulse."""
    return np.asarray(expm(nuclear_generator(optics) * optics.pump_duration)).real


def electron_transfer_matrix(optics: OpticalParams) -> np.ndarray:
    """Column-stochastic electron repump matrix, basis m_S = +1, 0, -1."""
    eta = optics.pump_efficiency
    return np.array(
        [
            [1 - eta, 0.0, 0.0],
            [eta, 1.0, eta],
            [0.0, 0.0, 1 - eta],
        ]
    )


def leave_probability(optics: OpticalParams, m_i: int = 0) -> float:
    """Probability that the nucleus ends the pulse outside ``m_i``."""
    index = 1 - m_i
    return float(1.0 - nuclear_transfer_matrix(optics)[index, index])


def apply_optical_channel(state: DensityMatrix, optics: OpticalParams) -> DensityMatrix:
    """Repump the electron and randomize the nucleus; coherences are erased."""
    grid = state.population_grid()
    moved = electron_transfer_matrix(optics) @ grid @ nuclear_transfer_matrix(optics).T
    return DensityMatrix.diagonal(np.clip(moved, 0.0, None).ravel())
