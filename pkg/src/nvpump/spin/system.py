"""Level structure of the NV electron spin coupled to its 14N host nucleus.

The ground-state Hamiltonian is diagonal in the product basis |m_S, m_I> when the
magnetic field is aligned with the NV axis and non-secular terms are dropped:

    E/h = D m_S^2 + gamma_e B m_S + Q m_I^2 + gamma_n B m_I + A m_S m_I

With both Zeeman terms positive the |0> <-> |-1> electron line moves down with
field below the ground-state level anti-crossing.
"""

from enum import Enum
from typing import Annotated

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from nvpump.core.exceptions import ErrorCode, SpinDomainError


SPIN_PROJECTIONS: tuple[int, int, int] = (1, 0, -1)
"""Allowed m_S and m_I values, in basis order (descending)."""

DIM = 9

Level = tuple[int, int]
"""A product level (m_S, m_I)."""


def check_projection(value: int, name: str = "m") -> int:
    """Validate a spin-1 projection quantum number.

    Raises:
        SpinDomainError: If the value is not -1, 0 or +1.
    """
    if value not in SPIN_PROJECTIONS:
        raise SpinDomainError(f"{name} = {value} is outside {{-1, 0, +1}}")
    return int(value)


def level_index(m_s: int, m_i: int) -> int:
    """Return the basis index of |m_S, m_I> (m_S major, m_I minor, both descending)."""
    check_projection(m_s, "m_S")
    check_projection(m_i, "m_I")
    return (1 - m_s) * 3 + (1 - m_i)


def index_level(index: int) -> Level:
    """Inverse of :func:`level_index`."""
    if not 0 <= index < DIM:
        raise SpinDomainError(f"basis index {index} is outside 0..8")
    return 1 - index // 3, 1 - index % 3


def all_levels() -> list[Level]:
    """All nine levels in basis order."""
    return [index_level(i) for i in range(DIM)]


class Channel(str, Enum):
    """Drive channel of a pulse."""

    MW = "mw"
    RF = "rf"


NonNegative = Annotated[float, Field(ge=0.0)]


class SpinSystem(BaseModel):
    """Coupling constants and field of the NV-14N pair.

    Units follow the usual lab conventions: D in GHz, Q and A in MHz,
    gamma_e in GHz/T, gamma_n in MHz/T and B in mT.  With these units
    gamma_e * B already comes out in MHz.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    zero_field_splitting: NonNegative = Field(default=2.87, description="D (GHz)")
    quadrupole: NonNegative = Field(default=4.945, description="Q (MHz)")
    hyperfine: NonNegative = Field(default=2.16, description="A (MHz)")
    gamma_e: NonNegative = Field(default=28.025, description="Electron gyromagnetic ratio (GHz/T)")
    gamma_n: NonNegative = Field(default=3.077, description="14N gyromagnetic ratio (MHz/T)")
    b_field: NonNegative = Field(default=0.0, description="Axial magnetic field (mT)")

    @property
    def electron_zeeman(self) -> float:
        """gamma_e * B in MHz."""
        return self.gamma_e * self.b_field

    @property
    def nuclear_zeeman(self) -> float:
        """gamma_n * B in MHz."""
        return self.gamma_n * self.b_field * 1e-3

    def energies(self) -> np.ndarray:
        """All nine level energies (MHz) in basis order."""
        return np.array([level_energy(self, m_s, m_i) for m_s, m_i in all_levels()])

    def with_field(self, b_field: float) -> "SpinSystem":
        """Copy of this system at another field."""
        return self.model_copy(update={"b_field": b_field})


def level_energy(system: SpinSystem, m_s: int, m_i: int) -> float:
    """Diagonal energy of |m_S, m_I> in MHz.

    Raises:
        SpinDomainError: If a quantum number is out of range.
    """
    check_projection(m_s, "m_S")
    check_projection(m_i, "m_I")
    return (
        system.zero_field_splitting * 1e3 * m_s**2
        + system.electron_zeeman * m_s
        + system.quadrupole * m_i**2
        + system.nuclear_zeeman * m_i
        + system.hyperfine * m_s * m_i
    )


class Transition(BaseModel):
    """A driven two-level subspace.

    MW transitions change m_S by one and keep m_I; RF transitions change m_I by
    one and keep m_S.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    channel: Channel
    from_level: Level
    to_level: Level

    @model_validator(mode="after")
    def _check_selection_rules(self) -> "Transition":
        (s1, i1), (s2, i2) = self.from_level, self.to_level
        for value, name in ((s1, "m_S"), (i1, "m_I"), (s2, "m_S"), (i2, "m_I")):
            check_projection(value, name)
        if self.from_level == self.to_level:
            raise SpinDomainError(
                f"transition {self.label} connects a level to itself",
                ErrorCode.INVALID_TRANSITION,
            )
        if self.channel is Channel.MW and (i1 != i2 or abs(s1 - s2) != 1):
            what = "MW cannot change m_I" if i1 != i2 else "MW must change m_S by 1"
            raise SpinDomainError(f"{what}: {self.label}", ErrorCode.INVALID_TRANSITION)
        if self.channel is Channel.RF and (s1 != s2 or abs(i1 - i2) != 1):
            what = "RF cannot change m_S" if s1 != s2 else "RF must change m_I by 1"
            raise SpinDomainError(f"{what}: {self.label}", ErrorCode.INVALID_TRANSITION)
        return self

    @classmethod
    def mw(cls, m_i: int, m_s: int = -1) -> "Transition":
        """Electron transition |0, m_I> <-> |m_S, m_I>."""
        return cls(channel=Channel.MW, from_level=(0, m_i), to_level=(m_s, m_i))

    @classmethod
    def rf(cls, m_s: int, from_mi: int, to_mi: int) -> "Transition":
        """Nuclear transition |m_S, from> <-> |m_S, to>."""
        return cls(channel=Channel.RF, from_level=(m_s, from_mi), to_level=(m_s, to_mi))

    @property
    def indices(self) -> tuple[int, int]:
        """Basis indices of (from_level, to_level)."""
        return level_index(*self.from_level), level_index(*self.to_level)

    @property
    def label(self) -> str:
        """Readable form, e.g. ``mw (0,+1)->(-1,+1)``."""
        source, target = format_level(self.from_level), format_level(self.to_level)
        return f"{self.channel.value} {source}->{target}"

    def shares_level(self, other: "Transition") -> bool:
        """Whether the two subspaces overlap."""
        return bool({self.from_level, self.to_level} & {other.from_level, other.to_level})

    def same_subspace(self, other: "Transition") -> bool:
        """Whether both transitions drive the same pair of levels."""
        return {self.from_level, self.to_level} == {other.from_level, other.to_level}


def format_level(level: Level) -> str:
    """Level as text, e.g. ``(0,+1)``."""
    m_s, m_i = level
    return f"({m_s:+d},{m_i:+d})".replace("+0", "0")


def transition_frequency(system: SpinSystem, transition: Transition) -> float:
    """Resonance frequency of a transition in MHz (always positive)."""
    upper = level_energy(system, *transition.to_level)
    lower = level_energy(system, *transition.from_level)
    return abs(upper - lower)


def channel_transitions(channel: Channel) -> list[Transition]:
    """Every allowed transition of one channel, each subspace listed once."""
    if channel is Channel.MW:
        return [Transition.mw(m_i, m_s) for m_s in (1, -1) for m_i in SPIN_PROJECTIONS]
    return [
        Transition.rf(m_s, upper, upper - 1) for m_s in SPIN_PROJECTIONS for upper in (1, 0)
    ]


def esr_line_frequencies(system: SpinSystem, m_s: int = -1) -> tuple[float, float, float]:
    """The three hyperfine-split electron lines |0, m_I> <-> |m_S, m_I> for m_I = +1, 0, -1."""
    return tuple(  # type: ignore[return-value]
        transition_frequency(system, Transition.mw(m_i, m_s)) for m_i in SPIN_PROJECTIONS
    )
