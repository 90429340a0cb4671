"""Spin-1/2 pumping model.

The nucleus is either in the target state or in the depleted state. Each cycle
the pulse pair moves a depleted spin to the target with probability p_a, then
the laser flips the spin with probability p_b whatever its state. The depleted
population obeys

    P(n) = q P(n-1) + p_b,    q = (1 - p_a)(1 - 2 p_b)

so P(N) = P(0) q^N + p_b (1 - q^N) / (1 - q) and the target population tends to
1 - p_b / (p_a + 2 p_b (1 - p_a)).
"""

import math

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field

from nvpump.core.exceptions import ErrorCode, NVPumpError


DEFAULT_CHUNK = 50_000


class ToyModelParams(BaseModel):
    """Parameters of the two-state pumping model."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    p_a: float = Field(ge=0.0, le=1.0, description="rf-driven flip probability")
    p_b: float = Field(ge=0.0, le=1.0, description="optically induced flip probability")
    p_minus_0: float = Field(
        default=0.5, ge=0.0, le=1.0, description="initial depleted population"
    )

    @property
    def q(self) -> float:
        """Per-cycle contraction factor (1 - p_a)(1 - 2 p_b)."""
        return (1 - self.p_a) * (1 - 2 * self.p_b)


class MonteCarloEstimate(BaseModel):
    """Result of the stochastic oracle."""

    model_config = ConfigDict(frozen=True)

    estimate: float
    standard_error: float
    trials: int
    cycles: int
    seed: int


def iterate_populations(params: ToyModelParams, n: int) -> list[float]:
    """Depleted population P(0)..P(n) by direct iteration."""
    if n < 0:
        raise NVPumpError(f"cycle count must be >= 0, got {n}", ErrorCode.VALIDATION_FAILED)
    series = [params.p_minus_0]
    q = params.q
    for _ in range(n):
        series.append(series[-1] * q + params.p_b)
    return series


def closed_form_depleted(params: ToyModelParams, n: int) -> float:
    """Depleted population after ``n`` cycles from the closed form.

    The undriven, flip-free case q = 1 grows linearly, capped at 1.
    """
    if n < 0:
        raise NVPumpError(f"cycle count must be >= 0, got {n}", ErrorCode.VALIDATION_FAILED)
    q = params.q
    if q == 1.0:
        return min(params.p_minus_0 + n * params.p_b, 1.0)
    q_n = q**n
    return params.p_minus_0 * q_n + params.p_b * (1 - q_n) / (1 - q)


def limit_population(p_a: float, p_b: float) -> float:
    """Asymptotic target population 1 - p_b / (p_a + 2 p_b (1 - p_a)).

    Raises:
        NVPumpError: UNDEFINED_LIMIT when p_a = p_b = 0.
    """
    denominator = p_a + 2 * p_b * (1 - p_a)
    if denominator == 0.0:
        raise NVPumpError(
            f"limit undefined for p_a = {p_a}, p_b = {p_b} (q = 1)", ErrorCode.UNDEFINED_LIMIT
        )
    return 1 - p_b / denominator


def steady_state_depleted(p_a: float, p_b: float) -> float:
    """Fixed point p_b / (1 - q) of the recursion."""
    return 1 - limit_population(p_a, p_b)


def cycles_to_converge(
    params: ToyModelParams, tolerance: float = 1e-3, max_cycles: int = 10_000
) -> int:
    """Smallest N with |P(N) - P_lim| below ``tolerance``.

    Raises:
        NVPumpError: If the limit is undefined or not reached within ``max_cycles``.
    """
    target = steady_state_depleted(params.p_a, params.p_b)
    value = params.p_minus_0
    for n in range(max_cycles + 1):
        if abs(value - target) < tolerance:
            return n
        value = value * params.q + params.p_b
    raise NVPumpError(
        f"no convergence to {tolerance} within {max_cycles} cycles", ErrorCode.VALIDATION_FAILED
    )


def monte_carlo_oracle(
    params: ToyModelParams,
    n: int,
    trials: int,
    seed: int,
    chunk_size: int = DEFAULT_CHUNK,
) -> MonteCarloEstimate:
    """Estimate the depleted population after ``n`` cycles by simulating spins.

    Trials are split into chunks of ``chunk_size``. Chunk k draws from
    ``np.random.default_rng`` seeded with the k-th child of
    ``np.random.SeedSequence(seed)``, so results depend only on the seed, the
    trial count and the chunk size.
    """
    if trials < 1:
        raise NVPumpError(f"trials must be >= 1, got {trials}", ErrorCode.VALIDATION_FAILED)
    if n < 0:
        raise NVPumpError(f"cycle count must be >= 0, got {n}", ErrorCode.VALIDATION_FAILED)

    n_chunks = math.ceil(trials / chunk_size)
    children = np.random.SeedSequence(seed).spawn(n_chunks)
    depleted_total = 0
    for index, child in enumerate(children):
        size = min(chunk_size, trials - index * chunk_size)
        rng = np.random.default_rng(child)
        depleted = rng.random(size) < params.p_minus_0
        for _ in range(n):
            pumped = depleted & (rng.random(size) < params.p_a)
            depleted = depleted & ~pumped
            flipped = rng.random(size) < params.p_b
            depleted = depleted ^ flipped
        depleted_total += int(depleted.sum())

    estimate = depleted_total / trials
    error = math.sqrt(max(estimate * (1 - estimate), 0.0) / trials)
    logger.debug(f"Monte Carlo: {trials} trials, {n} cycles -> {estimate:.6f} +/- {error:.2e}")
    return MonteCarloEstimate(
        estimate=estimate, standard_error=error, trials=trials, cycles=n, seed=seed
    )


def target_series(params: ToyModelParams, n: int) -> list[float]:
    """Target population 1 - P(k) for k = 0..n."""
    return [1 - value for value in iterate_populations(params, n)]
