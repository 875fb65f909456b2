"""Highest density intervals of mu_hat = X/m and separability of sequences."""

import math
from typing import Sequence

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator

from replirate.core.exceptions import DomainError
from replirate.core.seqmodels import SequenceParams, sampling_pmf
from replirate.core.specfun import normal_ppf
from replirate.utils.logger import get_logger

logger = get_logger(__name__)

MASS_TOLERANCE = 1e-12
HDI_COLUMNS = ["mu", "rho", "m", "level", "lower", "upper", "attained_mass"]


# ============== Domain Types ==============
class HdiInterval(BaseModel):
    """A level-HDI reported as [lower, upper].

    Bounds are on the unit interval for rates; posterior differences may
    be negative.
    """

    model_config = ConfigDict(frozen=True)

    level: float = Field(..., gt=0.0, lt=1.0)
    lower: float
    upper: float
    attained_mass: float = Field(..., ge=0.0, le=1.0 + 1e-9)

    @model_validator(mode="after")
    def _ordered(self) -> "HdiInterval":
        if self.lower > self.upper:
            raise ValueError("lower bound exceeds upper bound")
        if self.attained_mass < self.level - 1e-9:
            raise ValueError("attained mass is below the requested level")
        return self

    @property
    def width(self) -> float:
        return self.upper - self.lower


class SeparablePair(BaseModel):
    """Closest symmetric pair (mu, 1 - mu) whose HDIs do not overlap."""

    model_config = ConfigDict(frozen=True)

    mu_low: float
    mu_high: float
    gap: float = Field(..., description="Lower bound of the high interval minus upper bound of the low one")
    low_interval: HdiInterval
    high_interval: HdiInterval


# ============== Discrete HDI ==============
def shortest_run(pmf: np.ndarray, level: float) -> tuple[int, int, float]:
    """Shortest contiguous run of support points holding at least `level` mass.

    Ties go to the run with more mass, then to the lower start index.

    Returns:
        (first index, last index inclusive, attained mass)
    """
    if not 0.0 < level < 1.0:
        raise DomainError(f"level must lie in (0, 1), got {level}")
    pmf = np.asarray(pmf, dtype=float)
    cum = np.concatenate([[0.0], np.cumsum(pmf)])
    n = pmf.size

    starts = np.arange(n)
    ends = np.searchsorted(cum, cum[:-1] + level - MASS_TOLERANCE, side="left")
    valid = ends <= n
    if not np.any(valid):
        raise DomainError("distribution holds less mass than the requested level")
    starts, ends = starts[valid], ends[valid]
    lengths = ends - starts
    masses = cum[ends] - cum[starts]

    best = np.lexsort((starts, -masses, lengths))[0]
    return int(starts[best]), int(ends[best] - 1), float(min(masses[best], 1.0))


def sampling_hdi(params: SequenceParams, level: float = 0.95) -> HdiInterval:
    """Level-HDI of the sampling distribution of mu_hat = X/m.

    For mu != 0.5 the interval at 1 - mu is the reflection of the one at mu.
    At mu = 0.5 two mirrored runs can tie on length and mass; the lower start
    wins, so the interval need not be centred (m = 5 gives [0, 0.8]).

    Args:
        params: Sequence parameters (mu, rho, m)
        level: Target probability

    Returns:
        HdiInterval: Bounds on the mu_hat scale with the attained mass
    """
    first, last, mass = shortest_run(sampling_pmf(params), level)
    return HdiInterval(
        level=level,
        lower=first / params.m,
        upper=last / params.m,
        attained_mass=mass,
    )


def hdi_grid(
    mu_grid: Sequence[float],
    rho: float,
    m_list: Sequence[int],
    level: float = 0.95,
) -> pd.DataFrame:
    """HDIs for every (mu, m) cell at fixed rho, one row per cell."""
    if len(m_list) == 0:
        raise DomainError("m_list must not be empty")
    if len(mu_grid) == 0:
        raise DomainError("mu_grid must not be empty")

    rows = []
    for m in m_list:
        for mu in mu_grid:
            interval = sampling_hdi(SequenceParams(mu=mu, rho=rho, m=m), level)
            rows.append(
                {
                    "mu": float(mu),
                    "rho": float(rho),
                    "m": int(m),
                    "level": level,
                    "lower": interval.lower,
                    "upper": interval.upper,
                    "attained_mass": interval.attained_mass,
                }
            )
    logger.debug(f"HDI grid at rho={rho}: {len(rows)} cells")
    return pd.DataFrame(rows, columns=HDI_COLUMNS)


def intervals_separated(a: HdiInterval, b: HdiInterval) -> bool:
    """True iff the two intervals share no point."""
    return max(a.lower, b.lower) > min(a.upper, b.upper)


def normal_approximation_width(mu: float, rho: float, level: float = 0.95) -> float:
    """Large-m HDI width implied by the variance floor mu(1-mu)rho."""
    z = normal_ppf(0.5 + level / 2.0)
    return 2.0 * z * math.sqrt(mu * (1.0 - mu) * rho)


# ============== Separability ==============
def minimal_separable_pair(
    m: int,
    rho: float,
    level: float = 0.95,
    tolerance: float = 1e-3,
    mu_max: float | None = None,
) -> SeparablePair | None:
    """Closest symmetric pair (1 - mu, mu) with separated level-HDIs.

    mu runs upward from 0.5 in steps of `tolerance` up to `mu_max`
    (default 1 - tolerance); the first separating pair is returned.
    Separation is not monotone in mu on a discrete support, so the scan is
    exhaustive rather than a bisection.

    Returns:
        The pair, or None when no candidate up to `mu_max` separates
    """
    if tolerance <= 0.0 or tolerance >= 0.5:
        raise DomainError(f"tolerance must lie in (0, 0.5), got {tolerance}")
    upper_limit = 1.0 - tolerance if mu_max is None else mu_max
    if not 0.5 < upper_limit <= 1.0:
        raise DomainError(f"mu_max must lie in (0.5, 1], got {upper_limit}")

    steps = int(math.floor((upper_limit - 0.5) / tolerance + 1e-9))
    for step in range(1, steps + 1):
        mu_high = round(0.5 + step * tolerance, 12)
        mu_low = round(1.0 - mu_high, 12)
        high = sampling_hdi(SequenceParams(mu=mu_high, rho=rho, m=m), level)
        low = sampling_hdi(SequenceParams(mu=mu_low, rho=rho, m=m), level)
        if intervals_separated(low, high):
            pair = SeparablePair(
                mu_low=mu_low,
                mu_high=mu_high,
                gap=high.lower - low.upper,
                low_interval=low,
                high_interval=high,
            )
            logger.info(
                f"Separable pair at m={m}, rho={rho}: "
                f"({pair.mu_low:.3f}, {pair.mu_high:.3f}) gap={pair.gap:.3f}"
            )
            return pair

    logger.info(f"No separable pair at m={m}, rho={rho} up to mu={upper_limit}")
    return None
