"""Normal density fits over prediction groups and Gaussian KL divergence."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError

#: lower bound on a fitted standard deviation, guarding constant groups
SIGMA_FLOOR = 1e-9


@dataclass(frozen=True)
class GroupDensity:
    """Normal (mu, sigma) fitted to one group's predictions."""

    mu: float
    sigma: float
    count: int

    def __post_init__(self):
        if self.sigma < SIGMA_FLOOR:
            raise DataError(f"sigma {self.sigma} below floor {SIGMA_FLOOR}")
        if self.count < 1:
            raise DataError("density needs at least one sample")


def fit_normal(values: np.ndarray) -> GroupDensity:
    """Sample mean and population (divide-by-n) standard deviation, floored."""
    values = np.asarray(values, dtype=np.float64)
    if len(values) == 0:
        raise DataError("cannot fit a density to an empty vector")
    if not np.isfinite(values).all():
        raise DataError("density input contains non-finite values")
    return GroupDensity(
        mu=float(values.mean()),
        sigma=max(float(values.std()), SIGMA_FLOOR),
        count=len(values),
    )


def kl_gaussian(p: GroupDensity, q: GroupDensity) -> float:
    """Closed-form KL divergence between two normals; >= 0, 0 iff p == q."""
    return (
        math.log(q.sigma / p.sigma)
        + (p.sigma**2 + (p.mu - q.mu) ** 2) / (2 * q.sigma**2)
        - 0.5
    )
