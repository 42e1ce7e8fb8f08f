"""Weighted-average stacking of fitted models' predictions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError
from .learners import LearnerConfig, Model, predict


@dataclass(frozen=True)
class StackSpec:
    """Members plus raw positive weights (normalized at prediction time)."""

    members: tuple[LearnerConfig, ...]
    weights: tuple[float, ...]
    name: str = "Stacked"

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if len(self.members) != len(self.weights):
            raise ConfigError(
                f"weights: got {len(self.weights)} weights for {len(self.members)} members"
            )
        if not self.members:
            raise ConfigError("members: stack needs at least one member")
        if any(w <= 0 for w in self.weights):
            raise ConfigError(f"weights: all weights must be > 0, got {self.weights}")


def stack_predict(
    models: Sequence[Model], weights: Sequence[float], features: np.ndarray
) -> np.ndarray:
    """Weighted mean of member predictions, weights normalized internally."""
    if len(models) == 0:
        raise ConfigError("members: empty model list")
    if len(models) != len(weights):
        raise ConfigError(
            f"weights: got {len(weights)} weights for {len(models)} models"
        )
    w = np.asarray(weights, dtype=np.float64)
    if (w <= 0).any():
        raise ConfigError(f"weights: all weights must be > 0, got {list(weights)}")
    out = np.zeros(len(np.asarray(features)), dtype=np.float64)
    for model, wi in zip(models, w):
        out += wi * predict(model, features)
    return out / w.sum()
