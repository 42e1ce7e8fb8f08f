"""Fitted model container and the shared predict entry point."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, DataError
from .config import LearnerConfig
from .trees import Tree


@dataclass
class Model:
    """A fitted regressor of any supported kind.

    Linear kinds populate ``weights``/``intercept``; tree kinds populate
    ``trees``. Boosted ensembles predict base_score + sum of trees (leaf
    values already carry the learning rate); forests predict the unweighted
    mean of their members.
    """

    kind: str
    feature_names: tuple[str, ...]
    config: LearnerConfig
    base_score: float = 0.0
    weights: np.ndarray | None = None
    intercept: float = 0.0
    trees: list[Tree] | None = None
    converged: bool = True
    sweep_objectives: list[float] = field(default_factory=list)

    @property
    def name(self) -> str:
        return self.config.name


def predict(model: Model, features: np.ndarray) -> np.ndarray:
    """Predict one value per row; pure function of (model, features)."""
    X = np.asarray(features, dtype=np.float64)
    if X.ndim != 2:
        raise DataError(f"feature matrix must be 2-D, got shape {X.shape}")
    if X.shape[1] != len(model.feature_names):
        raise DataError(
            f"model expects {len(model.feature_names)} features, got {X.shape[1]}"
        )
    if model.kind in ("ols", "lasso"):
        return X @ model.weights + model.intercept
    if model.kind in ("tree", "gbt"):
        out = np.full(len(X), model.base_score, dtype=np.float64)
        for tree in model.trees:
            out += tree.predict(X)
        return out
    if model.kind == "forest":
        out = np.zeros(len(X), dtype=np.float64)
        for tree in model.trees:
            out += tree.predict(X)
        return out / len(model.trees)
    raise ConfigError(f"kind: unknown model kind {model.kind!r}")
