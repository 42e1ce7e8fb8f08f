"""Learner configuration and the named preset suite."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from ..errors import ConfigError

LEARNER_KINDS = ("ols", "lasso", "tree", "forest", "gbt")


@dataclass(frozen=True)
class LearnerConfig:
    """One flat config shared by every learner kind; irrelevant fields are ignored."""

    kind: str
    name: str = ""
    # linear
    ridge_eps: float = 1e-8
    lambda_l1: float = 0.1
    tol: float = 1e-7
    max_sweeps: int = 1000
    # trees
    max_depth: int = 6
    min_child_weight: float = 1.0
    n_estimators: int = 300
    learning_rate: float = 0.1
    subsample: float = 1.0
    colsample: float = 1.0
    lambda_l2: float = 0.0
    alpha: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in LEARNER_KINDS:
            raise ConfigError(f"kind: unknown learner kind {self.kind!r}")
        if not self.name:
            object.__setattr__(self, "name", self.kind)
        for field_name in ("ridge_eps", "lambda_l1", "min_child_weight", "lambda_l2", "alpha"):
            v = getattr(self, field_name)
            if not math.isfinite(v) or v < 0:
                raise ConfigError(f"{field_name}: must be finite and >= 0, got {v}")
        if self.tol <= 0:
            raise ConfigError(f"tol: must be > 0, got {self.tol}")
        for field_name in ("max_sweeps", "max_depth", "n_estimators"):
            v = getattr(self, field_name)
            if v < 0:
                raise ConfigError(f"{field_name}: must be >= 0, got {v}")
        for field_name in ("learning_rate", "subsample", "colsample"):
            v = getattr(self, field_name)
            if not (0.0 < v <= 1.0):
                raise ConfigError(f"{field_name}: must be in (0, 1], got {v}")

    def with_seed(self, seed: int) -> "LearnerConfig":
        return replace(self, seed=seed)


# Shipped defaults. The three boosting presets share the same core engine and
# differ only in sampling and leaf regularization; the forest preset uses
# bootstrap rows with per-split feature subsampling.
PRESETS = {
    "xgb": LearnerConfig(
        kind="gbt", name="XGB", max_depth=6, n_estimators=300, learning_rate=0.1,
        subsample=0.8, colsample=0.8, lambda_l2=1.0, alpha=0.0,
    ),
    "lgbm": LearnerConfig(
        kind="gbt", name="LGBM", max_depth=6, n_estimators=300, learning_rate=0.1,
        subsample=0.8, colsample=0.7, lambda_l2=1.0, alpha=0.0, min_child_weight=20,
    ),
    "gb": LearnerConfig(
        kind="gbt", name="GB", max_depth=6, n_estimators=300, learning_rate=0.1,
        subsample=0.8, colsample=0.8, lambda_l2=0.0, alpha=0.0,
    ),
    "rf": LearnerConfig(
        kind="forest", name="RF", n_estimators=200, max_depth=12,
        min_child_weight=5, subsample=0.8, colsample=0.7,
    ),
    "linear": LearnerConfig(kind="ols", name="LinearR"),
    "lasso": LearnerConfig(kind="lasso", name="LassoR", lambda_l1=0.1),
}


def preset(name: str) -> LearnerConfig:
    try:
        return PRESETS[name.lower()]
    except KeyError:
        raise ConfigError(
            f"unknown preset {name!r}; available: {sorted(PRESETS)}"
        ) from None
