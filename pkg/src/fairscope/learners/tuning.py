"""Random-search hyperparameter tuning scored by k-fold CV RMSE."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from ..errors import ConfigError
from ..ingest import Frame, make_folds
from .config import LearnerConfig
from .models import predict
from .tree_models import fit


@dataclass(frozen=True)
class ParamRange:
    """One tunable parameter: a float/int interval or a categorical list."""

    type: str  # "float" | "int" | "cat"
    lo: float | None = None
    hi: float | None = None
    log: bool = False
    choices: tuple | None = None

    def __post_init__(self):
        if self.type not in ("float", "int", "cat"):
            raise ConfigError(f"param type must be float, int or cat, got {self.type!r}")
        if self.type == "cat":
            if not self.choices:
                raise ConfigError("categorical param needs a non-empty choices list")
            object.__setattr__(self, "choices", tuple(self.choices))
        else:
            if self.lo is None or self.hi is None or self.lo > self.hi:
                raise ConfigError(f"param range needs lo <= hi, got [{self.lo}, {self.hi}]")
            if self.log and self.lo <= 0:
                raise ConfigError("log-scale param needs lo > 0")

    def sample(self, rng: np.random.Generator):
        if self.type == "cat":
            return self.choices[int(rng.integers(len(self.choices)))]
        if self.type == "int":
            return int(rng.integers(int(self.lo), int(self.hi) + 1))
        if self.log:
            return float(math.exp(rng.uniform(math.log(self.lo), math.log(self.hi))))
        return float(rng.uniform(self.lo, self.hi))


class HyperSpace(dict):
    """Mapping of LearnerConfig field name -> ParamRange."""

    @classmethod
    def from_dict(cls, doc: Mapping) -> "HyperSpace":
        space = cls()
        for name, entry in doc.items():
            space[name] = ParamRange(
                type=entry["type"],
                lo=entry.get("lo"),
                hi=entry.get("hi"),
                log=bool(entry.get("log", False)),
                choices=tuple(entry["choices"]) if "choices" in entry else None,
            )
        return space


#: the nine boosting parameters searched by default
DEFAULT_GBT_SPACE = HyperSpace(
    {
        "alpha": ParamRange("float", 0.0, 1.0),
        "colsample": ParamRange("float", 0.5, 1.0),
        "lambda_l2": ParamRange("float", 1e-3, 10.0, log=True),
        "learning_rate": ParamRange("float", 0.01, 0.3, log=True),
        "max_depth": ParamRange("int", 3, 10),
        "min_child_weight": ParamRange("float", 1.0, 50.0, log=True),
        "n_estimators": ParamRange("int", 100, 500),
        "seed": ParamRange("int", 0, 9999),
        "subsample": ParamRange("float", 0.5, 1.0),
    }
)


@dataclass(frozen=True)
class TuneResult:
    best_config: LearnerConfig
    best_cv_rmse: float
    trials: tuple[tuple[LearnerConfig, float], ...]

    def to_dict(self) -> dict:
        return {
            "best_config": dataclasses.asdict(self.best_config),
            "best_cv_rmse": self.best_cv_rmse,
            "trials": [
                {"config": dataclasses.asdict(c), "cv_rmse": r} for c, r in self.trials
            ],
        }


def cv_rmse(config: LearnerConfig, frame: Frame, k: int, seed: int) -> float:
    """Root mean squared error pooled over all k test folds."""
    X = frame.feature_matrix()
    y = frame.target
    plan = make_folds(len(y), k, seed)
    sq_sum = 0.0
    for fold in range(k):
        tr = plan.train_indices(fold)
        te = plan.test_indices(fold)
        model = fit(X[tr], y[tr], config, feature_names=frame.feature_names)
        err = predict(model, X[te]) - y[te]
        sq_sum += float(err @ err)
    return math.sqrt(sq_sum / len(y))


def tune(
    kind: str,
    frame: Frame,
    space: Mapping[str, ParamRange],
    budget: int,
    k: int,
    seed: int,
    *,
    base_config: LearnerConfig | None = None,
) -> TuneResult:
    """Uniform random search over the space; every trial shares one fold plan."""
    if budget < 1:
        raise ConfigError(f"budget: must be >= 1, got {budget}")
    if not space:
        raise ConfigError("space: hyperparameter space is empty")
    base = base_config or LearnerConfig(kind=kind)
    rng = np.random.default_rng(seed)
    trials = []
    for t in range(budget):
        params = {name: space[name].sample(rng) for name in sorted(space)}
        config = dataclasses.replace(base, kind=kind, **params)
        trials.append((config, cv_rmse(config, frame, k, seed)))
    best_config, best_rmse = min(trials, key=lambda cr: cr[1])
    return TuneResult(best_config=best_config, best_cv_rmse=best_rmse, trials=tuple(trials))
