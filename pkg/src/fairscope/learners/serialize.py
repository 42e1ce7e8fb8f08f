"""Model persistence as JSON; round-trips preserve predictions bit-exactly."""

from __future__ import annotations

import dataclasses
import json
from pathlib import Path

import numpy as np

from .config import LearnerConfig
from .models import Model
from .trees import Tree

FORMAT_VERSION = 1


def model_to_dict(model: Model) -> dict:
    doc = {
        "format_version": FORMAT_VERSION,
        "kind": model.kind,
        "feature_names": list(model.feature_names),
        "config": dataclasses.asdict(model.config),
        "base_score": model.base_score,
        "intercept": model.intercept,
        "converged": model.converged,
    }
    if model.weights is not None:
        doc["weights"] = [float(w) for w in model.weights]
    if model.trees is not None:
        doc["trees"] = [
            {
                "feature": list(t.feature),
                "threshold": [float(v) for v in t.threshold],
                "left": list(t.left),
                "right": list(t.right),
                "value": [float(v) for v in t.value],
            }
            for t in model.trees
        ]
    return doc


def model_from_dict(doc: dict) -> Model:
    trees = None
    if "trees" in doc:
        trees = [
            Tree(
                feature=list(t["feature"]),
                threshold=list(t["threshold"]),
                left=list(t["left"]),
                right=list(t["right"]),
                value=list(t["value"]),
            )
            for t in doc["trees"]
        ]
    weights = np.asarray(doc["weights"], dtype=np.float64) if "weights" in doc else None
    return Model(
        kind=doc["kind"],
        feature_names=tuple(doc["feature_names"]),
        config=LearnerConfig(**doc["config"]),
        base_score=float(doc["base_score"]),
        weights=weights,
        intercept=float(doc["intercept"]),
        trees=trees,
        converged=bool(doc["converged"]),
    )


def save_model(model: Model, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh, indent=2)
        fh.write("\n")


def load_model(path: str | Path) -> Model:
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))
