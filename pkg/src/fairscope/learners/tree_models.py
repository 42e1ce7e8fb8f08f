"""Tree-based learners: single CART, random forest, gradient boosting."""

from __future__ import annotations

import numpy as np

from .config import LearnerConfig
from .linear import _check_input, _feature_names, soft_threshold
from .models import Model
from .trees import grow_tree


def fit_tree(
    X: np.ndarray,
    y: np.ndarray,
    config: LearnerConfig | None = None,
    *,
    feature_names=None,
) -> Model:
    """Single CART regression tree; leaves predict child means."""
    X, y = _check_input(X, y)
    cfg = config or LearnerConfig(kind="tree", name="tree")
    rng = np.random.default_rng(cfg.seed)
    tree = grow_tree(
        X,
        y,
        max_depth=cfg.max_depth,
        min_child_weight=cfg.min_child_weight,
        colsample=cfg.colsample,
        rng=rng,
        leaf_value=lambda s, c: s / c,
    )
    return Model(
        kind="tree",
        feature_names=_feature_names(X, feature_names),
        config=cfg,
        trees=[tree],
    )


def fit_forest(
    X: np.ndarray,
    y: np.ndarray,
    config: LearnerConfig | None = None,
    *,
    feature_names=None,
) -> Model:
    """Random forest: bootstrap rows per tree, feature subsampling per split.

    subsample == 1.0 disables resampling entirely (each member sees the full
    training set); any smaller value draws a size-n bootstrap with
    replacement. Prediction is the unweighted member mean.
    """
    X, y = _check_input(X, y)
    cfg = config or LearnerConfig(kind="forest", name="forest")
    if cfg.n_estimators < 1:
        raise ValueError("forest needs n_estimators >= 1")
    rng = np.random.default_rng(cfg.seed)
    n = len(y)
    trees = []
    for _ in range(cfg.n_estimators):
        if cfg.subsample >= 1.0:
            idx = np.arange(n)
        else:
            idx = rng.integers(0, n, size=n)
        trees.append(
            grow_tree(
                X[idx],
                y[idx],
                max_depth=cfg.max_depth,
                min_child_weight=cfg.min_child_weight,
                colsample=cfg.colsample,
                rng=rng,
                leaf_value=lambda s, c: s / c,
            )
        )
    return Model(
        kind="forest",
        feature_names=_feature_names(X, feature_names),
        config=cfg,
        trees=trees,
    )


def fit_gbt(
    X: np.ndarray,
    y: np.ndarray,
    config: LearnerConfig | None = None,
    *,
    feature_names=None,
) -> Model:
    """Stagewise squared-loss boosting from a mean base score.

    Each stage fits a tree to the current residuals on a row subsample;
    leaf values are sum(residuals) / (count + lambda_l2), soft-thresholded
    by alpha and scaled by the learning rate, so predict() is simply
    base_score plus the sum of trees.
    """
    X, y = _check_input(X, y)
    cfg = config or LearnerConfig(kind="gbt", name="gbt")
    rng = np.random.default_rng(cfg.seed)
    n = len(y)
    base = float(y.mean())
    pred = np.full(n, base)
    trees = []

    def leaf_value(s: float, c: int) -> float:
        return cfg.learning_rate * soft_threshold(s / (c + cfg.lambda_l2), cfg.alpha)

    for _ in range(cfg.n_estimators):
        residual = y - pred
        if cfg.subsample < 1.0:
            size = max(1, int(round(cfg.subsample * n)))
            rows = rng.choice(n, size=size, replace=False)
        else:
            rows = np.arange(n)
        tree = grow_tree(
            X[rows],
            residual[rows],
            max_depth=cfg.max_depth,
            min_child_weight=cfg.min_child_weight,
            colsample=cfg.colsample,
            rng=rng,
            leaf_value=leaf_value,
        )
        trees.append(tree)
        pred += tree.predict(X)
    return Model(
        kind="gbt",
        feature_names=_feature_names(X, feature_names),
        config=cfg,
        base_score=base,
        trees=trees,
    )


def fit(frame_X: np.ndarray, y: np.ndarray, config: LearnerConfig, *, feature_names=None) -> Model:
    """Dispatch to the right fitter for a LearnerConfig."""
    if config.kind == "ols":
        from .linear import fit_ols

        return fit_ols(frame_X, y, config.ridge_eps, feature_names=feature_names, config=config)
    if config.kind == "lasso":
        from .linear import fit_lasso

        return fit_lasso(
            frame_X, y, config.lambda_l1, config.tol, config.max_sweeps,
            feature_names=feature_names, config=config,
        )
    if config.kind == "tree":
        return fit_tree(frame_X, y, config, feature_names=feature_names)
    if config.kind == "forest":
        return fit_forest(frame_X, y, config, feature_names=feature_names)
    if config.kind == "gbt":
        return fit_gbt(frame_X, y, config, feature_names=feature_names)
    raise ValueError(f"unknown learner kind {config.kind!r}")
