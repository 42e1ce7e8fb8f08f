"""Ordinary least squares and lasso via cyclic coordinate descent."""

from __future__ import annotations

import warnings

import numpy as np

from ..errors import DataError
from .config import LearnerConfig
from .models import Model


def _check_input(X: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2:
        raise DataError(f"feature matrix must be 2-D, got shape {X.shape}")
    if len(X) == 0:
        raise DataError("empty training input")
    if len(X) != len(y):
        raise DataError(f"X has {len(X)} rows but y has {len(y)}")
    if not (np.isfinite(X).all() and np.isfinite(y).all()):
        raise DataError("training input contains non-finite cells")
    return X, y


def _feature_names(X: np.ndarray, names) -> tuple[str, ...]:
    if names is not None:
        return tuple(names)
    return tuple(f"x{j}" for j in range(X.shape[1]))


def fit_ols(
    X: np.ndarray,
    y: np.ndarray,
    ridge_eps: float = 1e-8,
    *,
    feature_names=None,
    config: LearnerConfig | None = None,
) -> Model:
    """Least-squares affine fit via the normal equations.

    When the Gram matrix is singular (detected by a failed Cholesky
    factorization) a diagonal jitter of ridge_eps is added once.
    """
    X, y = _check_input(X, y)
    A = np.column_stack([X, np.ones(len(X))])
    G = A.T @ A
    b = A.T @ y
    try:
        np.linalg.cholesky(G)
    except np.linalg.LinAlgError:
        G = G + ridge_eps * np.eye(G.shape[0])
    coef = np.linalg.solve(G, b)
    cfg = config or LearnerConfig(kind="ols", name="ols", ridge_eps=ridge_eps)
    return Model(
        kind="ols",
        feature_names=_feature_names(X, feature_names),
        config=cfg,
        weights=coef[:-1],
        intercept=float(coef[-1]),
    )


def soft_threshold(v: float, t: float) -> float:
    if v > t:
        return v - t
    if v < -t:
        return v + t
    return 0.0


def lasso_objective(X, y, w, b, lambda_l1: float) -> float:
    r = y - X @ w - b
    n = len(y)
    return float(r @ r) / (2 * n) + lambda_l1 * float(np.abs(w).sum())


def fit_lasso(
    X: np.ndarray,
    y: np.ndarray,
    lambda_l1: float = 0.1,
    tol: float = 1e-7,
    max_sweeps: int = 1000,
    *,
    feature_names=None,
    config: LearnerConfig | None = None,
) -> Model:
    """Cyclic coordinate descent on (1/2n)||Xw + b - y||^2 + lambda_l1 ||w||_1.

    The intercept is unpenalized and refreshed at the start of every sweep.
    Stops when the largest coefficient change in a sweep drops below tol;
    running out of sweeps flags the model as non-converged rather than
    failing.
    """
    X, y = _check_input(X, y)
    n, m = X.shape
    col_sq = (X * X).sum(axis=0) / n
    w = np.zeros(m)
    b = float(y.mean())
    r = y - b  # residual y - Xw - b, maintained incrementally
    objectives = []
    converged = False
    for _ in range(max_sweeps):
        max_delta = 0.0
        shift = float(r.mean())
        b += shift
        r -= shift
        max_delta = abs(shift)
        for j in range(m):
            if col_sq[j] == 0.0:
                continue
            xj = X[:, j]
            rho = float(xj @ r) / n + col_sq[j] * w[j]
            w_new = soft_threshold(rho, lambda_l1) / col_sq[j]
            if w_new != w[j]:
                r += xj * (w[j] - w_new)
                max_delta = max(max_delta, abs(w_new - w[j]))
                w[j] = w_new
        objectives.append(lasso_objective(X, y, w, b, lambda_l1))
        if max_delta < tol:
            converged = True
            break
    if not converged and max_sweeps > 0:
        warnings.warn(
            f"lasso did not converge in {max_sweeps} sweeps "
            f"(last max coordinate change above {tol})",
            stacklevel=2,
        )
    cfg = config or LearnerConfig(
        kind="lasso", name="lasso", lambda_l1=lambda_l1, tol=tol, max_sweeps=max_sweeps
    )
    return Model(
        kind="lasso",
        feature_names=_feature_names(X, feature_names),
        config=cfg,
        weights=w,
        intercept=b,
        converged=converged,
        sweep_objectives=objectives,
    )
