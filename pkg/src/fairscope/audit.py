"""Audit orchestration: folds x learners x attributes, plus the stacked run.

For every learner and fold the model is fitted once on the training split
and its test predictions are reused across all audited attributes; only the
alternated predictions differ per attribute. In retrain-alternated mode an
extra model is fitted per (learner, attribute, fold) on the alternated
training split.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .alternation import DEFAULT_PBA_THRESHOLD, AlternationSpec, alternate, classify_pba
from .divergence import GroupDensity, fit_normal, kl_gaussian
from .ensemble import StackSpec, stack_predict
from .errors import ConfigError
from .ingest import Frame, FoldPlan, make_folds
from .learners import LearnerConfig, Model, predict, preset
from .learners.tree_models import fit

MODES = ("predict-alternated", "retrain-alternated")
TREE_KINDS = ("tree", "forest", "gbt")


@dataclass(frozen=True)
class AuditConfig:
    pba_specs: tuple[AlternationSpec, ...]
    learners: tuple[LearnerConfig, ...]
    stack: StackSpec | None = None
    k: int = 15
    seed: int = 0
    mode: str = "predict-alternated"
    pba_threshold: float = DEFAULT_PBA_THRESHOLD

    def __post_init__(self):
        object.__setattr__(self, "pba_specs", tuple(self.pba_specs))
        object.__setattr__(self, "learners", tuple(self.learners))
        if self.k < 2:
            raise ConfigError(f"k: fold count must be >= 2, got {self.k}")
        if not self.learners:
            raise ConfigError("learners: at least one learner is required")
        if not self.pba_specs:
            raise ConfigError("attributes: at least one audited attribute is required")
        if self.mode not in MODES:
            raise ConfigError(f"mode: must be one of {MODES}, got {self.mode!r}")
        if self.pba_threshold < 0:
            raise ConfigError(f"pba_threshold: must be >= 0, got {self.pba_threshold}")

    @classmethod
    def from_dict(cls, doc: Mapping) -> "AuditConfig":
        specs = tuple(
            AlternationSpec(
                attribute=a["name"],
                group_names={int(k): v for k, v in a.get("groups", {}).items()},
            )
            for a in doc.get("attributes", ())
        )
        learners = tuple(_learner_from_entry(e) for e in doc.get("learners", ()))
        stack = None
        if doc.get("stack"):
            stack = StackSpec(
                members=tuple(_learner_from_entry(e) for e in doc["stack"]["members"]),
                weights=tuple(doc["stack"]["weights"]),
                name=doc["stack"].get("name", "Stacked"),
            )
        return cls(
            pba_specs=specs,
            learners=learners,
            stack=stack,
            k=int(doc.get("k", 15)),
            seed=int(doc.get("seed", 0)),
            mode=doc.get("mode", "predict-alternated"),
            pba_threshold=float(doc.get("pba_threshold", DEFAULT_PBA_THRESHOLD)),
        )


def _learner_from_entry(entry) -> LearnerConfig:
    if isinstance(entry, str):
        return preset(entry)
    if isinstance(entry, Mapping):
        entry = dict(entry)
        if "preset" in entry:
            base = preset(entry.pop("preset"))
            try:
                return LearnerConfig(**{**base.__dict__, **entry})
            except TypeError as exc:
                raise ConfigError(f"learners: {exc}") from exc
        try:
            return LearnerConfig(**entry)
        except TypeError as exc:
            raise ConfigError(f"learners: {exc}") from exc
    raise ConfigError(f"learners: entry must be a preset name or mapping, got {entry!r}")


@dataclass(frozen=True)
class FoldResult:
    """Densities, group means and both divergence directions for one fold."""

    fold_index: int
    p: Mapping[int, GroupDensity]  # original predictions per group
    q: Mapping[int, GroupDensity]  # alternated predictions per group
    kl: Mapping[int, float]  # group -> kl(p_g, q_g)

    @property
    def kl_values(self) -> tuple[float, float]:
        return (self.kl[0], self.kl[1])


@dataclass(frozen=True)
class AttributeResult:
    """Aggregated audit of one (learner, attribute) pair across folds."""

    attribute: str
    learner_name: str
    folds: tuple[FoldResult, ...]
    skipped_folds: tuple[int, ...]
    group_mean_original: Mapping[int, float]  # pooled over all test predictions
    group_mean_alternated: Mapping[int, float]
    average_kl: float
    pba_flag: bool

    @property
    def fold_kl(self) -> list[tuple[float, float]]:
        return [f.kl_values for f in self.folds]


@dataclass(frozen=True)
class AuditReport:
    config: AuditConfig
    n_rows: int
    actual_group_means: Mapping[str, Mapping[int, float]]
    results: tuple[AttributeResult, ...]
    stacked: tuple[AttributeResult, ...] = ()
    metadata: Mapping[str, object] = field(default_factory=dict)

    def result_for(self, learner_name: str, attribute: str) -> AttributeResult:
        for r in self.results:
            if r.learner_name == learner_name and r.attribute == attribute:
                return r
        for r in self.stacked:
            if r.learner_name == learner_name and r.attribute == attribute:
                return r
        raise KeyError((learner_name, attribute))


def _fold_result(
    fold_index: int,
    yhat: np.ndarray,
    yhat_alt: np.ndarray,
    groups: np.ndarray,
) -> FoldResult | None:
    """Build one fold's densities; None when a group is empty in the fold."""
    p, q, kl = {}, {}, {}
    for g in (0, 1):
        mask = groups == g
        if not mask.any():
            return None
        p[g] = fit_normal(yhat[mask])
        q[g] = fit_normal(yhat_alt[mask])
        kl[g] = kl_gaussian(p[g], q[g])
    return FoldResult(fold_index=fold_index, p=p, q=q, kl=kl)


def run_fold(
    train: Frame,
    test: Frame,
    learner: LearnerConfig,
    spec: AlternationSpec,
    mode: str = "predict-alternated",
) -> FoldResult | None:
    """Execute one fold of the audit for a single learner and attribute.

    Returns None (with a warning) when either attribute group is empty in
    the test fold.
    """
    if mode not in MODES:
        raise ConfigError(f"mode: must be one of {MODES}, got {mode!r}")
    model = fit(train.feature_matrix(), train.target, learner,
                feature_names=train.feature_names)
    X_test = test.feature_matrix()
    yhat = predict(model, X_test)
    alt_test = alternate(test, spec)
    if mode == "retrain-alternated":
        alt_train = alternate(train, spec)
        model = fit(alt_train.feature_matrix(), alt_train.target, learner,
                    feature_names=train.feature_names)
    yhat_alt = predict(model, alt_test.feature_matrix())
    groups = test.group_values(spec.attribute).astype(np.int64)
    result = _fold_result(0, yhat, yhat_alt, groups)
    if result is None:
        warnings.warn(
            f"attribute {spec.attribute!r}: a group is empty in the test fold; skipped",
            stacklevel=2,
        )
    return result


def _aggregate(
    attribute: str,
    learner_name: str,
    per_fold: Sequence[tuple[int, np.ndarray, np.ndarray, np.ndarray]],
    threshold: float,
) -> AttributeResult:
    """Fold results plus pooled group means for one (learner, attribute)."""
    folds = []
    skipped = []
    sums_orig = {0: 0.0, 1: 0.0}
    sums_alt = {0: 0.0, 1: 0.0}
    counts = {0: 0, 1: 0}
    for fold_index, yhat, yhat_alt, groups in per_fold:
        result = _fold_result(fold_index, yhat, yhat_alt, groups)
        if result is None:
            skipped.append(fold_index)
            warnings.warn(
                f"attribute {attribute!r}, learner {learner_name!r}: "
                f"empty group in fold {fold_index}; fold skipped",
                stacklevel=2,
            )
            continue
        folds.append(result)
        for g in (0, 1):
            mask = groups == g
            sums_orig[g] += float(yhat[mask].sum())
            sums_alt[g] += float(yhat_alt[mask].sum())
            counts[g] += int(mask.sum())
    if not folds:
        raise ConfigError(
            f"attribute {attribute!r}: every fold had an empty group; cannot audit"
        )
    kl_values = [v for f in folds for v in f.kl_values]
    average_kl = float(np.mean(kl_values))
    return AttributeResult(
        attribute=attribute,
        learner_name=learner_name,
        folds=tuple(folds),
        skipped_folds=tuple(skipped),
        group_mean_original={g: sums_orig[g] / counts[g] for g in (0, 1)},
        group_mean_alternated={g: sums_alt[g] / counts[g] for g in (0, 1)},
        average_kl=average_kl,
        pba_flag=classify_pba(max(average_kl, 0.0), threshold),
    )


def _flip_column(X: np.ndarray, j: int) -> np.ndarray:
    out = X.copy()
    out[:, j] = 1.0 - out[:, j]
    return out


def run_audit(frame: Frame, config: AuditConfig, n_threads: int = 1) -> AuditReport:
    """Run the full audit and return the report; deterministic under the seed."""
    for spec in config.pba_specs:
        col = frame.column(spec.attribute)
        if not set(np.unique(col)) <= {0.0, 1.0}:
            raise ConfigError(f"attributes: column {spec.attribute!r} is not binary")

    X = frame.feature_matrix()
    y = frame.target
    plan = make_folds(len(y), config.k, config.seed)
    folds = [(plan.train_indices(f), plan.test_indices(f)) for f in range(config.k)]
    attr_cols = {s.attribute: frame.column_index(s.attribute) for s in config.pba_specs}

    # every distinct config to fit: stack members may coincide with learners
    all_configs = list(dict.fromkeys(list(config.learners)
                                     + (list(config.stack.members) if config.stack else [])))
    fit_tasks: list[tuple] = []  # (config, fold, alt_attr or None)
    for cfg in all_configs:
        for f in range(config.k):
            fit_tasks.append((cfg, f, None))
            if config.mode == "retrain-alternated":
                for spec in config.pba_specs:
                    fit_tasks.append((cfg, f, spec.attribute))

    def do_fit(task):
        cfg, f, alt_attr = task
        tr = folds[f][0]
        X_tr = X[tr]
        if alt_attr is not None:
            X_tr = _flip_column(X_tr, attr_cols[alt_attr])
        return fit(X_tr, y[tr], cfg, feature_names=frame.feature_names)

    if n_threads > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            fitted = dict(zip(fit_tasks, pool.map(do_fit, fit_tasks)))
    else:
        fitted = {task: do_fit(task) for task in fit_tasks}

    def predictions(cfgs, weights, f, alt_attr):
        """Test-fold predictions for a single learner or a weighted stack."""
        te = folds[f][1]
        X_te = X[te] if alt_attr is None else _flip_column(X[te], attr_cols[alt_attr])
        models = [fitted[(c, f, alt_attr if config.mode == "retrain-alternated" else None)]
                  for c in cfgs]
        if weights is None:
            return predict(models[0], X_te)
        return stack_predict(models, weights, X_te)

    def audit_one(cfgs, weights, name) -> list[AttributeResult]:
        orig = [predictions(cfgs, weights, f, None) for f in range(config.k)]
        out = []
        for spec in config.pba_specs:
            per_fold = []
            for f in range(config.k):
                te = folds[f][1]
                groups = frame.group_values(spec.attribute)[te].astype(np.int64)
                yhat_alt = predictions(cfgs, weights, f, spec.attribute)
                per_fold.append((f, orig[f], yhat_alt, groups))
            out.append(_aggregate(spec.attribute, name, per_fold, config.pba_threshold))
        return out

    results: list[AttributeResult] = []
    for learner in config.learners:
        results.extend(audit_one([learner], None, learner.name))

    stacked: list[AttributeResult] = []
    if config.stack is not None:
        flagged = _flagged_attributes(config, results)
        if flagged:
            stack_results = audit_one(
                list(config.stack.members), config.stack.weights, config.stack.name
            )
            stacked = [r for r in stack_results if r.attribute in flagged]

    actual = {}
    for spec in config.pba_specs:
        groups = frame.group_values(spec.attribute).astype(np.int64)
        actual[spec.attribute] = {
            g: float(y[groups == g].mean()) if (groups == g).any() else float("nan")
            for g in (0, 1)
        }

    return AuditReport(
        config=config,
        n_rows=frame.n_rows,
        actual_group_means=actual,
        results=tuple(results),
        stacked=tuple(stacked),
        metadata={"k": config.k, "seed": config.seed, "mode": config.mode},
    )


def _flagged_attributes(config: AuditConfig, results: Sequence[AttributeResult]) -> set:
    """Attributes the stacked run audits: flagged consistently by tree learners.

    When the learner suite has tree-family members, an attribute qualifies
    only if every tree-family learner flags it; otherwise any flag counts.
    """
    tree_names = {l.name for l in config.learners if l.kind in TREE_KINDS}
    flagged = set()
    for spec in config.pba_specs:
        rows = [r for r in results if r.attribute == spec.attribute]
        if tree_names:
            rows = [r for r in rows if r.learner_name in tree_names]
        if rows and all(r.pba_flag for r in rows):
            flagged.add(spec.attribute)
    return flagged


def bias_table(report: AuditReport) -> list[list[str]]:
    """Rows for the delimited bias table, 5-decimal fixed-point values.

    First block: one row per learner (plus the stack), one average-KL column
    per attribute in config order. Second block: per-attribute detail rows
    with actual, predicted and alternated group means.
    """
    attrs = [s.attribute for s in report.config.pba_specs]
    specs = {s.attribute: s for s in report.config.pba_specs}
    by_key = {(r.learner_name, r.attribute): r for r in report.results}

    def f5(v: float) -> str:
        return f"{v:.5f}"

    rows: list[list[str]] = [["learner"] + attrs]
    for learner in report.config.learners:
        row = [learner.name]
        for a in attrs:
            row.append(f5(by_key[(learner.name, a)].average_kl))
        rows.append(row)
    if report.stacked:
        stacked_by_attr = {r.attribute: r for r in report.stacked}
        row = [report.stacked[0].learner_name]
        for a in attrs:
            row.append(f5(stacked_by_attr[a].average_kl) if a in stacked_by_attr else "")
        rows.append(row)

    rows.append([])
    rows.append(["attribute", "learner", "group", "actual_mean",
                 "predicted_mean", "alternated_mean", "average_kl"])
    all_results = list(report.results) + list(report.stacked)
    for a in attrs:
        for r in [r for r in all_results if r.attribute == a]:
            for g in (0, 1):
                rows.append([
                    a,
                    r.learner_name,
                    specs[a].group_name(g),
                    f5(report.actual_group_means[a][g]),
                    f5(r.group_mean_original[g]),
                    f5(r.group_mean_alternated[g]),
                    f5(r.average_kl),
                ])
    return rows
