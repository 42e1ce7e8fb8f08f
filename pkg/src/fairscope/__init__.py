"""fairscope: counterfactual bias audits for tabular wage-regression models."""

__version__ = "0.1.0"

from .alternation import AlternationSpec, alternate, classify_pba
from .audit import (
    AttributeResult,
    AuditConfig,
    AuditReport,
    FoldResult,
    bias_table,
    run_audit,
    run_fold,
)
from .divergence import SIGMA_FLOOR, GroupDensity, fit_normal, kl_gaussian
from .ensemble import StackSpec, stack_predict
from .ingest import (
    ColumnSpec,
    FoldPlan,
    Frame,
    PreprocessSummary,
    Schema,
    fetch_dataset,
    load_csv,
    make_folds,
    preprocess,
    write_csv,
)
from .learners import (
    DEFAULT_GBT_SPACE,
    PRESETS,
    HyperSpace,
    LearnerConfig,
    Model,
    ParamRange,
    TuneResult,
    cv_rmse,
    fit,
    fit_forest,
    fit_gbt,
    fit_lasso,
    fit_ols,
    fit_tree,
    load_model,
    model_from_dict,
    model_to_dict,
    predict,
    preset,
    save_model,
    tune,
)
from .synth import BinaryAttribute, SynthSpec, generate, schema_for

__all__ = [
    "__version__",
    "AlternationSpec",
    "alternate",
    "classify_pba",
    "AttributeResult",
    "AuditConfig",
    "AuditReport",
    "FoldResult",
    "bias_table",
    "run_audit",
    "run_fold",
    "SIGMA_FLOOR",
    "GroupDensity",
    "fit_normal",
    "kl_gaussian",
    "StackSpec",
    "stack_predict",
    "ColumnSpec",
    "FoldPlan",
    "Frame",
    "PreprocessSummary",
    "Schema",
    "fetch_dataset",
    "load_csv",
    "make_folds",
    "preprocess",
    "write_csv",
    "DEFAULT_GBT_SPACE",
    "PRESETS",
    "HyperSpace",
    "cv_rmse",
    "model_from_dict",
    "model_to_dict",
    "LearnerConfig",
    "Model",
    "ParamRange",
    "TuneResult",
    "fit",
    "fit_forest",
    "fit_gbt",
    "fit_lasso",
    "fit_ols",
    "fit_tree",
    "load_model",
    "predict",
    "preset",
    "save_model",
    "tune",
    "BinaryAttribute",
    "SynthSpec",
    "generate",
    "schema_for",
]
