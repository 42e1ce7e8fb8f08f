from .config import PRESETS, LearnerConfig, preset
from .linear import fit_lasso, fit_ols, lasso_objective, soft_threshold
from .models import Model, predict
from .serialize import load_model, model_from_dict, model_to_dict, save_model
from .tree_models import fit, fit_forest, fit_gbt, fit_tree
from .trees import Tree, grow_tree
from .tuning import DEFAULT_GBT_SPACE, HyperSpace, ParamRange, TuneResult, cv_rmse, tune

__all__ = [
    "PRESETS",
    "LearnerConfig",
    "preset",
    "fit",
    "fit_ols",
    "fit_lasso",
    "fit_tree",
    "fit_forest",
    "fit_gbt",
    "lasso_objective",
    "soft_threshold",
    "Model",
    "predict",
    "Tree",
    "grow_tree",
    "model_to_dict",
    "model_from_dict",
    "save_model",
    "load_model",
    "HyperSpace",
    "ParamRange",
    "TuneResult",
    "DEFAULT_GBT_SPACE",
    "cv_rmse",
    "tune",
]
