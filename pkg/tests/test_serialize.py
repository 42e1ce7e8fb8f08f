import numpy as np
import pytest

from fairscope import (
    LearnerConfig,
    fit,
    load_model,
    model_from_dict,
    model_to_dict,
    predict,
    save_model,
)


def make_data():
    rng = np.random.default_rng(21)
    X = rng.normal(size=(120, 4))
    y = X @ np.array([2.0, -1.0, 0.5, 0.0]) + 10 + rng.normal(size=120)
    return X, y


CONFIGS = {
    "ols": LearnerConfig(kind="ols"),
    "lasso": LearnerConfig(kind="lasso", lambda_l1=0.05),
    "tree": LearnerConfig(kind="tree", max_depth=5),
    "forest": LearnerConfig(kind="forest", n_estimators=6, max_depth=4,
                            subsample=0.8, colsample=0.7, seed=3),
    "gbt": LearnerConfig(kind="gbt", n_estimators=15, max_depth=3,
                         learning_rate=0.2, subsample=0.9, colsample=0.8,
                         lambda_l2=1.0, alpha=0.1, seed=4),
}


@pytest.mark.parametrize("kind", sorted(CONFIGS))
class TestRoundTrip:
    def test_dict_round_trip_bit_exact(self, kind):
        X, y = make_data()
        model = fit(X, y, CONFIGS[kind])
        back = model_from_dict(model_to_dict(model))
        assert np.array_equal(predict(model, X), predict(back, X))

    def test_file_round_trip_bit_exact(self, kind, tmp_path):
        X, y = make_data()
        model = fit(X, y, CONFIGS[kind], feature_names=("a", "b", "c", "d"))
        path = tmp_path / f"{kind}.json"
        save_model(model, path)
        back = load_model(path)
        assert back.kind == model.kind
        assert back.feature_names == model.feature_names
        assert back.config == model.config
        grid = np.random.default_rng(22).normal(size=(40, 4))
        assert np.array_equal(predict(model, grid), predict(back, grid))

    def test_saved_payload_echoes_config(self, kind):
        X, y = make_data()
        model = fit(X, y, CONFIGS[kind])
        doc = model_to_dict(model)
        assert doc["format_version"] == 1
        assert doc["config"]["kind"] == CONFIGS[kind].kind


class TestRefitEquivalence:
    def test_reloaded_model_usable_for_new_rows(self, tmp_path):
        X, y = make_data()
        model = fit(X, y, CONFIGS["gbt"])
        path = tmp_path / "m.json"
        save_model(model, path)
        back = load_model(path)
        fresh = np.random.default_rng(23).normal(size=(10, 4))
        assert np.array_equal(predict(model, fresh), predict(back, fresh))
