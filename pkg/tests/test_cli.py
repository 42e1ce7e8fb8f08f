import hashlib
import json
from pathlib import Path

import pytest

from fairscope.cli import (
    EXIT_CONFIG,
    EXIT_DATA,
    EXIT_NETWORK,
    EXIT_OK,
    main,
)

DATA_DIR = Path(__file__).parent / "data"
MINI_CSV = DATA_DIR / "mini_wages.csv"
MINI_CONFIG = DATA_DIR / "mini_audit.json"


def sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def run_audit_cli(tmp_path, out_name, *extra):
    out = tmp_path / out_name
    code = main(["audit", "--config", str(MINI_CONFIG), "--data", str(MINI_CSV),
                 "--out", str(out), *extra])
    return code, out


class TestAudit:
    def test_golden_run_produces_artifacts(self, tmp_path):
        code, out = run_audit_cli(tmp_path, "run")
        assert code == EXIT_OK
        names = {p.name for p in out.iterdir()}
        assert "report.json" in names
        assert "bias_table.csv" in names
        assert "manifest.json" in names
        assert "folds_gender.csv" in names
        assert "fig_gender.svg" in names
        assert "folds_region.csv" in names
        assert "fig_region.svg" in names

    def test_report_content_sane(self, tmp_path):
        code, out = run_audit_cli(tmp_path, "run")
        report = json.loads((out / "report.json").read_text())
        assert report["n_rows"] == 495  # 500 minus the 99th-percentile wage trim
        by_key = {(r["learner"], r["attribute"]): r for r in report["results"]}
        gbt_gender = by_key[("gbt", "gender")]
        assert gbt_gender["pba_flag"] is True
        assert gbt_gender["average_kl"] > 0.05
        gbt_region = by_key[("gbt", "region")]
        assert gbt_region["pba_flag"] is False
        assert len(report["stacked"]) == 1
        assert report["stacked"][0]["attribute"] == "gender"

    def test_manifest_records_inputs(self, tmp_path):
        code, out = run_audit_cli(tmp_path, "run")
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["config_digest"] == sha256(MINI_CONFIG)
        assert manifest["dataset_digest"] == sha256(MINI_CSV)
        assert manifest["seed"] == 1
        assert manifest["k"] == 3
        assert "timestamp" in manifest
        assert set(manifest["artifacts"]) <= {p.name for p in out.iterdir()}

    def test_deterministic_runs_byte_identical(self, tmp_path):
        _, out1 = run_audit_cli(tmp_path, "run1", "--deterministic")
        _, out2 = run_audit_cli(tmp_path, "run2", "--deterministic")
        for p1 in sorted(out1.iterdir()):
            if p1.name == "manifest.json":
                continue  # echoes the differing --out path
            assert sha256(p1) == sha256(out2 / p1.name), p1.name

    def test_thread_count_does_not_change_artifacts(self, tmp_path):
        _, out1 = run_audit_cli(tmp_path, "t1", "--deterministic", "--threads", "1")
        _, out4 = run_audit_cli(tmp_path, "t4", "--deterministic", "--threads", "4")
        for p1 in sorted(out1.iterdir()):
            if p1.name == "manifest.json":
                continue
            assert sha256(p1) == sha256(out4 / p1.name), p1.name

    def test_fold_override_too_small_is_config_error(self, tmp_path, capsys):
        code, _ = run_audit_cli(tmp_path, "bad", "--folds", "1")
        assert code == EXIT_CONFIG
        assert "k" in capsys.readouterr().err

    def test_missing_config_file(self, tmp_path, capsys):
        code = main(["audit", "--config", str(tmp_path / "nope.json"),
                     "--data", str(MINI_CSV), "--out", str(tmp_path / "o")])
        assert code == EXIT_CONFIG
        assert "not found" in capsys.readouterr().err

    def test_malformed_csv_is_data_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        header = MINI_CSV.read_text().splitlines()[0]
        bad.write_text(header + "\nnot,a,number,at,all\n")
        code = main(["audit", "--config", str(MINI_CONFIG), "--data", str(bad),
                     "--out", str(tmp_path / "o")])
        assert code == EXIT_DATA

    def test_threads_env_fallback(self, tmp_path, monkeypatch):
        monkeypatch.setenv("FAIRSCOPE_THREADS", "2")
        code, _ = run_audit_cli(tmp_path, "env")
        assert code == EXIT_OK

    def test_bad_threads_env(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("FAIRSCOPE_THREADS", "lots")
        code, _ = run_audit_cli(tmp_path, "envbad")
        assert code == EXIT_CONFIG


class TestFetch:
    def test_happy_path_and_cache(self, tmp_path, capsys):
        src = tmp_path / "remote.csv"
        src.write_text("a,b\n1,2\n")
        digest = sha256(src)
        dest = tmp_path / "local.csv"
        url = src.as_uri()
        assert main(["fetch", "--url", url, "--sha256", digest, "--out", str(dest)]) == EXIT_OK
        assert dest.read_text() == src.read_text()
        # second call hits the digest cache and leaves the file untouched
        mtime = dest.stat().st_mtime_ns
        assert main(["fetch", "--url", url, "--sha256", digest, "--out", str(dest)]) == EXIT_OK
        assert dest.stat().st_mtime_ns == mtime

    def test_digest_mismatch(self, tmp_path, capsys):
        src = tmp_path / "remote.csv"
        src.write_text("a,b\n1,2\n")
        dest = tmp_path / "local.csv"
        code = main(["fetch", "--url", src.as_uri(), "--sha256", "0" * 64,
                     "--out", str(dest)])
        assert code == EXIT_NETWORK
        assert not dest.exists()

    def test_unreachable_url(self, tmp_path, capsys):
        code = main(["fetch", "--url", (tmp_path / "missing.csv").as_uri(),
                     "--sha256", "0" * 64, "--out", str(tmp_path / "d.csv")])
        assert code == EXIT_NETWORK


class TestTune:
    def _config(self, tmp_path, budget=2, seed=3):
        doc = {
            "schema": str(DATA_DIR / "mini_wages.schema.json"),
            "kind": "gbt",
            "budget": budget,
            "k": 2,
            "seed": seed,
            "space": {
                "max_depth": {"type": "int", "lo": 2, "hi": 4},
                "n_estimators": {"type": "int", "lo": 5, "hi": 15},
                "learning_rate": {"type": "float", "lo": 0.05, "hi": 0.3, "log": True},
            },
        }
        path = tmp_path / "tune.json"
        path.write_text(json.dumps(doc))
        return path

    def test_writes_result_with_argmin(self, tmp_path):
        cfg = self._config(tmp_path, budget=3)
        out = tmp_path / "tuned.json"
        code = main(["tune", "--config", str(cfg), "--data", str(MINI_CSV),
                     "--out", str(out)])
        assert code == EXIT_OK
        doc = json.loads(out.read_text())
        assert len(doc["trials"]) == 3
        assert doc["best_cv_rmse"] == min(t["cv_rmse"] for t in doc["trials"])

    def test_deterministic(self, tmp_path):
        cfg = self._config(tmp_path)
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        main(["tune", "--config", str(cfg), "--data", str(MINI_CSV), "--out", str(a)])
        main(["tune", "--config", str(cfg), "--data", str(MINI_CSV), "--out", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_missing_kind_is_config_error(self, tmp_path, capsys):
        path = tmp_path / "tune.json"
        path.write_text(json.dumps({"budget": 1}))
        code = main(["tune", "--config", str(path), "--data", str(MINI_CSV),
                     "--out", str(tmp_path / "o.json")])
        assert code == EXIT_CONFIG
        assert "kind" in capsys.readouterr().err


class TestSynth:
    def test_writes_csv_and_schema(self, tmp_path):
        spec = {
            "n_rows": 50,
            "coefficients": [10.0],
            "attributes": [{"name": "g", "prevalence": 0.5, "gap": 100.0}],
            "seed": 4,
        }
        spec_path = tmp_path / "spec.json"
        spec_path.write_text(json.dumps(spec))
        out = tmp_path / "pop.csv"
        code = main(["synth", "--spec", str(spec_path), "--out", str(out)])
        assert code == EXIT_OK
        assert out.exists()
        schema_doc = json.loads((tmp_path / "pop.csv.schema.json").read_text())
        names = [c["name"] for c in schema_doc["columns"]]
        assert names == ["num_0", "g", "wage"]
        assert len(out.read_text().splitlines()) == 51  # header + rows

    def test_bad_spec_is_config_error(self, tmp_path, capsys):
        spec_path = tmp_path / "spec.json"
        spec_path.write_text(json.dumps({"n_rows": 0}))
        code = main(["synth", "--spec", str(spec_path), "--out", str(tmp_path / "p.csv")])
        assert code == EXIT_CONFIG
