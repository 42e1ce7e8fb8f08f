"""Command-line surface: fetch, audit, tune and synth subcommands.

Exit codes: 0 success, 1 internal error, 2 configuration error,
3 network or digest failure, 4 data error.
"""

from __future__ import annotations

import argparse
import dataclasses
import datetime
import hashlib
import json
import os
import sys
from pathlib import Path

from . import __version__
from .audit import AuditConfig, run_audit
from .errors import (
    ConfigError,
    DataError,
    DigestError,
    FairscopeError,
    NetworkError,
    SchemaError,
)
from .ingest import Schema, fetch_dataset, load_csv, preprocess, sha256_of, write_csv
from .learners import DEFAULT_GBT_SPACE, HyperSpace, tune
from .report import write_artifacts
from .synth import SynthSpec, generate, schema_for

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_CONFIG = 2
EXIT_NETWORK = 3
EXIT_DATA = 4

BUNDLED_SCHEMA = Path(__file__).parent / "data" / "census_kdd.schema.json"


def _load_json(path: Path, what: str) -> dict:
    if not path.exists():
        raise ConfigError(f"{what} file not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{what} file {path} is not valid JSON: {exc}") from exc


def _resolve_schema(doc: dict, config_path: Path) -> Schema:
    ref = doc.get("schema")
    if ref is None:
        return Schema.from_json(BUNDLED_SCHEMA)
    if isinstance(ref, dict):
        return Schema.from_dict(ref)
    schema_path = Path(ref)
    if not schema_path.is_absolute():
        schema_path = config_path.parent / schema_path
    if not schema_path.exists():
        raise ConfigError(f"schema: file not found: {schema_path}")
    return Schema.from_json(schema_path)


def _threads(args) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("FAIRSCOPE_THREADS")
    if env:
        try:
            return int(env)
        except ValueError:
            raise ConfigError(f"FAIRSCOPE_THREADS: not an integer: {env!r}") from None
    return 1


def cmd_fetch(args) -> int:
    dest = fetch_dataset(args.url, args.sha256, args.out)
    print(dest)
    return EXIT_OK


def cmd_audit(args) -> int:
    config_path = Path(args.config)
    doc = _load_json(config_path, "config")
    schema = _resolve_schema(doc, config_path)
    config = AuditConfig.from_dict(doc)
    if args.folds is not None:
        config = dataclasses.replace(config, k=args.folds)
    if args.seed is not None:
        config = dataclasses.replace(config, seed=args.seed)
    if args.mode is not None:
        config = dataclasses.replace(config, mode=args.mode)

    data_path = Path(args.data)
    frame = preprocess(load_csv(data_path, schema), schema)
    report = run_audit(frame, config, n_threads=_threads(args))

    out_dir = Path(args.out)
    artifacts = write_artifacts(report, out_dir, deterministic=args.deterministic)
    manifest = {
        "command": ["audit", "--config", str(args.config), "--data", str(args.data),
                    "--out", str(args.out)],
        "version": __version__,
        "config_digest": sha256_of(config_path),
        "dataset_digest": sha256_of(data_path),
        "seed": config.seed,
        "k": config.k,
        "mode": config.mode,
        "rows_audited": frame.n_rows,
        "preprocess": None
        if frame.summary is None
        else dataclasses.asdict(frame.summary),
        "artifacts": [str(p.relative_to(out_dir)) for p in artifacts],
    }
    if not args.deterministic:
        manifest["timestamp"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    manifest_path = out_dir / "manifest.json"
    with open(manifest_path, "w", encoding="utf-8", newline="") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    for p in artifacts + [manifest_path]:
        print(p)
    return EXIT_OK


def cmd_tune(args) -> int:
    config_path = Path(args.config)
    doc = _load_json(config_path, "tune config")
    schema = _resolve_schema(doc, config_path)
    kind = doc.get("kind")
    if kind is None:
        raise ConfigError("kind: tune config must name a learner kind")
    space = HyperSpace.from_dict(doc["space"]) if "space" in doc else DEFAULT_GBT_SPACE
    budget = int(doc.get("budget", 25))
    k = int(doc.get("k", 5))
    seed = int(doc.get("seed", 0))

    frame = preprocess(load_csv(Path(args.data), schema), schema)
    result = tune(kind, frame, space, budget=budget, k=k, seed=seed)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8", newline="") as fh:
        json.dump(result.to_dict(), fh, indent=2)
        fh.write("\n")
    print(out)
    return EXIT_OK


def cmd_synth(args) -> int:
    spec = SynthSpec.from_json(Path(args.spec))
    frame = generate(spec)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_csv(frame, out)
    schema_path = out.with_suffix(out.suffix + ".schema.json")
    with open(schema_path, "w", encoding="utf-8", newline="") as fh:
        json.dump(schema_for(spec).to_dict(), fh, indent=2)
        fh.write("\n")
    print(out)
    print(schema_path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fairscope",
        description="Counterfactual bias audit for tabular wage-regression models.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fetch", help="download a dataset and verify its sha256")
    p.add_argument("--url", required=True)
    p.add_argument("--sha256", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fetch)

    p = sub.add_parser("audit", help="run the bias audit and write artifacts")
    p.add_argument("--config", required=True, help="audit config JSON")
    p.add_argument("--data", required=True, help="input CSV")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--folds", type=int, default=None, help="override fold count")
    p.add_argument("--seed", type=int, default=None, help="override seed")
    p.add_argument("--mode", choices=["predict-alternated", "retrain-alternated"],
                   default=None)
    p.add_argument("--deterministic", action="store_true",
                   help="suppress timestamps for byte-identical artifacts")
    p.add_argument("--threads", type=int, default=None,
                   help="fit parallelism (FAIRSCOPE_THREADS as fallback)")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("tune", help="random-search hyperparameters by CV RMSE")
    p.add_argument("--config", required=True, help="tune config JSON")
    p.add_argument("--data", required=True, help="input CSV")
    p.add_argument("--out", required=True, help="output JSON path")
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("synth", help="generate a synthetic population CSV")
    p.add_argument("--spec", required=True, help="synthesis spec JSON")
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, SchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NetworkError, DigestError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NETWORK
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except FairscopeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
