"""Report emission: JSON document, delimited tables and SVG fold plots."""

from __future__ import annotations

import csv
import dataclasses
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .audit import AttributeResult, AuditConfig, AuditReport, bias_table

# stable id generation so repeat renders are byte-identical
plt.rcParams["svg.hashsalt"] = "fairscope"


def config_to_dict(config: AuditConfig) -> dict:
    return {
        "k": config.k,
        "seed": config.seed,
        "mode": config.mode,
        "pba_threshold": config.pba_threshold,
        "attributes": [
            {
                "name": s.attribute,
                "groups": {str(k): v for k, v in s.group_names.items()},
            }
            for s in config.pba_specs
        ],
        "learners": [dataclasses.asdict(l) for l in config.learners],
        "stack": None
        if config.stack is None
        else {
            "name": config.stack.name,
            "members": [dataclasses.asdict(m) for m in config.stack.members],
            "weights": list(config.stack.weights),
        },
    }


def _attribute_result_to_dict(r: AttributeResult) -> dict:
    return {
        "attribute": r.attribute,
        "learner": r.learner_name,
        "average_kl": r.average_kl,
        "pba_flag": r.pba_flag,
        "group_mean_original": {str(g): r.group_mean_original[g] for g in (0, 1)},
        "group_mean_alternated": {str(g): r.group_mean_alternated[g] for g in (0, 1)},
        "skipped_folds": list(r.skipped_folds),
        "folds": [
            {
                "fold": f.fold_index,
                "p": {
                    str(g): {"mu": f.p[g].mu, "sigma": f.p[g].sigma, "count": f.p[g].count}
                    for g in (0, 1)
                },
                "q": {
                    str(g): {"mu": f.q[g].mu, "sigma": f.q[g].sigma, "count": f.q[g].count}
                    for g in (0, 1)
                },
                "kl": {str(g): f.kl[g] for g in (0, 1)},
            }
            for f in r.folds
        ],
    }


def report_to_dict(report: AuditReport) -> dict:
    return {
        "config": config_to_dict(report.config),
        "n_rows": report.n_rows,
        "actual_group_means": {
            attr: {str(g): means[g] for g in (0, 1)}
            for attr, means in report.actual_group_means.items()
        },
        "results": [_attribute_result_to_dict(r) for r in report.results],
        "stacked": [_attribute_result_to_dict(r) for r in report.stacked],
        "metadata": dict(report.metadata),
    }


def write_report_json(report: AuditReport, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        json.dump(report_to_dict(report), fh, indent=2)
        fh.write("\n")


def write_rows_csv(rows: list[list[str]], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        csv.writer(fh, lineterminator="\n").writerows(rows)


def write_bias_table(report: AuditReport, path: str | Path) -> None:
    write_rows_csv(bias_table(report), path)


def safe_name(name: str) -> str:
    return "".join(c if c.isalnum() or c in "-_" else "_" for c in name)


def write_fold_csv(report: AuditReport, attribute: str, path: str | Path) -> None:
    """Per-fold group means (original and alternated) and both KL directions."""
    rows = [[
        "learner", "fold",
        "group0_mean", "group0_alternated_mean",
        "group1_mean", "group1_alternated_mean",
        "kl_group0", "kl_group1",
    ]]
    for r in list(report.results) + list(report.stacked):
        if r.attribute != attribute:
            continue
        for f in r.folds:
            rows.append([
                r.learner_name, str(f.fold_index),
                f"{f.p[0].mu:.5f}", f"{f.q[0].mu:.5f}",
                f"{f.p[1].mu:.5f}", f"{f.q[1].mu:.5f}",
                f"{f.kl[0]:.5f}", f"{f.kl[1]:.5f}",
            ])
    write_rows_csv(rows, path)


def plot_attribute(
    report: AuditReport, attribute: str, path: str | Path, deterministic: bool = False
) -> None:
    """Three-panel figure: per-fold mean prediction for each group and KL.

    Solid lines are original predictions, dashed lines alternated ones; one
    color per learner (stack included when present).
    """
    spec = next(s for s in report.config.pba_specs if s.attribute == attribute)
    results = [r for r in list(report.results) + list(report.stacked)
               if r.attribute == attribute]
    fig, axes = plt.subplots(3, 1, figsize=(8, 10), sharex=True)
    for r in results:
        folds = [f.fold_index for f in r.folds]
        for g, ax in ((0, axes[0]), (1, axes[1])):
            line, = ax.plot(folds, [f.p[g].mu for f in r.folds],
                            label=f"{r.learner_name}")
            ax.plot(folds, [f.q[g].mu for f in r.folds],
                    linestyle="--", color=line.get_color())
        axes[2].plot(folds, [(f.kl[0] + f.kl[1]) / 2 for f in r.folds],
                     label=r.learner_name)
    axes[0].set_ylabel(f"mean prediction: {spec.group_name(0)}")
    axes[1].set_ylabel(f"mean prediction: {spec.group_name(1)}")
    axes[2].set_ylabel("KL divergence")
    axes[2].set_xlabel("fold")
    axes[0].set_title(f"{attribute}: predictions per fold (dashed = alternated)")
    axes[0].legend(loc="best", fontsize="small")
    fig.tight_layout()
    metadata = {"Date": None} if deterministic else None
    fig.savefig(path, format="svg", metadata=metadata)
    plt.close(fig)


def write_artifacts(
    report: AuditReport, out_dir: str | Path, deterministic: bool = False
) -> list[Path]:
    """Write report.json, bias_table.csv and per-attribute CSVs and SVGs."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    artifacts = []

    path = out_dir / "report.json"
    write_report_json(report, path)
    artifacts.append(path)

    path = out_dir / "bias_table.csv"
    write_bias_table(report, path)
    artifacts.append(path)

    for spec in report.config.pba_specs:
        tag = safe_name(spec.attribute)
        path = out_dir / f"folds_{tag}.csv"
        write_fold_csv(report, spec.attribute, path)
        artifacts.append(path)
        path = out_dir / f"fig_{tag}.svg"
        plot_attribute(report, spec.attribute, path, deterministic=deterministic)
        artifacts.append(path)
    return artifacts
