"""Synthetic wage populations with controllable injected attribute bias.

Used as a ground-truth oracle for the audit pipeline: the injected gap per
binary attribute is known exactly, so the audit's divergence scores can be
checked against it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .ingest import ColumnSpec, Frame, Schema


@dataclass(frozen=True)
class BinaryAttribute:
    name: str
    prevalence: float  # P(value == 1)
    gap: float  # wage units added when value == 1
    feature_shift: float = 0.0  # optional mean shift of numeric features when 1

    def __post_init__(self):
        if not (0.0 < self.prevalence < 1.0):
            raise ConfigError(
                f"prevalence: must be in (0, 1), got {self.prevalence} for {self.name!r}"
            )


@dataclass(frozen=True)
class SynthSpec:
    n_rows: int
    coefficients: tuple[float, ...]  # one per numeric feature
    attributes: tuple[BinaryAttribute, ...]
    base_wage: float = 800.0
    noise_sigma: float = 50.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(float(c) for c in self.coefficients))
        object.__setattr__(self, "attributes", tuple(self.attributes))
        if self.n_rows < 1:
            raise ConfigError(f"n_rows: must be >= 1, got {self.n_rows}")
        if self.noise_sigma < 0:
            raise ConfigError(f"noise_sigma: must be >= 0, got {self.noise_sigma}")
        names = [a.name for a in self.attributes]
        if len(set(names)) != len(names):
            raise ConfigError("attributes: duplicate attribute names")

    @classmethod
    def from_json(cls, path: str | Path) -> "SynthSpec":
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        return cls(
            n_rows=doc["n_rows"],
            coefficients=tuple(doc.get("coefficients", ())),
            attributes=tuple(
                BinaryAttribute(
                    name=a["name"],
                    prevalence=a["prevalence"],
                    gap=a.get("gap", 0.0),
                    feature_shift=a.get("feature_shift", 0.0),
                )
                for a in doc.get("attributes", ())
            ),
            base_wage=doc.get("base_wage", 800.0),
            noise_sigma=doc.get("noise_sigma", 50.0),
            seed=doc.get("seed", 0),
        )


def generate(spec: SynthSpec) -> Frame:
    """Draw a deterministic synthetic Frame under the spec's seed.

    target = base_wage + sum(coef_i * x_i) + sum(gap_j * attr_j) + noise,
    with numeric features standard normal and attributes independent
    Bernoulli draws. Targets are floored just above zero so the Frame
    satisfies the positive-target invariant even under extreme noise.
    """
    rng = np.random.default_rng(spec.seed)
    n = spec.n_rows
    n_num = len(spec.coefficients)
    X = rng.standard_normal((n, n_num)) if n_num else np.empty((n, 0))
    attrs = {}
    for a in spec.attributes:
        attrs[a.name] = (rng.random(n) < a.prevalence).astype(np.float64)
        if a.feature_shift and n_num:
            X = X + np.outer(attrs[a.name], np.full(n_num, a.feature_shift))
    y = np.full(n, spec.base_wage, dtype=np.float64)
    if n_num:
        y += X @ np.asarray(spec.coefficients)
    for a in spec.attributes:
        y += a.gap * attrs[a.name]
    if spec.noise_sigma > 0:
        y += rng.normal(0.0, spec.noise_sigma, size=n)
    y = np.maximum(y, 1e-6)

    names = tuple(f"num_{j}" for j in range(n_num)) + tuple(a.name for a in spec.attributes)
    columns = tuple(X[:, j].copy() for j in range(n_num)) + tuple(
        attrs[a.name] for a in spec.attributes
    )
    binary = frozenset(a.name for a in spec.attributes)
    return Frame(
        feature_names=names,
        columns=columns,
        target=y,
        target_name="wage",
        binary_columns=binary,
        group_labels={name: attrs[name].copy() for name in binary},
    )


def schema_for(spec: SynthSpec) -> Schema:
    """Schema matching generate()'s CSV layout, for round-trips through ingest."""
    cols = [ColumnSpec(name=f"num_{j}", kind="numeric") for j in range(len(spec.coefficients))]
    cols += [ColumnSpec(name=a.name, kind="categorical-binary") for a in spec.attributes]
    cols.append(ColumnSpec(name="wage", kind="target"))
    return Schema(columns=tuple(cols))
