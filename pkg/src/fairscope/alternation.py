"""Flipping a binary protected attribute, and the bias flag on audit scores."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import ConfigError, DataError
from .ingest import Frame

DEFAULT_PBA_THRESHOLD = 0.05


@dataclass(frozen=True)
class AlternationSpec:
    """Which binary column to flip, plus human-readable group names."""

    attribute: str
    group_names: Mapping[int, str] = field(default_factory=dict)

    def group_name(self, value: int) -> str:
        return self.group_names.get(value, f"{self.attribute}={value}")


def alternate(frame: Frame, spec: AlternationSpec) -> Frame:
    """Return a new frame with the attribute's 0/1 values swapped on every row.

    All other columns, the target and the stored original group labels are
    untouched; applying alternate twice restores the input.
    """
    col = np.asarray(frame.column(spec.attribute))
    if col.dtype == object:
        raise DataError(f"column {spec.attribute!r} is not encoded yet")
    values = set(np.unique(col))
    if not values <= {0.0, 1.0}:
        raise DataError(
            f"column {spec.attribute!r} is not binary, found values {sorted(values)}"
        )
    return frame.replace_column(spec.attribute, 1.0 - col)


def classify_pba(avg_kl: float, threshold: float = DEFAULT_PBA_THRESHOLD) -> bool:
    """True when the average divergence reaches the configured threshold."""
    if avg_kl < 0:
        raise ConfigError(f"avg_kl: must be >= 0, got {avg_kl}")
    return avg_kl >= threshold
