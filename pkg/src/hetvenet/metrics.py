"""Evaluation metrics: FV throughput, minimum vehicle rate, Jain's index."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from hetvenet.scheduler import EffectiveService, Schedule, Scheme


class UndefinedFairnessError(ValueError):
    """Jain's index is undefined when every allocation is zero."""


def jain_index(values) -> float:
    """(sum x)^2 / (N * sum x^2); 1 for equal shares, 1/N for a single recipient."""
    x = np.asarray(values, dtype=float)
    if x.size == 0 or not np.any(x > 0):
        raise UndefinedFairnessError("Jain's index needs at least one positive value")
    if np.any(x < 0):
        raise ValueError("Jain's index is defined for nonnegative values only")
    # normalise first so squares cannot overflow or underflow
    x = x / x.max()
    fi = math.fsum(x) ** 2 / (x.size * math.fsum(x * x))
    return min(1.0, max(1.0 / x.size, fi))


def total_fv_throughput(eff: EffectiveService, schedule: Schedule, T: float,
                        comparison_ids: Iterable[int] | None = None) -> float:
    """Summed rate of the far vehicles, in bits/s.

    By default the FVs of ``schedule`` are summed. Passing ``comparison_ids``
    evaluates a fixed population instead, which is how schemes without FVs
    (no relaying) are compared.
    """
    if not T > 0:
        raise ValueError(f"horizon must be positive, got {T}")
    ids = schedule.far_vehicles if comparison_ids is None else tuple(comparison_ids)
    return math.fsum(float(eff.per_vehicle[i - 1]) for i in ids) / T


@dataclass(frozen=True)
class SchemeResult:
    scheme: Scheme
    total_fv_service: float  # bits/s over the comparison set
    min_vn_rate: float
    jain_index: float
    per_vehicle_rates: tuple[float, ...]

    @property
    def n(self) -> int:
        return len(self.per_vehicle_rates)


def summarize(eff: EffectiveService, schedule: Schedule, T: float,
              comparison_ids: Iterable[int] | None = None) -> SchemeResult:
    rates = eff.per_vehicle / T
    try:
        fi = jain_index(eff.per_vehicle)
    except UndefinedFairnessError:
        fi = float("nan")
    return SchemeResult(
        scheme=schedule.scheme,
        total_fv_service=total_fv_throughput(eff, schedule, T, comparison_ids),
        min_vn_rate=float(rates.min()),
        jain_index=fi,
        per_vehicle_rates=tuple(float(r) for r in rates),
    )
