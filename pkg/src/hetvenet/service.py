"""Short-term mobile service amounts of V2I and V2V links.

The service amount of a link is the time integral of its per-RB AIR over
the prediction horizon, taken as a left Riemann sum over M steps: the rate
is accumulated at the current instant before positions advance. Tables are
kept per single RB; the scheduler applies RB shares.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from hetvenet.channel import RadioProfile, air_per_rb
from hetvenet.mobility import Scenario, trajectory

_CHUNK = 2048


@dataclass(frozen=True)
class ServiceTables:
    s_v2i_unit: np.ndarray  # (N,) bits per RB
    s_v2v_unit: np.ndarray  # (N, N) bits per RB, zero diagonal
    horizon: float
    steps: int

    @property
    def n(self) -> int:
        return len(self.s_v2i_unit)

    def scaled(self, factor: float) -> "ServiceTables":
        return ServiceTables(self.s_v2i_unit * factor, self.s_v2v_unit * factor, self.horizon, self.steps)


@dataclass(frozen=True)
class AirSnapshot:
    c_v2i_unit: np.ndarray  # (N,) per-RB AIR at t0
    c_v2v_unit: np.ndarray  # (N, N), zero diagonal

    @property
    def n(self) -> int:
        return len(self.c_v2i_unit)


def _v2v_distances(xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    # (N, N, M); hypot of negated differences is bitwise identical, so the
    # result is exactly symmetric
    return np.hypot(xs[:, None, :] - xs[None, :, :], ys[:, None, :] - ys[None, :, :])


def _link_rates(scenario: Scenario, lte: RadioProfile, dsrc: RadioProfile, xs, ys):
    infra = scenario.infrastructure
    d_v2i = np.maximum(np.hypot(xs - infra.x, ys - infra.y), lte.d_min)
    d_v2v = np.maximum(_v2v_distances(xs, ys), dsrc.d_min)
    c_v2i = air_per_rb(lte, d_v2i)
    c_v2v = air_per_rb(dsrc, d_v2v)
    idx = np.arange(scenario.n)
    c_v2v[idx, idx, ...] = 0.0
    return c_v2i, c_v2v


def compute_service_tables(scenario: Scenario, lte: RadioProfile, dsrc: RadioProfile) -> ServiceTables:
    xs, ys = trajectory(scenario)
    n = scenario.n
    s_v2i = np.zeros(n)
    s_v2v = np.zeros((n, n))
    # fixed chunking keeps memory bounded for large M and the summation
    # order independent of N
    for start in range(0, scenario.steps, _CHUNK):
        sl = slice(start, start + _CHUNK)
        c_v2i, c_v2v = _link_rates(scenario, lte, dsrc, xs[:, sl], ys[:, sl])
        s_v2i += c_v2i.sum(axis=-1)
        s_v2v += c_v2v.sum(axis=-1)
    dt = scenario.dt
    return ServiceTables(s_v2i * dt, s_v2v * dt, scenario.horizon, scenario.steps)


def compute_air_snapshot(scenario: Scenario, lte: RadioProfile, dsrc: RadioProfile) -> AirSnapshot:
    x, y, _ = scenario.arrays()
    c_v2i, c_v2v = _link_rates(scenario, lte, dsrc, x[:, None], y[:, None])
    return AirSnapshot(c_v2i[:, 0], c_v2v[:, :, 0])


def dump_service_csv(tables: ServiceTables, path) -> None:
    """Write the service tables as a CSV matrix.

    Row ``i`` holds vehicle i's per-RB V2I service followed by its V2V
    service towards every vehicle j.
    """
    n = tables.n
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["vehicle", "v2i"] + [f"v2v_{j + 1}" for j in range(n)])
        for i in range(n):
            row = [tables.s_v2i_unit[i]] + list(tables.s_v2v_unit[i])
            writer.writerow([i + 1] + [f"{val:.12g}" for val in row])
