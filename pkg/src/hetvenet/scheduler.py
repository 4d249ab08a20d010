"""Relay/far-vehicle scheduling schemes.

Every scheme works on candidate partitions indexed by the number of far
vehicles ``n_f`` in ``0..N//2``. For a given ``n_f`` the far vehicles (FVs)
are the ``n_f`` vehicles with the smallest RB-scaled V2I service (ties to the
lowest id) and all others are relay candidates (RVs). Schemes differ in how
FVs are matched to RVs and how ``n_f`` is picked.

Vehicle ids in schedules are 1-based; arrays are indexed by ``id - 1``.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np
from scipy.optimize import linear_sum_assignment

from hetvenet.channel import rb_share
from hetvenet.service import AirSnapshot, ServiceTables


class ScheduleError(ValueError):
    """Raised for a schedule that violates the partition invariants."""


class Scheme(str, enum.Enum):
    MS_MAXMIN = "MS-MAXMIN"
    AR_MAXMIN = "AR-MAXMIN"
    MS_MAXSUM = "MS-MAXSUM"
    AR_MAXSUM = "AR-MAXSUM"
    RANDOM = "RANDOM"
    NO_RELAY = "NO-RELAY"

    @classmethod
    def parse(cls, name: str) -> "Scheme":
        key = name.strip().upper().replace("_", "-")
        for scheme in cls:
            if scheme.value == key:
                return scheme
        raise ValueError(f"unknown scheme {name!r}; expected one of {[s.value for s in cls]}")


ALL_SCHEMES = tuple(Scheme)


@dataclass(frozen=True)
class Schedule:
    scheme: Scheme
    n: int
    n_f: int
    pairs: tuple[tuple[int, int], ...]  # (relay_id, fv_id)

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple((int(r), int(f)) for r, f in self.pairs))
        if len(self.pairs) != self.n_f:
            raise ScheduleError(f"n_f={self.n_f} but {len(self.pairs)} pairs given")
        if not 0 <= self.n_f <= self.n // 2:
            raise ScheduleError(f"n_f={self.n_f} outside 0..{self.n // 2}")
        ids = [i for pair in self.pairs for i in pair]
        if len(set(ids)) != len(ids):
            raise ScheduleError(f"a vehicle appears twice in pairs {self.pairs}")
        if any(not 1 <= i <= self.n for i in ids):
            raise ScheduleError(f"pair ids outside 1..{self.n}: {self.pairs}")

    @property
    def relays(self) -> tuple[int, ...]:
        return tuple(r for r, _ in self.pairs)

    @property
    def far_vehicles(self) -> tuple[int, ...]:
        return tuple(f for _, f in self.pairs)

    @property
    def direct_set(self) -> frozenset[int]:
        return frozenset(range(1, self.n + 1)) - set(self.far_vehicles) - set(self.relays)

    def pairs_str(self) -> str:
        return ";".join(f"{r}:{f}" for r, f in self.pairs)


@dataclass(frozen=True)
class EffectiveService:
    per_vehicle: np.ndarray  # bits over the horizon, indexed by id - 1

    @property
    def m(self) -> float:
        return float(np.min(self.per_vehicle))

    @property
    def total(self) -> float:
        # fsum is order independent, so permuted schedules compare exactly
        return math.fsum(self.per_vehicle.tolist())


Inputs = Union[ServiceTables, AirSnapshot]


def _unit_arrays(inputs: Inputs) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(inputs, ServiceTables):
        return np.asarray(inputs.s_v2i_unit, float), np.asarray(inputs.s_v2v_unit, float)
    return np.asarray(inputs.c_v2i_unit, float), np.asarray(inputs.c_v2v_unit, float)


def _per_vehicle(v2i_unit, v2v_unit, pairs, n_lte: int, n_dsrc: int) -> np.ndarray:
    n = len(v2i_unit)
    lte_rb = rb_share(n_lte, n)
    out = lte_rb * v2i_unit
    if pairs:
        # relayed V2I leg runs on the FV's donated LTE share, so the RV's own
        # service is untouched
        dsrc_rb = rb_share(n_dsrc, len(pairs))
        for r, f in pairs:
            out[f - 1] = min(lte_rb * v2i_unit[r - 1], dsrc_rb * v2v_unit[r - 1, f - 1])
    return out


def effective_service(tables: ServiceTables, schedule: Schedule, n_lte: int, n_dsrc: int,
                      n: int | None = None) -> EffectiveService:
    """Per-vehicle service amounts realized by ``schedule``.

    Direct vehicles and relays get ``floor(n_lte/N)`` times their V2I
    service; a relayed FV gets the minimum of its relay's V2I leg and the
    V2V leg scaled by ``floor(n_dsrc/n_f)``.
    """
    n = tables.n if n is None else n
    if n != tables.n or schedule.n != n:
        raise ScheduleError(f"size mismatch: tables N={tables.n}, schedule N={schedule.n}, n={n}")
    if schedule.n_f != len(schedule.pairs):
        raise ScheduleError("n_f inconsistent with pairs")
    v2i, v2v = _unit_arrays(tables)
    return EffectiveService(_per_vehicle(v2i, v2v, schedule.pairs, n_lte, n_dsrc))


def far_vehicle_split(v2i_scaled: np.ndarray, n_f: int) -> tuple[list[int], list[int]]:
    """0-based (fvs, relays), both ascending, for candidate ``n_f``."""
    order = np.lexsort((np.arange(len(v2i_scaled)), v2i_scaled))
    fvs = sorted(order[:n_f].tolist())
    relays = sorted(order[n_f:].tolist())
    return fvs, relays


def greedy_pairs(v2v_scaled: np.ndarray, relays: Sequence[int], fvs: Sequence[int]) -> list[tuple[int, int]]:
    """Repeatedly pair the strongest remaining V2V link; 0-based (relay, fv).

    ``relays`` and ``fvs`` must be ascending so that row-major argmax breaks
    ties towards the lowest relay id, then the lowest FV id.
    """
    sub = v2v_scaled[np.ix_(relays, fvs)].astype(float)
    pairs = []
    for _ in range(len(fvs)):
        k = int(np.argmax(sub))
        row, col = divmod(k, sub.shape[1])
        pairs.append((relays[row], fvs[col]))
        sub[row, :] = -np.inf
        sub[:, col] = -np.inf
    return pairs


def _ids(pairs_0based) -> list[tuple[int, int]]:
    return [(r + 1, f + 1) for r, f in pairs_0based]


def _maxmin_decide(inputs: Inputs, n_lte: int, n_dsrc: int) -> tuple[int, list[tuple[int, int]]]:
    v2i, v2v = _unit_arrays(inputs)
    n = len(v2i)
    v2i_scaled = rb_share(n_lte, n) * v2i
    best_m, best = -np.inf, (0, [])
    for n_f in range(n // 2 + 1):
        fvs, relays = far_vehicle_split(v2i_scaled, n_f)
        v2v_scaled = rb_share(n_dsrc, n_f) * v2v
        pairs = _ids(greedy_pairs(v2v_scaled, relays, fvs))
        m = float(np.min(_per_vehicle(v2i, v2v, pairs, n_lte, n_dsrc)))
        if m > best_m:
            best_m, best = m, (n_f, pairs)
    return best


def _result(scheme, tables, n_f, pairs, n_lte, n_dsrc):
    schedule = Schedule(scheme, tables.n, n_f, tuple(pairs))
    return schedule, effective_service(tables, schedule, n_lte, n_dsrc)


def schedule_ms_maxmin(tables: ServiceTables, n_lte: int, n_dsrc: int):
    """Mobile-service max-min scheduling with greedy V2V matching.

    Sweeps ``n_f`` from 0 to N//2, greedily matches each candidate's FVs to
    relays by strongest V2V service, and keeps the candidate whose worst
    vehicle does best (ties to the smaller ``n_f``).
    """
    n_f, pairs = _maxmin_decide(tables, n_lte, n_dsrc)
    return _result(Scheme.MS_MAXMIN, tables, n_f, pairs, n_lte, n_dsrc)


def schedule_ar_maxmin(snapshot: AirSnapshot, n_lte: int, n_dsrc: int, tables: ServiceTables):
    """Max-min scheduling decided on t0 rates, scored on realized service."""
    n_f, pairs = _maxmin_decide(snapshot, n_lte, n_dsrc)
    return _result(Scheme.AR_MAXMIN, tables, n_f, pairs, n_lte, n_dsrc)


def _assignment_value(w: np.ndarray) -> float:
    if w.shape[0] == 0:
        return 0.0
    rows, cols = linear_sum_assignment(w, maximize=True)
    return math.fsum(w[rows, cols].tolist())


def canonical_assignment(w: np.ndarray, rel_tol: float = 1e-12) -> list[tuple[int, int]]:
    """Optimal row->column assignment of ``w`` with deterministic tie-breaking.

    Among (near-)optimal assignments, each row in ascending order takes the
    lowest column that still completes to an optimal assignment. Plain
    ``linear_sum_assignment`` picks among exact ties based on rounding noise,
    which would make decisions depend on the scale of the inputs.
    """
    n_rows, n_cols = w.shape
    target = _assignment_value(w)
    tol = rel_tol * max(abs(target), np.finfo(float).tiny)
    chosen: list[tuple[int, int]] = []
    fixed: list[float] = []
    free_cols = list(range(n_cols))
    for row in range(n_rows):
        rest_rows = np.arange(row + 1, n_rows)
        for col in free_cols:
            rest_cols = [c for c in free_cols if c != col]
            value = math.fsum(fixed + [w[row, col], _assignment_value(w[np.ix_(rest_rows, rest_cols)])])
            if value >= target - tol:
                chosen.append((row, col))
                fixed.append(w[row, col])
                free_cols = rest_cols
                break
        else:  # pragma: no cover - the LSA optimum itself always qualifies
            raise RuntimeError("no column keeps the assignment optimal")
    return chosen


def _maxsum_weights(v2i_scaled, v2v, relays, fvs, dsrc_rb) -> np.ndarray:
    # gain of FV j (rows) through relay i (columns)
    return np.minimum(v2i_scaled[relays][None, :], dsrc_rb * v2v[np.ix_(relays, fvs)].T)


def _maxsum_decide(inputs: Inputs, n_lte: int, n_dsrc: int) -> tuple[int, list[tuple[int, int]]]:
    v2i, v2v = _unit_arrays(inputs)
    n = len(v2i)
    v2i_scaled = rb_share(n_lte, n) * v2i
    best_total, best_n_f = -np.inf, 0
    for n_f in range(n // 2 + 1):
        fvs, relays = far_vehicle_split(v2i_scaled, n_f)
        pairs = []
        if n_f:
            w = _maxsum_weights(v2i_scaled, v2v, relays, fvs, rb_share(n_dsrc, n_f))
            rows, cols = linear_sum_assignment(w, maximize=True)
            pairs = [(relays[c] + 1, fvs[r] + 1) for r, c in zip(rows, cols)]
        total = math.fsum(_per_vehicle(v2i, v2v, pairs, n_lte, n_dsrc).tolist())
        if total > best_total:
            best_total, best_n_f = total, n_f
    if best_n_f == 0:
        return 0, []
    fvs, relays = far_vehicle_split(v2i_scaled, best_n_f)
    w = _maxsum_weights(v2i_scaled, v2v, relays, fvs, rb_share(n_dsrc, best_n_f))
    return best_n_f, [(relays[c] + 1, fvs[r] + 1) for r, c in canonical_assignment(w)]


def schedule_max_sum(inputs: Inputs, n_lte: int, n_dsrc: int, tables: ServiceTables | None = None):
    """Max-sum scheduling via optimal RV/FV assignment per candidate ``n_f``.

    With ``ServiceTables`` inputs this is MS-MAXSUM. With an ``AirSnapshot``
    it is AR-MAXSUM and ``tables`` must be given for scoring.
    """
    if isinstance(inputs, ServiceTables):
        scheme, tables = Scheme.MS_MAXSUM, inputs if tables is None else tables
    else:
        if tables is None:
            raise ValueError("AR-MAXSUM needs the realized service tables for scoring")
        scheme = Scheme.AR_MAXSUM
    n_f, pairs = _maxsum_decide(inputs, n_lte, n_dsrc)
    return _result(scheme, tables, n_f, pairs, n_lte, n_dsrc)


def schedule_random(tables: ServiceTables, n_lte: int, n_dsrc: int, rng_seed: int):
    rng = np.random.default_rng(rng_seed)
    n = tables.n
    n_f = int(rng.integers(0, n // 2 + 1))
    fvs = rng.choice(n, size=n_f, replace=False)
    others = np.setdiff1d(np.arange(n), fvs)
    relays = rng.choice(others, size=n_f, replace=False)
    pairs = [(int(r) + 1, int(f) + 1) for r, f in zip(relays, fvs)]
    return _result(Scheme.RANDOM, tables, n_f, pairs, n_lte, n_dsrc)


def schedule_no_relay(tables: ServiceTables, n_lte: int, n: int | None = None):
    n = tables.n if n is None else n
    schedule = Schedule(Scheme.NO_RELAY, n, 0, ())
    return schedule, effective_service(tables, schedule, n_lte, 0, n)


def run_scheme(scheme: Scheme, tables: ServiceTables, snapshot: AirSnapshot | None,
               n_lte: int, n_dsrc: int, rng_seed: int = 0):
    scheme = Scheme(scheme)
    if scheme is Scheme.MS_MAXMIN:
        return schedule_ms_maxmin(tables, n_lte, n_dsrc)
    if scheme is Scheme.AR_MAXMIN:
        return schedule_ar_maxmin(snapshot, n_lte, n_dsrc, tables)
    if scheme is Scheme.MS_MAXSUM:
        return schedule_max_sum(tables, n_lte, n_dsrc)
    if scheme is Scheme.AR_MAXSUM:
        return schedule_max_sum(snapshot, n_lte, n_dsrc, tables)
    if scheme is Scheme.RANDOM:
        return schedule_random(tables, n_lte, n_dsrc, rng_seed)
    return schedule_no_relay(tables, n_lte)


def _rule_consistent_assignments(v2i_scaled, n):
    """Yield (n_f, pairs) over every injective FV->RV map for each n_f."""
    for n_f in range(n // 2 + 1):
        fvs, relays = far_vehicle_split(v2i_scaled, n_f)
        for chosen in itertools.permutations(relays, n_f):
            yield n_f, [(r + 1, f + 1) for r, f in zip(chosen, fvs)]


def brute_force_maxmin(tables: ServiceTables, n_lte: int, n_dsrc: int) -> float:
    """Best achievable bottleneck over all assignments consistent with the FV rule.

    Exhaustive; intended for N <= 8.
    """
    v2i, v2v = _unit_arrays(tables)
    lte_rb = rb_share(n_lte, len(v2i))
    best = -math.inf
    for n_f, pairs in _rule_consistent_assignments(lte_rb * v2i, len(v2i)):
        dsrc_rb = rb_share(n_dsrc, n_f)
        values = [lte_rb * float(s) for s in v2i]
        for r, f in pairs:
            values[f - 1] = min(lte_rb * float(v2i[r - 1]), dsrc_rb * float(v2v[r - 1, f - 1]))
        best = max(best, min(values))
    return best


def brute_force_maxsum(tables: ServiceTables, n_lte: int, n_dsrc: int) -> float:
    """Best total service over all assignments consistent with the FV rule."""
    v2i, v2v = _unit_arrays(tables)
    lte_rb = rb_share(n_lte, len(v2i))
    best = -math.inf
    for n_f, pairs in _rule_consistent_assignments(lte_rb * v2i, len(v2i)):
        dsrc_rb = rb_share(n_dsrc, n_f)
        values = [lte_rb * float(s) for s in v2i]
        for r, f in pairs:
            values[f - 1] = min(lte_rb * float(v2i[r - 1]), dsrc_rb * float(v2v[r - 1, f - 1]))
        best = max(best, math.fsum(values))
    return best
