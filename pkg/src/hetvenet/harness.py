"""Scenario generation, Monte-Carlo sweeps and CSV output."""

from __future__ import annotations

import csv
import io
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from hetvenet.channel import DSRC, LTE, RadioProfile
from hetvenet.metrics import SchemeResult, summarize
from hetvenet.mobility import Infrastructure, Scenario, VehicleState
from hetvenet.scheduler import ALL_SCHEMES, Scheme, run_scheme, schedule_ms_maxmin
from hetvenet.service import compute_air_snapshot, compute_service_tables

log = logging.getLogger(__name__)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RoadConfig:
    length: float = 3000.0
    lane_offsets: tuple[float, ...] = (0.0, 4.0)
    lane_directions: tuple[int, ...] = (1, -1)
    speed_max: float = 35.0
    speed_min: float = 5.0


@dataclass(frozen=True)
class ExperimentConfig:
    n_values: tuple[int, ...] = (10, 20, 30, 40)
    seeds_per_point: int = 200
    master_seed: int = 0
    road: RoadConfig = field(default_factory=RoadConfig)
    infra: Infrastructure = field(default_factory=Infrastructure)
    horizon: float = 1.0
    steps: int = 100
    lte: RadioProfile = LTE
    dsrc: RadioProfile = DSRC
    schemes: tuple[Scheme, ...] = ALL_SCHEMES
    output_path: str = "results.csv"

    def __post_init__(self):
        if not self.n_values or any(int(n) != n or n < 1 for n in self.n_values):
            raise ConfigError(f"n_values must be a nonempty list of positive integers, got {self.n_values}")
        if self.seeds_per_point < 1:
            raise ConfigError("seeds_per_point must be >= 1")
        road = self.road
        if len(road.lane_offsets) != len(road.lane_directions) or not road.lane_offsets:
            raise ConfigError("lane_offsets and lane_directions must have equal nonzero length")
        if any(d not in (1, -1) for d in road.lane_directions):
            raise ConfigError(f"lane directions must be +1 or -1, got {road.lane_directions}")
        if not 0 <= road.speed_min <= road.speed_max:
            raise ConfigError("need 0 <= speed_min <= speed_max")
        if not road.length > 0:
            raise ConfigError("road length must be positive")
        if not self.horizon > 0 or self.steps < 1:
            raise ConfigError("horizon must be positive and steps >= 1")
        if not self.schemes:
            raise ConfigError("at least one scheme must be enabled")


_RADIO_KEYS = {"F": "F", "d0": "d0", "alpha": "alpha", "ps": "Ps", "Ps": "Ps",
               "noise_power": "noise_power", "rb_pool": "rb_pool", "d_min": "d_min"}


def _take(section: dict, name: str, allowed: set[str]) -> dict:
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in [{name}]: {sorted(unknown)}")
    return section


def config_from_dict(data: dict) -> ExperimentConfig:
    """Build a config from parsed TOML; every key is optional."""
    data = dict(data)
    unknown = set(data) - {"experiment", "road", "infrastructure", "radio"}
    if unknown:
        raise ConfigError(f"unknown sections: {sorted(unknown)}")
    try:
        exp = _take(data.get("experiment", {}), "experiment",
                    {"n_values", "seeds_per_point", "master_seed", "horizon", "steps", "schemes", "output"})
        road_kw = _take(data.get("road", {}), "road", {f.name for f in fields(RoadConfig)})
        infra_kw = _take(data.get("infrastructure", {}), "infrastructure", {"x", "y", "coverage_radius"})
        radio = dict(data.get("radio", {}))
        shared_noise = radio.pop("noise_power", None)
        _take(radio, "radio", {"lte", "dsrc"})

        def profile(base: RadioProfile, name: str) -> RadioProfile:
            kw = _take(radio.get(name, {}), f"radio.{name}", set(_RADIO_KEYS))
            changes = {_RADIO_KEYS[k]: v for k, v in kw.items()}
            if shared_noise is not None:
                changes.setdefault("noise_power", shared_noise)
            return base.with_(**changes)

        road = RoadConfig(**{k: tuple(v) if isinstance(v, list) else v for k, v in road_kw.items()})
        kw = {}
        if "n_values" in exp:
            kw["n_values"] = tuple(int(n) for n in exp["n_values"])
        for key in ("seeds_per_point", "master_seed", "steps"):
            if key in exp:
                kw[key] = int(exp[key])
        if "horizon" in exp:
            kw["horizon"] = float(exp["horizon"])
        if "schemes" in exp:
            kw["schemes"] = tuple(Scheme.parse(s) for s in exp["schemes"])
        if "output" in exp:
            kw["output_path"] = str(exp["output"])
        return ExperimentConfig(road=road, infra=Infrastructure(**infra_kw),
                                lte=profile(LTE, "lte"), dsrc=profile(DSRC, "dsrc"), **kw)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from exc
    return config_from_dict(data)


def point_seed_sequence(master_seed: int, n: int, index: int) -> np.random.SeedSequence:
    # keyed on (master, n, index) so adding n-values never perturbs other points
    return np.random.SeedSequence([master_seed, n, index])


def generate_scenario(config: ExperimentConfig, n: int, seed: int) -> Scenario:
    """Drop ``n`` vehicles uniformly on the road for sweep point ``seed``."""
    rng = np.random.default_rng(point_seed_sequence(config.master_seed, n, seed))
    road = config.road
    half = road.length / 2
    x = rng.uniform(-half, half, size=n)
    lane = rng.integers(0, len(road.lane_offsets), size=n)
    speed = rng.uniform(road.speed_min, road.speed_max, size=n)
    offsets = np.asarray(road.lane_offsets, float)
    directions = np.asarray(road.lane_directions, float)
    vehicles = [
        VehicleState(id=i + 1, x=float(x[i]), y=float(offsets[lane[i]]), v=float(speed[i] * directions[lane[i]]))
        for i in range(n)
    ]
    return Scenario(tuple(vehicles), config.infra, 0.0, config.horizon, config.steps)


def random_scheme_seed(master_seed: int, n: int, index: int) -> int:
    return int(np.random.SeedSequence([master_seed, n, index, 1]).generate_state(1)[0])


@dataclass(frozen=True)
class RunRecord:
    n: int
    seed: int
    scheme: Scheme
    n_f: int
    pairs: str
    m: float
    total_service: float
    total_fv_service: float
    min_vn_rate: float
    jain_index: float
    per_vehicle_rates: tuple[float, ...]


CSV_FIELDS = [f.name for f in fields(RunRecord)]


def run_point(config: ExperimentConfig, n: int, seed: int) -> list[RunRecord]:
    scenario = generate_scenario(config, n, seed)
    tables = compute_service_tables(scenario, config.lte, config.dsrc)
    snapshot = compute_air_snapshot(scenario, config.lte, config.dsrc)
    n_lte, n_dsrc = config.lte.rb_pool, config.dsrc.rb_pool
    # FV throughput of every scheme is measured over MS-MAXMIN's FVs
    reference, _ = schedule_ms_maxmin(tables, n_lte, n_dsrc)
    comparison = reference.far_vehicles
    rng_seed = random_scheme_seed(config.master_seed, n, seed)
    records = []
    for scheme in config.schemes:
        schedule, eff = run_scheme(scheme, tables, snapshot, n_lte, n_dsrc, rng_seed)
        res = summarize(eff, schedule, scenario.horizon, comparison)
        records.append(RunRecord(n, seed, scheme, schedule.n_f, schedule.pairs_str(), eff.m, eff.total,
                                 res.total_fv_service, res.min_vn_rate, res.jain_index, res.per_vehicle_rates))
    return records


def _run_point_args(args):
    return run_point(*args)


def check_writable(path) -> None:
    path = Path(path)
    parent = path.parent if str(path.parent) else Path(".")
    if path.is_dir():
        raise OSError(f"output path {path} is a directory")
    if path.exists() and not os.access(path, os.W_OK):
        raise OSError(f"output path {path} is not writable")
    if not parent.is_dir() or not os.access(parent, os.W_OK):
        raise OSError(f"output directory {parent} does not exist or is not writable")


def run_experiment(config: ExperimentConfig, workers: int = 1, check_path: bool = True) -> list[RunRecord]:
    """Run every enabled scheme on every (n, seed) point.

    Records come back in (n, seed, scheme) order regardless of ``workers``.
    """
    if check_path:
        check_writable(config.output_path)
    points = [(config, n, s) for n in config.n_values for s in range(config.seeds_per_point)]
    log.info("running %d points with %d worker(s)", len(points), workers)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_point_args, points, chunksize=max(1, len(points) // (4 * workers))))
    else:
        chunks = [run_point(*p) for p in points]
    return [rec for chunk in chunks for rec in chunk]


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def _row(rec: RunRecord) -> list[str]:
    return [str(rec.n), str(rec.seed), rec.scheme.value, str(rec.n_f), rec.pairs, _fmt(rec.m),
            _fmt(rec.total_service), _fmt(rec.total_fv_service), _fmt(rec.min_vn_rate),
            _fmt(rec.jain_index), ";".join(_fmt(r) for r in rec.per_vehicle_rates)]


def records_to_csv(records) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    writer.writerows(_row(rec) for rec in records)
    return buf.getvalue()


def write_csv(records, path) -> None:
    if not records:
        raise ValueError("no records to write")
    text = records_to_csv(records)
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"failed writing {path}: {exc}") from exc


def read_csv(path) -> list[RunRecord]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_FIELDS:
            raise ValueError(f"unexpected header {reader.fieldnames}")
        out = []
        for row in reader:
            rates = row["per_vehicle_rates"]
            out.append(RunRecord(
                n=int(row["n"]), seed=int(row["seed"]), scheme=Scheme(row["scheme"]), n_f=int(row["n_f"]),
                pairs=row["pairs"], m=float(row["m"]), total_service=float(row["total_service"]),
                total_fv_service=float(row["total_fv_service"]), min_vn_rate=float(row["min_vn_rate"]),
                jain_index=float(row["jain_index"]),
                per_vehicle_rates=tuple(float(r) for r in rates.split(";")) if rates else (),
            ))
        return out


def aggregate(records) -> dict[tuple[int, Scheme], dict[str, float]]:
    """Per-(n, scheme) means of the three reported metrics."""
    groups: dict[tuple[int, Scheme], list[RunRecord]] = {}
    for rec in records:
        groups.setdefault((rec.n, rec.scheme), []).append(rec)
    return {
        key: {
            "total_fv_service": math.fsum(r.total_fv_service for r in recs) / len(recs),
            "min_vn_rate": math.fsum(r.min_vn_rate for r in recs) / len(recs),
            "jain_index": math.fsum(r.jain_index for r in recs) / len(recs),
            "count": len(recs),
        }
        for key, recs in groups.items()
    }


def summary_table(records) -> str:
    agg = aggregate(records)
    lines = [f"{'n':>4} {'scheme':<10} {'fv_throughput':>14} {'min_rate':>10} {'jain':>7}"]
    for (n, scheme), row in sorted(agg.items(), key=lambda kv: (kv[0][0], ALL_SCHEMES.index(kv[0][1]))):
        lines.append(f"{n:>4} {scheme.value:<10} {row['total_fv_service']:>14.3f} "
                     f"{row['min_vn_rate']:>10.4f} {row['jain_index']:>7.4f}")
    return "\n".join(lines)


def scheme_result_of(rec: RunRecord) -> SchemeResult:
    return SchemeResult(rec.scheme, rec.total_fv_service, rec.min_vn_rate, rec.jain_index, rec.per_vehicle_rates)
