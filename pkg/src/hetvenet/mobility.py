"""Vehicle kinematics on a straight multi-lane road."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

DEFAULT_SPEED_MAX = 35.0


class HorizonOrderError(ValueError):
    """Raised when a prediction is requested for a time before t0."""


@dataclass(frozen=True)
class VehicleState:
    # v is signed: the sign encodes the direction of travel along x
    id: int
    x: float
    y: float
    v: float


@dataclass(frozen=True)
class Infrastructure:
    x: float = 0.0
    y: float = 15.0
    coverage_radius: float = 1500.0

    def __post_init__(self):
        if not self.coverage_radius > 0:
            raise ValueError(f"coverage_radius must be positive, got {self.coverage_radius}")


@dataclass(frozen=True)
class Scenario:
    vehicles: tuple[VehicleState, ...]
    infrastructure: Infrastructure = field(default_factory=Infrastructure)
    t0: float = 0.0
    horizon: float = 1.0
    steps: int = 100

    def __post_init__(self):
        object.__setattr__(self, "vehicles", tuple(self.vehicles))
        ids = [veh.id for veh in self.vehicles]
        if ids != list(range(1, len(ids) + 1)):
            raise ValueError(f"vehicle ids must be 1..N in order, got {ids}")
        if not self.horizon > 0:
            raise ValueError(f"horizon must be positive, got {self.horizon}")
        if int(self.steps) != self.steps or self.steps < 1:
            raise ValueError(f"steps must be a positive integer, got {self.steps}")

    @property
    def n(self) -> int:
        return len(self.vehicles)

    @property
    def dt(self) -> float:
        return self.horizon / self.steps

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Return (x, y, v) as float arrays ordered by vehicle id."""
        x = np.array([veh.x for veh in self.vehicles], dtype=float)
        y = np.array([veh.y for veh in self.vehicles], dtype=float)
        v = np.array([veh.v for veh in self.vehicles], dtype=float)
        return x, y, v

    def check_speeds(self, speed_max: float = DEFAULT_SPEED_MAX) -> None:
        for veh in self.vehicles:
            if abs(veh.v) > speed_max:
                raise ValueError(f"vehicle {veh.id} speed {veh.v} exceeds {speed_max} m/s")


def predict_position(state: VehicleState, t0: float, t: float) -> tuple[float, float]:
    """Constant-velocity extrapolation along the road axis."""
    if t < t0:
        raise HorizonOrderError(f"cannot predict backwards: t={t} < t0={t0}")
    return state.x + state.v * (t - t0), state.y


def distance_v2i(pos: tuple[float, float], infra: Infrastructure) -> float:
    return math.hypot(pos[0] - infra.x, pos[1] - infra.y)


def distance_v2v(pos_i: tuple[float, float], pos_j: tuple[float, float]) -> float:
    return math.hypot(pos_i[0] - pos_j[0], pos_i[1] - pos_j[1])


def trajectory(scenario: Scenario) -> tuple[np.ndarray, np.ndarray]:
    """Positions at the M left endpoints t0 + m*dt, m = 0..M-1.

    Returns x and y arrays of shape (N, M). Positions are computed in closed
    form from the t0 state, so there is no drift from repeated increments.
    """
    x, y, v = scenario.arrays()
    offsets = np.arange(scenario.steps) * scenario.dt
    xs = x[:, None] + v[:, None] * offsets[None, :]
    ys = np.broadcast_to(y[:, None], xs.shape)
    return xs, ys
