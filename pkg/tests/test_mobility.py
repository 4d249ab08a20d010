import math

import pytest
from hypothesis import given, strategies as st

from hetvenet.mobility import (HorizonOrderError, Infrastructure, Scenario, VehicleState,
                               distance_v2i, distance_v2v, predict_position, trajectory)

coords = st.floats(-5000, 5000, allow_nan=False)
points = st.tuples(coords, coords)


@pytest.mark.parametrize("state, dt, expected", [
    (VehicleState(1, 0, 0, 10), 0, (0, 0)),
    (VehicleState(1, 100, 3, -20), 2, (60, 3)),
    (VehicleState(1, -1500, 0, 35), 1, (-1465, 0)),
])
def test_predict_position(state, dt, expected):
    assert predict_position(state, 5.0, 5.0 + dt) == pytest.approx(expected)


def test_predict_position_rejects_past():
    with pytest.raises(HorizonOrderError):
        predict_position(VehicleState(1, 0, 0, 1), 2.0, 1.0)


@given(st.floats(-35, 35), coords, st.floats(0, 50), st.floats(0, 50))
def test_predict_composes(v, x, a, b):
    s = VehicleState(1, x, 4.0, v)
    mid = predict_position(s, 0.0, a)
    direct = predict_position(s, 0.0, a + b)
    stepped = predict_position(VehicleState(1, mid[0], mid[1], v), a, a + b)
    assert stepped[0] == pytest.approx(direct[0], abs=1e-9)
    assert stepped[1] == direct[1] == 4.0


@pytest.mark.parametrize("pos, infra, expected", [
    ((0, 0), Infrastructure(0, 0), 0.0),
    ((3, 4), Infrastructure(0, 0), 5.0),
    ((100, 0), Infrastructure(0, 15), 101.11874208078342),
])
def test_distance_v2i(pos, infra, expected):
    assert distance_v2i(pos, infra) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize("p, q, expected", [((2, 2), (2, 2), 0.0), ((0, 0), (6, 8), 10.0), ((-5, 3), (7, -2), 13.0)])
def test_distance_v2v(p, q, expected):
    assert distance_v2v(p, q) == expected


@given(points, points)
def test_distance_symmetric(p, q):
    assert distance_v2v(p, q) == distance_v2v(q, p)


@given(points, points, points)
def test_triangle_inequality(p, q, r):
    assert distance_v2v(p, r) <= distance_v2v(p, q) + distance_v2v(q, r) + 1e-9


def test_scenario_validation():
    with pytest.raises(ValueError):
        Scenario((VehicleState(2, 0, 0, 0),))
    with pytest.raises(ValueError):
        Scenario((VehicleState(1, 0, 0, 0),), steps=0)
    with pytest.raises(ValueError):
        Scenario((VehicleState(1, 0, 0, 0),), horizon=0)
    with pytest.raises(ValueError):
        Infrastructure(coverage_radius=0)
    sc = Scenario((VehicleState(1, 0, 0, 40),))
    with pytest.raises(ValueError):
        sc.check_speeds(35)


def test_trajectory_matches_predict_position():
    vehicles = (VehicleState(1, -30, 0, 12.5), VehicleState(2, 800, 4, -33))
    sc = Scenario(vehicles, t0=2.0, horizon=1.5, steps=7)
    xs, ys = trajectory(sc)
    assert xs.shape == (2, 7)
    for i, veh in enumerate(vehicles):
        for m in range(7):
            x, y = predict_position(veh, 2.0, 2.0 + m * sc.dt)
            assert math.isclose(xs[i, m], x, rel_tol=1e-14, abs_tol=1e-12)
            assert ys[i, m] == y
