import csv
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hetvenet.channel import DSRC, LTE, air_link, air_per_rb
from hetvenet.mobility import Infrastructure, Scenario, VehicleState
from hetvenet.service import compute_air_snapshot, compute_service_tables, dump_service_csv

# scipy.integrate.quad of the DSRC integrand for the closing pair below,
# computed separately with epsrel=1e-13
QUAD_CLOSING_T1 = 3.502630686516119
QUAD_CLOSING_T10 = 77.56051396022293


def closing_pair(T, M):
    return Scenario((VehicleState(1, -200, 0, 30), VehicleState(2, 150, 4, -25)), horizon=T, steps=M)


@st.composite
def scenarios(draw, max_n=6):
    n = draw(st.integers(1, max_n))
    vehicles = tuple(
        VehicleState(i + 1, draw(st.floats(-1500, 1500)), draw(st.sampled_from([0.0, 4.0])),
                     draw(st.floats(-35, 35)))
        for i in range(n)
    )
    return Scenario(vehicles, horizon=draw(st.floats(0.1, 5.0)), steps=draw(st.integers(1, 50)))


def test_stationary_is_constant_integrand():
    sc = Scenario((VehicleState(1, 300, 0, 0), VehicleState(2, -40, 4, 0)), horizon=2.5, steps=10)
    t = compute_service_tables(sc, LTE, DSRC)
    assert t.s_v2i_unit[0] == pytest.approx(2.5 * air_per_rb(LTE, math.hypot(300, 15)), rel=1e-13)
    assert t.s_v2v_unit[0, 1] == pytest.approx(2.5 * air_per_rb(DSRC, math.hypot(340, 4)), rel=1e-13)


def test_single_step_is_left_endpoint():
    sc = Scenario((VehicleState(1, 500, 0, 35),), horizon=1e-3, steps=1)
    t = compute_service_tables(sc, LTE, DSRC)
    assert t.s_v2i_unit[0] == pytest.approx(1e-3 * air_per_rb(LTE, math.hypot(500, 15)), rel=1e-14)


def test_closing_pair_matches_quadrature():
    t = compute_service_tables(closing_pair(1.0, 100), LTE, DSRC)
    assert t.s_v2v_unit[0, 1] == pytest.approx(QUAD_CLOSING_T1, rel=1e-3)
    t = compute_service_tables(closing_pair(10.0, 1000), LTE, DSRC)
    assert t.s_v2v_unit[0, 1] == pytest.approx(QUAD_CLOSING_T10, rel=1e-3)


def test_fine_grid_quadrature_oracle():
    # midpoint rule on 1e6 cells, written directly from the link formulas
    n = 10**6
    t = (np.arange(n) + 0.5) / n
    d = np.sqrt(((-200 + 30 * t) - (150 - 25 * t)) ** 2 + 16)
    snr = 0.2 / (1e-13 * 10 ** ((43.9 + 27.5 * np.log10(d)) / 10))
    fine = np.log2(1 + snr).mean()
    assert fine == pytest.approx(QUAD_CLOSING_T1, rel=1e-9)
    assert compute_service_tables(closing_pair(1.0, 100), LTE, DSRC).s_v2v_unit[0, 1] == pytest.approx(fine, rel=1e-3)


def test_riemann_convergence_monotone():
    sc = closing_pair(10.0, 1)
    prev = None
    for m in [50, 100, 200, 400, 800]:
        a = compute_service_tables(Scenario(sc.vehicles, horizon=10.0, steps=m), LTE, DSRC).s_v2v_unit[0, 1]
        b = compute_service_tables(Scenario(sc.vehicles, horizon=10.0, steps=4 * m), LTE, DSRC).s_v2v_unit[0, 1]
        diff = abs(a - b)
        if prev is not None:
            assert diff <= prev
        prev = diff


@settings(max_examples=60, deadline=None)
@given(scenarios())
def test_table_invariants(sc):
    t = compute_service_tables(sc, LTE, DSRC)
    assert np.all(t.s_v2i_unit >= 0)
    assert np.all(t.s_v2v_unit >= 0)
    assert np.all(np.diag(t.s_v2v_unit) == 0)
    assert np.array_equal(t.s_v2v_unit, t.s_v2v_unit.T)
    snap = compute_air_snapshot(sc, LTE, DSRC)
    assert np.all(np.diag(snap.c_v2v_unit) == 0)
    assert np.array_equal(snap.c_v2v_unit, snap.c_v2v_unit.T)


def test_unit_factoring():
    sc = closing_pair(1.0, 40)
    t = compute_service_tables(sc, LTE, DSRC)
    dt = sc.dt
    gaps = [(-200 + 30 * m * dt) - (150 - 25 * m * dt) for m in range(40)]
    direct = sum(dt * air_link(DSRC, math.hypot(g, 4), 6) for g in gaps)
    assert 6 * t.s_v2v_unit[0, 1] == pytest.approx(direct, rel=1e-12)


def test_snapshot_static_relation():
    sc = Scenario((VehicleState(1, 10, 0, 0), VehicleState(2, 1400, 4, 0), VehicleState(3, -700, 0, 0)),
                  horizon=2.0, steps=16)
    t = compute_service_tables(sc, LTE, DSRC)
    snap = compute_air_snapshot(sc, LTE, DSRC)
    np.testing.assert_allclose(snap.c_v2i_unit, t.s_v2i_unit / 2.0, rtol=1e-13)
    np.testing.assert_allclose(snap.c_v2v_unit, t.s_v2v_unit / 2.0, rtol=1e-13)
    # vehicle near the infrastructure beats the one at the cell edge
    assert snap.c_v2i_unit[1] < snap.c_v2i_unit[0]


def test_snapshot_spot_value():
    sc = Scenario((VehicleState(1, 480, 0, 30), VehicleState(2, -20, 4, -30)))
    snap = compute_air_snapshot(sc, LTE, DSRC)
    d = math.sqrt(480 ** 2 + 15 ** 2)
    lp = 128.1 + 37.6 * math.log10(d / 1000)
    assert snap.c_v2i_unit[0] == pytest.approx(math.log2(1 + 0.2 / (1e-13 * 10 ** (lp / 10))), rel=1e-12)


def test_coincident_vehicles_are_clamped():
    sc = Scenario((VehicleState(1, 5, 0, 10), VehicleState(2, 5, 0, 10)), horizon=1.0, steps=4)
    t = compute_service_tables(sc, LTE, DSRC)
    assert t.s_v2v_unit[0, 1] == pytest.approx(air_per_rb(DSRC, 1.0), rel=1e-13)


def test_infrastructure_position_used():
    v = (VehicleState(1, 0, 0, 0),)
    near = compute_service_tables(Scenario(v, Infrastructure(0, 15)), LTE, DSRC).s_v2i_unit[0]
    far = compute_service_tables(Scenario(v, Infrastructure(900, 15)), LTE, DSRC).s_v2i_unit[0]
    assert far < near


def test_dump_service_csv(tmp_path):
    t = compute_service_tables(closing_pair(1.0, 10), LTE, DSRC)
    path = tmp_path / "s.csv"
    dump_service_csv(t, path)
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["vehicle", "v2i", "v2v_1", "v2v_2"]
    assert float(rows[1][3]) == pytest.approx(t.s_v2v_unit[0, 1], rel=1e-11)
    assert float(rows[2][3]) == 0.0
