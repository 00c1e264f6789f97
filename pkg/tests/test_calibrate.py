import math

import numpy as np
import pytest

from nlgreen.calibrate import (
    CSV_COLUMNS,
    CalibrationResult,
    calibrate,
    log_error,
    table2_csv,
    table2_harness,
)
from nlgreen.cauchy import SampledTrajectory
from nlgreen.errors import CalibrationError, ShapeError
from nlgreen.reduce import TravelingWaveMap, reduce_traveling
from nlgreen.solver import builtin_source

BURGERS = reduce_traveling("burgers", TravelingWaveMap(1.0))


def traj(values, h=0.1):
    return SampledTrajectory(0.0, h, np.asarray(values, dtype=float))


class TestLogError:
    def test_identical_is_clamped(self):
        a = traj([1.0, 2.0, 3.0])
        assert np.all(log_error(a, a).values == -16)

    def test_constant_gap(self):
        a = traj([1.0, 2.0, 3.0])
        b = traj([1.001, 2.001, 3.001])
        assert np.allclose(log_error(a, b).values, -3, atol=1e-9)

    def test_pointwise(self):
        assert np.allclose(log_error(traj([1e-7, 1e-5]), traj([0.0, 0.0])).values, [-7, -5])

    def test_grid_mismatch(self):
        with pytest.raises(ShapeError):
            log_error(traj([0.0, 1.0]), traj([0.0, 1.0], h=0.2))


def test_delta_recovers_oracle():
    res = calibrate(BURGERS, builtin_source("delta"), bounds_s=(0.5, 1.5), bounds_a0=(0.5, 1.5), h=1e-2, restarts=2)
    assert res.max_er <= -6
    assert res.min_er <= res.max_er
    assert res.s_star * res.a0_star == pytest.approx(1.0, abs=1e-3)


def test_trace_is_monotone():
    res = calibrate(BURGERS, builtin_source("sin"), h=1e-2, grid_points=5, restarts=3)
    for run in res.trace:
        assert all(b <= a + 1e-15 for a, b in zip(run, run[1:]))
    assert len(res.restart_values) == 3
    assert res.evaluations > 25


def test_deterministic():
    f = builtin_source("exp")
    kw = dict(bounds_s=(0.5, 2.0), bounds_a0=(0.5, 1.5), h=1e-2, grid_points=5, restarts=2)
    a = calibrate(BURGERS, f, **kw)
    b = calibrate(BURGERS, f, **kw)
    assert (a.s_star, a.a0_star, a.max_er, a.evaluations) == (b.s_star, b.a0_star, b.max_er, b.evaluations)


def test_reported_pair_is_s_then_a0():
    # (s1, s2) = (s, a0): re-evaluating the first-order model at the reported pair reproduces max Er
    from nlgreen.cauchy import numeric_green
    from nlgreen.solver import convolve_first_order, reference_solution

    f = builtin_source("log1p")
    res = calibrate(BURGERS, f, h=1e-2, grid_points=4, restarts=1)
    G = numeric_green(BURGERS, res.s_star, (0.0, 1.0), 1e-2, 1e-10)
    w = convolve_first_order(G, f, res.a0_star)
    ref = reference_solution(BURGERS, f, window=(0.0, 1.0), tol=1e-10, h_out=1e-2)
    assert log_error(w, ref).values.max() == pytest.approx(res.max_er, abs=1e-9)


def test_expansion_order_extends_search():
    res = calibrate(BURGERS, builtin_source("heaviside"), h=1e-2, grid_points=4, restarts=1, expansion_order=1)
    assert len(res.coeffs) == 2
    base = calibrate(BURGERS, builtin_source("heaviside"), h=1e-2, grid_points=4, restarts=1)
    assert res.max_er <= base.max_er + 0.5


@pytest.mark.parametrize("bounds", [(1.0, 1.0), (2.0, 1.0), (0.0, math.inf)])
def test_bad_bounds(bounds):
    with pytest.raises(ValueError):
        calibrate(BURGERS, builtin_source("sin"), bounds_s=bounds)


def test_all_starts_blow_up():
    def explosive(wp, w, t):
        return -1e6 * w * w * wp * wp

    with pytest.raises(CalibrationError):
        calibrate(explosive, builtin_source("sin"), bounds_s=(50.0, 60.0), bounds_a0=(1.0, 2.0), h=1e-2,
                  grid_points=3, restarts=1, maxfev=10)


def test_csv_schema_and_failures():
    ok = CalibrationResult(1.0, 2.0, -8.123456789, -6.5, 10, "chi in [0, 1], step 0.001")
    text = table2_csv([("delta", ok), ("sin", CalibrationError("boom"))])
    lines = text.strip().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert lines[1] == "delta,-8.12346,-6.5,1,2,10,ok"
    assert lines[2].startswith("sin,nan,nan") and "failed" in lines[2]


def test_harness_small(monkeypatch):
    monkeypatch.setenv("NLGREEN_THREADS", "1")
    rows = table2_harness(window=(0.0, 0.5), step=1e-2, sources=("delta", "log1p"), grid_points=4, restarts=1)
    assert [name for name, _ in rows] == ["delta", "log1p"]
    for _, res in rows:
        assert isinstance(res, CalibrationResult)
        assert math.isfinite(res.min_er) and res.min_er <= res.max_er
