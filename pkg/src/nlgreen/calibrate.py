"""Logarithmic error metric and calibration of the scale parameters ``(s, a0)``.

The first-order approximation ``a0 * (G_s * f)`` is compared against the
high-accuracy reference trajectory through ``Er = log10 |w_green - w_ref|``;
the worst case ``max Er`` over the window is minimized by Nelder-Mead
restarted from the best points of a coarse grid scan.
"""

import csv
import io
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .cauchy import SampledTrajectory, numeric_green
from .errors import CalibrationError, NLGreenError, ShapeError
from .reduce import TravelingWaveMap, reduce_traveling
from .solver import BUILTIN_SOURCES, ExpansionCoefficients, reference_solution, short_time_expansion

log = logging.getLogger(__name__)

ER_FLOOR = -16.0
PENALTY = 10.0
TABLE2_SOURCES = ("delta", "heaviside", "sin", "exp", "poly3", "log1p")
CSV_COLUMNS = ("source", "min_er", "max_er", "s1", "s2", "evals", "status")


def log_error(wa, wb):
    """Pointwise ``log10 |wa - wb|`` on a shared grid; exact agreement maps to -16."""
    if not wa.same_grid(wb):
        raise ShapeError("log_error needs co-sampled trajectories")
    diff = np.abs(wa.values - wb.values)
    with np.errstate(divide="ignore"):
        er = np.where(diff > 0, np.log10(diff), ER_FLOOR)
    return SampledTrajectory(wa.t0, wa.h, np.maximum(er, ER_FLOOR))


@dataclass
class CalibrationResult:
    s_star: float
    a0_star: float
    min_er: float
    max_er: float
    evaluations: int
    grid: str
    coeffs: tuple = ()
    restart_values: list = field(default_factory=list)
    trace: list = field(default_factory=list)
    status: str = "ok"

    @property
    def restart_spread(self):
        finite = [v for v in self.restart_values if v < PENALTY]
        return max(finite) - min(finite) if finite else math.inf

    @property
    def multimodal(self):
        return self.restart_spread > 0.5


class _Objective:
    """max Er of the K-term approximation as a function of ``(s, a0, a1, ...)``."""

    def __init__(self, nonlinearity, f, window, h, tol, reference):
        self.nonlinearity = nonlinearity
        self.f = f
        self.window = window
        self.h = h
        self.tol = tol
        self.reference = reference
        self.evaluations = 0
        self._green = {}

    def green(self, s):
        if s not in self._green:
            self._green[s] = numeric_green(self.nonlinearity, s, (0.0, self.window[1]), self.h, self.tol)
        return self._green[s]

    def errors(self, x):
        G = self.green(float(x[0]))
        if G.blowup_t is not None:
            return None
        w = short_time_expansion(G, self.f, ExpansionCoefficients(x[1:]))
        er = log_error(w, self.reference).values
        return er if np.all(np.isfinite(er)) else None

    def __call__(self, x):
        self.evaluations += 1
        try:
            er = self.errors(x)
        except (NLGreenError, ArithmeticError, ValueError):
            er = None
        if len(self._green) > 64:
            self._green.clear()
        return PENALTY if er is None else float(er.max())


def calibrate(
    nonlinearity,
    f,
    window=(0.0, 1.0),
    bounds_s=(0.05, 5.0),
    bounds_a0=(0.05, 5.0),
    tol=1e-10,
    h=1e-3,
    expansion_order=0,
    grid_points=9,
    restarts=8,
    maxfev=400,
):
    """Minimize ``max Er`` over the scale parameters.

    With ``expansion_order = K`` the coefficients ``a1..aK`` join the search
    (started at 0, bounded by the a0 box). The reported ``min_er`` skips
    ``t = 0`` where both trajectories vanish identically.
    """
    if np.ndim(window) == 0:
        window = (0.0, float(window))
    window = (float(window[0]), float(window[1]))
    for lo, hi in (bounds_s, bounds_a0):
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise ValueError(f"bounds must be finite and non-degenerate, got {(lo, hi)}")
    if window[0] != 0.0:
        raise ValueError("calibration window must start at 0")

    reference = reference_solution(nonlinearity, f, window=window, tol=tol, h_out=h)
    obj = _Objective(nonlinearity, f, window, h, tol, reference)

    a_bound = max(abs(bounds_a0[0]), abs(bounds_a0[1]))
    bounds = [tuple(bounds_s), tuple(bounds_a0)] + [(-a_bound, a_bound)] * expansion_order
    s_grid = np.linspace(*bounds_s, grid_points)
    a_grid = np.linspace(*bounds_a0, grid_points)
    scan = sorted(
        (obj(np.array([s, a] + [0.0] * expansion_order)), s, a) for s in s_grid for a in a_grid
    )
    starts = [np.array([s, a] + [0.0] * expansion_order) for val, s, a in scan[:restarts]]

    best = None
    restart_values = []
    trace = []
    for x0 in starts:
        run_trace = []

        def record(intermediate_result):
            run_trace.append(float(intermediate_result.fun))

        step = np.array([(hi - lo) / (grid_points - 1) for lo, hi in bounds])
        simplex = np.vstack([x0] + [np.clip(x0 + np.eye(len(x0))[i] * step[i], *np.array(bounds).T) for i in range(len(x0))])
        res = optimize.minimize(
            obj,
            x0,
            method="Nelder-Mead",
            bounds=bounds,
            callback=record,
            options={"initial_simplex": simplex, "xatol": 1e-9, "fatol": 1e-4, "maxfev": maxfev},
        )
        restart_values.append(float(res.fun))
        trace.append(run_trace)
        if best is None or res.fun < best.fun:
            best = res

    if best.fun >= PENALTY:
        raise CalibrationError(
            f"all {len(starts)} starts diverged or blew up; grid-scan best {scan[0][0]:.3g} at s={scan[0][1]:.3g}, a0={scan[0][2]:.3g}"
        )
    er = obj.errors(best.x)
    result = CalibrationResult(
        s_star=float(best.x[0]),
        a0_star=float(best.x[1]),
        min_er=float(er[1:].min()) if er.size > 1 else float(er.min()),
        max_er=float(er.max()),
        evaluations=obj.evaluations,
        grid=f"chi in [{window[0]:g}, {window[1]:g}], step {h:g}",
        coeffs=tuple(float(a) for a in best.x[1:]),
        restart_values=restart_values,
        trace=trace,
    )
    if result.multimodal:
        log.info("restart spread %.3g > 0.5 Er units: objective looks multimodal", result.restart_spread)
    return result


def _table2_row(args):
    name, v, window, step, kwargs = args
    N = reduce_traveling("burgers", TravelingWaveMap(v))
    try:
        return name, calibrate(N, BUILTIN_SOURCES[name], window=window, h=step, **kwargs)
    except (NLGreenError, ArithmeticError, ValueError) as exc:
        return name, exc


def _threads():
    raw = os.environ.get("NLGREEN_THREADS")
    if raw:
        return max(1, int(raw))
    return max(1, os.cpu_count() or 1)


def table2_harness(v=1.0, window=(0.0, 1.0), step=1e-3, sources=TABLE2_SOURCES, **kwargs):
    """Calibrate every built-in source against the Burgers reduction.

    Returns ``(name, CalibrationResult or exception)`` pairs in source order;
    a failing row does not stop the others. Rows run in parallel up to
    ``NLGREEN_THREADS`` worker processes.
    """
    jobs = [(name, v, tuple(window), step, kwargs) for name in sources]
    workers = min(len(jobs), _threads())
    if workers <= 1:
        return [_table2_row(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_table2_row, jobs))


def _g6(x):
    return f"{x:.6g}"


def table2_csv(rows):
    """CSV text with columns ``source,min_er,max_er,s1,s2,evals,status``."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for name, res in rows:
        if isinstance(res, CalibrationResult):
            writer.writerow([name, _g6(res.min_er), _g6(res.max_er), _g6(res.s_star), _g6(res.a0_star), res.evaluations, res.status])
        else:
            writer.writerow([name, "nan", "nan", "nan", "nan", 0, f"failed: {type(res).__name__}"])
    return buf.getvalue()
