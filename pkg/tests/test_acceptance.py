"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the summary lines.
"""

import cmath
import math
import time

import numpy as np
from scipy import integrate as sint
from scipy import special

from nlgreen import kernels as K
from nlgreen.calibrate import table2_harness
from nlgreen.cauchy import CauchyProblem, SampledTrajectory, integrate, numeric_green, verify_green
from nlgreen.reduce import TravelingWaveMap, closed_green, lift_to_xt, pde_residual, reduce_traveling
from nlgreen.solver import builtin_source, convolve_first_order
from nlgreen.specfun import ellip_k, erf_inv, jacobi, lambert_w0, weierstrass_p, weierstrass_periods
from nlgreen.spectrum import analytic_spectrum, fft_peaks, spectral_level_db

FAMILIES = [
    ("burgers", TravelingWaveMap(1.0), {}, 0.5),
    ("heat", TravelingWaveMap(1.0), {"n": 2}, 1.0),
    ("wave", TravelingWaveMap(1.0, 2.0), {"n": 3, "alpha": 1.0}, 1.0),
]


def report(number, title, ok, elapsed, detail=""):
    print(f"\ncriterion {number} [{title}]: {'PASS' if ok else 'FAIL'} ({elapsed:.1f} s) {detail}".rstrip())
    return ok


def test_criterion_1_kernel_residuals():
    start = time.perf_counter()
    failures = []
    for spec in K.list_kernels():
        T = K.kernel_window(spec.id)
        G = SampledTrajectory.from_function(spec.closed_form, 0.0, T, 1e-3)
        rep = verify_green(G, spec.nonlinearity(), K.kernel_jump(spec.id), spec.offset)
        if not (rep.interior_residual < 1e-4 and rep.jump_defect < 1e-6 and rep.value_defect < 1e-6):
            failures.append(f"{spec.id}(res={rep.interior_residual:.2g}, jump={rep.jump_defect:.2g})")
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 30
    report(1, "kernel residual suite", ok, elapsed, "; ".join(failures))
    assert not failures, "rows failing verify_green: " + ", ".join(failures)
    assert elapsed < 30


def test_criterion_2_theorem2_equivalence():
    start = time.perf_counter()
    errs = {}
    for spec in K.list_kernels():
        if not spec.theorem2:
            continue
        T = K.kernel_window(spec.id)
        G = numeric_green(spec.nonlinearity(), K.kernel_jump(spec.id), (0.0, T), 1e-3, 1e-11)
        errs[spec.id] = float(np.max(np.abs(G.values - spec.closed_form(G.t))))
    for family, tmap, params, s in FAMILIES:
        G = numeric_green(reduce_traveling(family, tmap, params), s, (0.0, 1.0), 1e-3, 1e-11)
        errs[family] = float(np.max(np.abs(G.values - closed_green(family, tmap, params, s, G.t))))
    elapsed = time.perf_counter() - start
    worst = max(errs, key=errs.get)
    ok = errs[worst] < 1e-5 and elapsed < 60
    report(2, "oracle equivalence", ok, elapsed, f"{len(errs)} rows, worst {worst}={errs[worst]:.2g}")
    assert errs[worst] < 1e-5, errs
    assert elapsed < 60


def test_criterion_3_calibration_table():
    start = time.perf_counter()
    rows = dict(table2_harness(v=1.0, window=(0.0, 1.0), step=1e-3))
    elapsed = time.perf_counter() - start
    problems = []
    for name, res in rows.items():
        if isinstance(res, Exception):
            problems.append(f"{name}: {res}")
            continue
        limit = -6.0 if name == "delta" else -2.5
        if not (res.max_er <= limit and res.min_er <= res.max_er):
            problems.append(f"{name}: max_er={res.max_er:.3f}")
    detail = " ".join(f"{n}={r.max_er:.2f}" for n, r in rows.items() if not isinstance(r, Exception))
    ok = not problems and len(rows) == 6 and elapsed < 600
    report(3, "calibration table", ok, elapsed, detail)
    assert len(rows) == 6 and not problems, problems
    assert elapsed < 600


def test_criterion_4_spectrum():
    start = time.perf_counter()
    k_m1 = sint.quad(lambda th: 1 / math.sqrt(1 + math.sin(th) ** 2), 0, math.pi / 2, epsabs=1e-14)[0]
    w0 = math.pi / (2 * k_m1 * 2 ** 0.25)
    cubic = analytic_spectrum("cubic", 2).frequencies.real
    checks = {"omega0": abs(cubic[0] - 1.00756) <= 1e-4 and abs(cubic[0] - w0) < 1e-10}

    G = SampledTrajectory.from_function(lambda t: K.eval_kernel("cubic", t), 0.0, 100.0, 0.01)
    peaks = fft_peaks(G, 2)
    checks["fft"] = all(abs(p - w) <= 0.02 * w for p, w in zip(peaks, cubic))
    checks["even"] = all(spectral_level_db(G, k * cubic[0], cubic[0]) <= -20 for k in (2, 4))

    sg = analytic_spectrum("sine_gordon", 2).frequencies
    checks["sine_gordon"] = sg[0] == 0 and sg[1].imag != 0

    q1 = analytic_spectrum("quadratic", 8, {"c2": 1.0}).frequencies
    q64 = analytic_spectrum("quadratic", 8, {"c2": 64.0}).frequencies
    checks["spacing"] = np.max(np.abs(np.diff(q1) - (q1[1] - q1[0]))) <= 1e-12
    checks["scaling"] = np.max(np.abs(q64 / q1 - 64 ** (1 / 6))) / 64 ** (1 / 6) <= 1e-6
    elapsed = time.perf_counter() - start
    ok = all(checks.values())
    report(4, "spectrum", ok, elapsed, " ".join(k for k, v in checks.items() if not v))
    assert ok, checks


def test_criterion_5_special_functions():
    start = time.perf_counter()
    rng = np.random.default_rng(2024)
    checks = {}

    u = rng.uniform(-3, 3, 100)
    m = rng.uniform(-2, 2, 100)
    defect, am_defect = 0.0, 0.0
    h = 1e-5
    for ui, mi in zip(u, m):
        sn, cn, dn, am = (complex(v) for v in jacobi(ui, mi))
        defect = max(defect, abs(sn ** 2 + cn ** 2 - 1), abs(dn ** 2 + mi * sn ** 2 - 1), abs(sn - cmath.sin(am)))
        d_am = (complex(jacobi(ui + h, mi)[3]) - complex(jacobi(ui - h, mi)[3])) / (2 * h)
        am_defect = max(am_defect, abs(d_am - dn))
    checks["jacobi"] = defect < 1e-10
    checks["am'"] = am_defect < 1e-6

    worst = 0.0
    for g2, g3 in [(0.0, 1.0), (2.0, -1.0), (-3.0, 0.5), (4.0, 1.0)]:
        for z in (0.3, 0.45 + 0.2j, 0.7 - 0.1j):
            p = weierstrass_p(z, g2, g3)
            dp = (weierstrass_p(z + 1e-5, g2, g3) - weierstrass_p(z - 1e-5, g2, g3)) / 2e-5
            worst = max(worst, abs(dp ** 2 - (4 * p ** 3 - g2 * p - g3)) / abs(4 * p ** 3))
    checks["wp ode"] = worst < 1e-6
    checks["wp laurent"] = abs(weierstrass_p(1e-4, 0.0, 1.0) - 1e8) / 1e8 < 1e-4

    y = np.linspace(-0.999, 0.999, 41)
    checks["erf_inv"] = np.max(np.abs(special.erf(erf_inv(y)) - y)) < 1e-12
    x = np.array([-1 / math.e + 1e-6, -0.2, 0.0, 1.0, 50.0])
    w = lambert_w0(x)
    checks["lambert"] = np.max(np.abs(w * np.exp(w) - x)) < 1e-12

    k_quad = sint.quad(lambda th: 1 / math.sqrt(1 + math.sin(th) ** 2), 0, math.pi / 2, epsabs=1e-14)[0]
    k_m1 = complex(ellip_k(-1.0)).real
    checks["K(-1)"] = abs(k_m1 - 1.3110288) <= 1e-6 and abs(k_m1 - k_quad) <= 1e-6
    w1 = weierstrass_periods(0.0, 1.0)[0]
    w1 = complex(w1).real
    checks["omega1"] = abs(w1 - 1.5299540) <= 1e-5 and abs(w1 - special.gamma(1 / 3) ** 3 / (4 * math.pi)) <= 1e-5
    elapsed = time.perf_counter() - start
    ok = all(checks.values()) and elapsed < 10
    report(5, "special functions", ok, elapsed, " ".join(k for k, v in checks.items() if not v))
    assert all(checks.values()), checks
    assert elapsed < 10


def test_criterion_6_pde_residual():
    start = time.perf_counter()
    h = 1e-3
    x = np.arange(0.0, 1.0 + h / 2, h)
    t = np.arange(0.0, 0.5 + h / 2, h)
    worst = {}
    for family, tmap, params, s in FAMILIES:
        w = SampledTrajectory.from_function(lambda c: closed_green(family, tmap, params, s, c), 0.0, 1.01, h / 10)
        field = lift_to_xt(w, tmap, x, t)
        worst[family] = float(np.nanmax(np.abs(pde_residual(family, field, x, t, tmap, params))))
    elapsed = time.perf_counter() - start
    ok = max(worst.values()) < 1e-3 and elapsed < 60
    report(6, "lifted PDE residual", ok, elapsed, " ".join(f"{k}={v:.2g}" for k, v in worst.items()))
    assert max(worst.values()) < 1e-3, worst
    assert elapsed < 60


def _loglog_slope(hs, errs):
    return float(np.polyfit(np.log(hs), np.log(errs), 1)[0])


def test_criterion_7_convergence_orders():
    start = time.perf_counter()
    N = K.kernel_nonlinearity("cubic")
    s = K.kernel_jump("cubic")
    T = 2.0
    hs = [0.1, 0.05, 0.025, 0.0125]
    errs = []
    for step in hs:
        tr = integrate(CauchyProblem(N, None, 0.0, s, (0.0, T)), step, fixed_step=step)
        errs.append(float(np.max(np.abs(tr.values - K.eval_kernel("cubic", tr.t)))))
    p_int = _loglog_slope(hs, errs)

    hc = [0.04, 0.02, 0.01, 0.005]
    errc = []
    for step in hc:
        G = SampledTrajectory.from_function(np.sin, 0.0, 2.0, step)
        w = convolve_first_order(G, builtin_source("exp"), 1.0)
        exact = (np.exp(w.t) - np.cos(w.t) - np.sin(w.t)) / 2
        errc.append(float(np.max(np.abs(w.values - exact))))
    p_conv = _loglog_slope(hc, errc)
    elapsed = time.perf_counter() - start
    ok = p_int >= 3 and 1.8 <= p_conv <= 2.2
    report(7, "convergence orders", ok, elapsed, f"integrator={p_int:.2f} convolution={p_conv:.2f}")
    assert p_int >= 3
    assert 1.8 <= p_conv <= 2.2

