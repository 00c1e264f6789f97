"""Second-order Cauchy problems: adaptive integration and numerical Green's functions.

The Green's function of ``w'' + N(w', w, t) = s delta(t)`` is built as
``theta(t) * w0(t)`` where ``w0`` solves the homogeneous problem with
``w0(0) = 0`` and ``w0'(0) = s``. This holds whenever ``N(0, 0, t) = 0``.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import BlowUpError, EvaluationError, ShapeError

Nonlinearity = Callable[[float, float, float], float]

# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B = _A[6] + (0.0,)
_BSTAR = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)
_E = tuple(b - bs for b, bs in zip(_B, _BSTAR))

_BLOWUP_NORM = 1e12
_MAX_STEPS = 2_000_000


@dataclass(frozen=True)
class SampledTrajectory:
    """Samples of a scalar function on the uniform grid ``t0 + k*h``."""

    t0: float
    h: float
    values: np.ndarray
    slopes: Optional[np.ndarray] = None
    blowup_t: Optional[float] = None

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or vals.size < 2:
            raise ShapeError("trajectory needs at least two samples")
        if not self.h > 0:
            raise ShapeError(f"step must be positive, got {self.h}")
        if not np.all(np.isfinite(vals)):
            raise ShapeError("trajectory values must be finite")
        object.__setattr__(self, "values", vals)
        if self.slopes is not None:
            sl = np.asarray(self.slopes, dtype=float)
            if sl.shape != vals.shape:
                raise ShapeError("slopes and values differ in length")
            object.__setattr__(self, "slopes", sl)

    def __len__(self):
        return self.values.size

    @property
    def t(self):
        return self.t0 + self.h * np.arange(self.values.size)

    @property
    def t_end(self):
        return self.t0 + self.h * (self.values.size - 1)

    def index_of(self, t):
        """Grid index of ``t``; raises if ``t`` is not (close to) a grid point."""
        k = (t - self.t0) / self.h
        i = int(round(k))
        if abs(k - i) > 1e-6 or not 0 <= i < self.values.size:
            raise ShapeError(f"t = {t} is not a grid point")
        return i

    def same_grid(self, other):
        return (
            len(self) == len(other)
            and math.isclose(self.h, other.h, rel_tol=1e-12)
            and abs(self.t0 - other.t0) <= 1e-9 * self.h
        )

    @classmethod
    def from_function(cls, func, t0, t_end, h):
        n = int(round((t_end - t0) / h)) + 1
        t = t0 + h * np.arange(n)
        return cls(t0, h, np.asarray(func(t), dtype=float))


@dataclass(frozen=True)
class CauchyProblem:
    """``w'' + N(w', w, t) = f(t)`` on ``window`` with ``w(t_start) = w0, w'(t_start) = wp0``.

    ``source`` is ``None`` (no forcing), a callable ``f(t)``, or an object
    with a ``forcing(t)`` method and an ``impulses`` sequence of
    ``(tau, weight)`` pairs realised as slope jumps.
    """

    nonlinearity: Nonlinearity
    source: object = None
    w0: float = 0.0
    wp0: float = 0.0
    window: tuple = (0.0, 1.0)

    def __post_init__(self):
        a, b = self.window
        if not (math.isfinite(a) and math.isfinite(b) and b > a):
            raise ValueError(f"invalid window {self.window}")


def _forcing_and_impulses(source):
    if source is None:
        return None, ()
    if hasattr(source, "forcing"):
        return source.forcing, tuple(getattr(source, "impulses", ()))
    return source, ()


def _hermite(theta, h, y0, f0, y1, f1):
    t2 = theta * theta
    t3 = t2 * theta
    return (
        (2 * t3 - 3 * t2 + 1) * y0
        + (t3 - 2 * t2 + theta) * h * f0
        + (-2 * t3 + 3 * t2) * y1
        + (t3 - t2) * h * f1
    )


def integrate(problem, h_out, tol=1e-10, fixed_step=None):
    """Integrate ``problem`` with a Dormand-Prince 5(4) pair and PI step control.

    Returns samples of ``w`` and ``w'`` on the grid ``t_start + k*h_out``.
    If the solution blows up the trajectory is truncated at the last grid
    point reached and ``blowup_t`` records where integration stopped.
    ``fixed_step`` switches off error control (used for order studies).
    """
    if not 1e-14 <= tol <= 1e-3:
        raise ValueError(f"tol must lie in [1e-14, 1e-3], got {tol}")
    if not h_out > 0:
        raise ValueError("h_out must be positive")
    N = problem.nonlinearity
    forcing, impulses = _forcing_and_impulses(problem.source)
    t_start, t_end = (float(x) for x in problem.window)
    n_out = int(round((t_end - t_start) / h_out)) + 1
    grid = t_start + h_out * np.arange(n_out)
    t_end = grid[-1]

    def rhs(t, w, p):
        acc = -N(p, w, t)
        if forcing is not None:
            acc += forcing(t)
        return acc

    wp0 = float(problem.wp0)
    stops = []
    for tau, weight in impulses:
        if abs(tau - t_start) <= 1e-12 * max(1.0, abs(t_start)):
            wp0 += weight
        elif t_start < tau <= t_end:
            stops.append((float(tau), float(weight)))
    stops.sort()

    vals = np.empty(n_out)
    slopes = np.empty(n_out)
    t, w, p = t_start, float(problem.w0), wp0
    try:
        a = rhs(t, w, p)
    except (ZeroDivisionError, OverflowError, ValueError) as exc:
        raise EvaluationError(f"nonlinearity failed at t={t}: {exc}") from exc
    if not math.isfinite(a):
        raise EvaluationError(f"nonlinearity is not finite at t={t}, w={w}, w'={p}")
    vals[0], slopes[0] = w, p
    filled = 1
    span = t_end - t_start
    h = min(h_out, 0.01 * span, 0.1 * tol ** 0.2 * max(span, 1.0))
    if fixed_step is not None:
        if not fixed_step > 0:
            raise ValueError("fixed_step must be positive")
        h = float(fixed_step)
    h_min = 1e-13 * max(1.0, abs(t_end))
    err_prev = 1e-4
    stop_i = 0
    blowup_t = None
    steps = 0

    while filled < n_out:
        steps += 1
        if steps > _MAX_STEPS:
            blowup_t = t
            break
        target = stops[stop_i][0] if stop_i < len(stops) else t_end
        last = False
        if t + h >= target - 1e-14 * max(1.0, abs(target)):
            h = target - t
            last = True
        if last and h <= 1e-14 * max(1.0, abs(target)):
            # already at the target up to round-off
            h = 0.0
        elif h < h_min:
            blowup_t = t
            break
        if h == 0.0:
            w_new, p_new, a_new, t_new = w, p, a, target
            while filled < n_out and grid[filled] <= t_new + 1e-12 * max(1.0, abs(t_new)):
                vals[filled], slopes[filled] = w, p
                filled += 1
            t = target
            if stop_i < len(stops) and target == stops[stop_i][0]:
                p += stops[stop_i][1]
                if abs(grid[filled - 1] - t) <= 1e-12 * max(1.0, abs(t)):
                    slopes[filled - 1] = p
                a = rhs(t, w, p)
                stop_i += 1
            continue
        kw = [p]
        kp = [a]
        ok = True
        for s in range(1, 7):
            coeffs = _A[s]
            ws = w + h * sum(c * k for c, k in zip(coeffs, kw))
            ps = p + h * sum(c * k for c, k in zip(coeffs, kp))
            try:
                acc = rhs(t + _C[s] * h, ws, ps)
            except (ZeroDivisionError, OverflowError, ValueError):
                acc = math.nan
            if not (math.isfinite(acc) and math.isfinite(ws) and math.isfinite(ps)):
                ok = False
                break
            kw.append(ps)
            kp.append(acc)
        if ok:
            w_new = w + h * sum(b * k for b, k in zip(_B, kw))
            p_new = p + h * sum(b * k for b, k in zip(_B, kp))
            ew = h * sum(e * k for e, k in zip(_E, kw))
            ep = h * sum(e * k for e, k in zip(_E, kp))
            sw = tol * (1 + max(abs(w), abs(w_new)))
            sp = tol * (1 + max(abs(p), abs(p_new)))
            err = 0.0 if fixed_step is not None else max(abs(ew) / sw, abs(ep) / sp)
            if not math.isfinite(err):
                ok = False
        if not ok:
            h *= 0.25
            continue
        if err > 1.0:
            h *= max(0.2, 0.9 * err ** -0.2)
            continue

        a_new = kp[6]
        t_new = target if last else t + h
        while filled < n_out and grid[filled] <= t_new + 1e-12 * max(1.0, abs(t_new)):
            theta = (grid[filled] - t) / (t_new - t)
            vals[filled] = _hermite(theta, t_new - t, w, p, w_new, p_new)
            slopes[filled] = _hermite(theta, t_new - t, p, a, p_new, a_new)
            filled += 1
        t, w, p, a = t_new, w_new, p_new, a_new
        if max(abs(w), abs(p)) > _BLOWUP_NORM:
            blowup_t = t
            break
        if last and stop_i < len(stops) and target == stops[stop_i][0]:
            p += stops[stop_i][1]
            if filled > 0 and abs(grid[filled - 1] - t) <= 1e-12 * max(1.0, abs(t)):
                slopes[filled - 1] = p
            a = rhs(t, w, p)
            stop_i += 1
            continue
        if fixed_step is not None:
            h = float(fixed_step)
            continue
        fac = 0.9 * max(err, 1e-10) ** (-0.7 / 5) * err_prev ** (0.4 / 5)
        h *= min(5.0, max(0.2, fac))
        err_prev = max(err, 1e-4)

    if filled < 2:
        raise BlowUpError(f"integration failed before the first output point (t={t:.6g})", t_last=t)
    vals, slopes = vals[:filled], slopes[:filled]
    keep = np.isfinite(vals) & np.isfinite(slopes) & (np.abs(vals) < _BLOWUP_NORM)
    if not np.all(keep):
        cut = int(np.argmin(keep))
        if cut < 2:
            raise BlowUpError("trajectory not finite near the start", t_last=t)
        vals, slopes = vals[:cut], slopes[:cut]
        blowup_t = blowup_t if blowup_t is not None else t
    return SampledTrajectory(t_start, h_out, vals, slopes, blowup_t)


def numeric_green(nonlinearity, s, window, h_out, tol=1e-10):
    """Green's function ``theta(t) w0(t)`` on ``window = (a, T)`` with ``a <= 0 < T``.

    Grid points with ``t < 0`` carry the zero extension.
    """
    a, T = (float(x) for x in window) if np.ndim(window) else (0.0, float(window))
    if a > 0 or T <= 0:
        raise ValueError(f"window must straddle 0 from the left: {window}")
    k = int(round(-a / h_out))
    traj = integrate(CauchyProblem(nonlinearity, None, 0.0, float(s), (0.0, T)), h_out, tol)
    if k == 0:
        return traj
    zeros = np.zeros(k)
    return SampledTrajectory(
        -k * h_out,
        h_out,
        np.concatenate([zeros, traj.values]),
        np.concatenate([zeros, traj.slopes]),
        traj.blowup_t,
    )


@dataclass
class MultiplicativityReport:
    passed: bool
    violations: list = field(default_factory=list)
    checked: int = 0

    def __bool__(self):
        return self.passed


def check_multiplicativity(nonlinearity, t_samples, state_samples=((0.3, -0.7), (1.0, 1.0), (-2.0, 0.5))):
    """Check ``N(theta w', theta w, t) == theta(t) N(w', w, t)`` on the samples.

    For ``t >= 0`` both sides coincide identically; for ``t < 0`` the left
    side is ``N(0, 0, t)`` and the right side is zero, so the check is
    whether ``N(0, 0, t)`` vanishes. Sampled ``t`` with ``N(0, 0, t) != 0``
    (or where ``N`` cannot be evaluated at the origin) are listed for both
    signs of ``t``.
    """
    violations = []
    checked = 0
    for t in t_samples:
        theta = 1.0 if t >= 0 else 0.0
        bad = False
        try:
            at_origin = nonlinearity(0.0, 0.0, t)
            bad = not (math.isfinite(at_origin) and at_origin == 0.0)
        except (ZeroDivisionError, OverflowError, ValueError):
            bad = True
        for wp, w in state_samples:
            checked += 1
            try:
                lhs = nonlinearity(theta * wp, theta * w, t)
                rhs = theta * nonlinearity(wp, w, t)
            except (ZeroDivisionError, OverflowError, ValueError):
                bad = True
                continue
            if not math.isclose(lhs, rhs, rel_tol=1e-12, abs_tol=1e-300):
                bad = True
        if bad:
            violations.append(float(t))
    return MultiplicativityReport(not violations, violations, checked)


@dataclass
class GreenReport:
    interior_residual: float
    jump_defect: float
    value_defect: float
    slope_at_zero: float

    def ok(self, residual_tol=1e-4, defect_tol=1e-6):
        return (
            self.interior_residual < residual_tol
            and self.jump_defect < defect_tol
            and self.value_defect < defect_tol
        )


# fourth-order one-sided first derivative
_FWD5 = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0


def verify_green(G, nonlinearity, s, offset=0.0):
    """Residual report for a sampled Green's function.

    (a) max ``|G'' + N(G', G, t)|`` over grid points with ``t > h`` using
    central differences, (b) ``|G'(0+) - s|`` from a fourth-order one-sided
    difference, (c) ``|G(0+) - offset|``.
    """
    i0 = G.index_of(0.0) if G.t0 < 0 else 0
    if G.t0 > 1e-12 * G.h:
        raise ShapeError("Green's function samples must start at or before t = 0")
    v = G.values[i0:]
    h = G.h
    if v.size < 5:
        raise ShapeError("need at least five samples from t = 0")
    slope0 = float(_FWD5 @ v[:5] / h)
    jump = abs(slope0 - s) if math.isfinite(s) else math.inf
    value = abs(v[0] - offset)
    if v.size >= 4:
        i = np.arange(2, v.size - 1)
        gp = (v[i + 1] - v[i - 1]) / (2 * h)
        gpp = (v[i + 1] - 2 * v[i] + v[i - 1]) / (h * h)
        t = i * h
        n_vals = np.array([nonlinearity(a, b, c) for a, b, c in zip(gp, v[i], t)], dtype=float)
        res = np.abs(gpp + n_vals)
        interior = float(np.max(res)) if res.size else 0.0
    else:
        interior = 0.0
    if not math.isfinite(interior):
        interior = math.inf
    return GreenReport(interior, jump, float(value), slope0)


def distributional_impulse(green, nonlinearity, width, n=20001):
    """Pair ``G'' + N(G', G, t)`` with a bump of half-width ``width`` and ``phi(0) = 1``.

    ``green`` is a callable evaluating ``G`` (and zero for ``t < 0``); the
    second derivative is moved onto the bump, ``<G'', phi> = <G, phi''>``.
    For a Green's function the pairing equals ``s * phi(0) = s`` at every
    width, up to quadrature error.
    """
    from scipy.integrate import simpson

    t = np.linspace(-width, width, n)
    x = t / width
    inside = np.abs(x) < 1
    phi = np.zeros_like(t)
    phi[inside] = np.exp(1.0 - 1.0 / (1.0 - x[inside] ** 2))
    dphi = np.gradient(phi, t)
    d2phi = np.gradient(dphi, t)
    g = np.asarray(green(t), dtype=float)
    gp = np.gradient(g, t)
    gp[t < 0] = 0.0
    n_vals = np.array([nonlinearity(a, b, c) if c >= 0 else nonlinearity(0.0, 0.0, c) for a, b, c in zip(gp, g, t)])
    return float(simpson(g * d2phi + n_vals * phi, x=t))
