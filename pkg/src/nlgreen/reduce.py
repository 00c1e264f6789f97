"""Reductions of nonlinear PDEs to second-order ODEs and lifting back to (x, t).

Three traveling-wave families are supported, all in the variable
``chi = x - v t``:

* ``burgers``: ``w_t = w_xx - w (w_t)^2``  ->  ``w'' + v w' - w (w')^2 = 0``
* ``heat``:    ``w_t = w_xx + (w_x)^n``    ->  ``w'' + v w' + (w')^n = 0``
* ``wave``:    ``w_tt + alpha (w_t)^n = c^2 w_xx``  ->  ``a w'' + alpha (w')^n = 0``,
  ``a = c^2 - v^2``

The Burgers reduction as written holds for ``|v| = 1`` (the PDE has
``(w_t)^2 = v^2 (w')^2``); the wave reduction needs ``(-v)^n = -1``.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import DomainError
from .specfun import erf_inv, hyp2f1

FAMILIES = ("burgers", "heat", "wave")


@dataclass(frozen=True)
class TravelingWaveMap:
    v: float
    c: float = 0.0

    @property
    def a(self):
        return self.c ** 2 - self.v ** 2


@dataclass(frozen=True)
class SeparationMap:
    a1: float
    a2: float
    alpha: float
    lam: float

    def __post_init__(self):
        if self.a1 == 0:
            raise DomainError("separation map requires a1 != 0")
        if self.alpha * self.lam ** 2 == 0:
            raise DomainError("separation map requires alpha * lambda^2 != 0")


# Nonlinearities are small classes rather than closures so they pickle.


@dataclass(frozen=True)
class BurgersNonlinearity:
    v: float

    def __call__(self, wp, w, t):
        return self.v * wp - w * wp * wp


@dataclass(frozen=True)
class HeatNonlinearity:
    v: float
    n: int

    def __call__(self, wp, w, t):
        return self.v * wp + wp ** self.n


@dataclass(frozen=True)
class WaveNonlinearity:
    alpha: float
    a: float
    n: int

    def __call__(self, wp, w, t):
        return self.alpha / self.a * wp ** self.n


def _check_family(family, tmap, params):
    if family not in FAMILIES:
        raise DomainError(f"unknown family {family!r}; choose from {FAMILIES}")
    if family == "burgers":
        if tmap.v == 0:
            raise DomainError("burgers reduction requires v != 0")
        return {}
    n = params.get("n")
    if n is None or float(n) != int(n):
        raise DomainError(f"{family}: integer n required, got {n!r}")
    n = int(n)
    if family == "heat":
        if n < 2:
            raise DomainError("heat: n >= 2 required")
        if tmap.v == 0:
            raise DomainError("heat: v != 0 required")
        return {"n": n}
    alpha = float(params.get("alpha", 1.0))
    if n < 3:
        raise DomainError("wave: n >= 3 required")
    if not alpha > 0:
        raise DomainError("wave: alpha > 0 required")
    if tmap.a == 0:
        raise DomainError("wave: a = c^2 - v^2 must be non-zero")
    return {"n": n, "alpha": alpha}


def reduce_traveling(family, tmap, params=None):
    """Nonlinearity ``N(w', w, chi)`` of the reduced traveling-wave ODE."""
    p = _check_family(family, tmap, params or {})
    if family == "burgers":
        return BurgersNonlinearity(float(tmap.v))
    if family == "heat":
        return HeatNonlinearity(float(tmap.v), p["n"])
    return WaveNonlinearity(p["alpha"], float(tmap.a), p["n"])


def _heat_H(u, v, n):
    # antiderivative of 1 / (v + u^(n-1)); for v < 0 the argument exceeds 1 and
    # the real part of the continuation still differentiates to the integrand
    return u / v * hyp2f1(1.0, 1.0 / (n - 1), n / (n - 1), -(u ** (n - 1)) / v, continuation=v < 0)


def heat_slope(tmap, n, s, chi):
    """Slope ``G0(chi) = g^{-1}(g(s) - chi)`` of the heat Green's function.

    ``g(u) = ln(1 / (1 + v u^(1-n))) / ((n-1) v)`` inverts in closed form.
    """
    v = tmap.v
    chi = np.asarray(chi, dtype=float)
    base = ((1.0 + v * s ** (1 - n)) * np.exp((n - 1) * v * chi) - 1.0) / v
    if np.any(base <= 0):
        raise DomainError("heat: g(s) - chi leaves the range of g (no positive slope)")
    return base ** (1.0 / (1 - n))


def closed_green(family, tmap, params, s, chi):
    """Closed-form Green's function ``theta(chi) w0(chi)`` of a reduced family."""
    p = _check_family(family, tmap, params or {})
    chi = np.asarray(chi, dtype=float)
    pos = chi >= 0
    c = np.where(pos, chi, 0.0)
    v = float(tmap.v)
    if family == "burgers":
        arg = math.sqrt(2 / math.pi) * (s / v) * (1.0 - np.exp(-v * c))
        if np.any(np.abs(arg) >= 1):
            raise DomainError("burgers: need sqrt(2/pi) |s/v| |1 - exp(-v chi)| < 1 on the window")
        w = math.sqrt(2) * erf_inv(arg)
    elif family == "heat":
        n = p["n"]
        if not s > 0:
            raise DomainError("heat: slope s > 0 required")
        if v < 0 and np.any(1 + v * s ** (1 - n) <= 0):
            raise DomainError("heat: need 1 + v s^(1-n) > 0")
        w = _heat_H(s, v, n) - _heat_H(heat_slope(tmap, n, s, c), v, n)
    else:
        n, alpha = p["n"], p["alpha"]
        a = tmap.a
        if not s > 0:
            raise DomainError("wave: slope s > 0 required")
        base = s ** (1 - n) + alpha * (n - 1) / a * c
        if np.any(base <= 0):
            raise DomainError("wave: radicand s^(1-n) + alpha (n-1) chi / a must stay positive")
        w = a / (alpha * (n - 2)) * (base ** ((2 - n) / (1 - n)) - s ** (2 - n))
    out = np.where(pos, w, 0.0)
    return out if out.ndim else float(out)


def heat_n2_explicit(tmap, s, chi):
    """Explicit ``n = 2`` heat Green's function, ``-v chi + ln(((s+v) e^{v chi} - s) / v)``."""
    v = float(tmap.v)
    chi = np.asarray(chi, dtype=float)
    c = np.where(chi >= 0, chi, 0.0)
    arg = ((s + v) * np.exp(v * c) - s) / v
    if np.any(arg <= 0):
        raise DomainError("heat n=2: logarithm argument must be positive")
    out = np.where(chi >= 0, -v * c + np.log(arg), 0.0)
    return out if out.ndim else float(out)


def lift_to_xt(w, tmap, x_grid, t_grid):
    """Field ``F[i, j] = w(x_i - v t_j)`` by monotone cubic interpolation, zero behind the front."""
    x = np.asarray(x_grid, dtype=float)
    t = np.asarray(t_grid, dtype=float)
    chi = x[:, None] - tmap.v * t[None, :]
    i0 = w.index_of(0.0) if w.t0 < 0 else 0
    if w.t0 > 1e-9 * w.h:
        raise DomainError("trajectory must start at chi <= 0")
    need = float(chi.max())
    if need > w.t_end + 1e-9 * w.h:
        raise DomainError(f"chi range [0, {need:.6g}] exceeds trajectory window [0, {w.t_end:.6g}]")
    grid = w.t[i0:]
    interp = PchipInterpolator(grid, w.values[i0:], extrapolate=False)
    field = np.zeros_like(chi)
    ahead = chi >= 0
    field[ahead] = interp(np.minimum(chi[ahead], grid[-1]))
    return field


def pde_residual(family, field, x_grid, t_grid, tmap, params=None, band=3):
    """Central-difference PDE residual on interior points; NaN within ``band`` steps of the front."""
    p = _check_family(family, tmap, params or {})
    x = np.asarray(x_grid, dtype=float)
    t = np.asarray(t_grid, dtype=float)
    hx = x[1] - x[0]
    ht = t[1] - t[0]
    F = field
    c = F[1:-1, 1:-1]
    w_x = (F[2:, 1:-1] - F[:-2, 1:-1]) / (2 * hx)
    w_xx = (F[2:, 1:-1] - 2 * c + F[:-2, 1:-1]) / hx ** 2
    w_t = (F[1:-1, 2:] - F[1:-1, :-2]) / (2 * ht)
    w_tt = (F[1:-1, 2:] - 2 * c + F[1:-1, :-2]) / ht ** 2
    if family == "burgers":
        res = w_t - w_xx + c * w_t ** 2
    elif family == "heat":
        res = w_t - w_xx - w_x ** p["n"]
    else:
        res = w_tt + p["alpha"] * w_t ** p["n"] - tmap.c ** 2 * w_xx
    chi = x[1:-1, None] - tmap.v * t[None, 1:-1]
    reach = band * max(hx, abs(tmap.v) * ht)
    return np.where(np.abs(chi) <= reach, np.nan, res)


def separation_exponential(smap, x, t):
    """Similarity variable ``chi`` of the exponential-diffusivity wave equation and the factor ``4/a1``.

    ``chi^2 = a1 (exp(-lam x) / (alpha lam^2) - (t + a2)^2 / 4)``; the reduced
    ODE is ``w'' + (4/a1) N(w', w, chi) = 0``.
    """
    rad = smap.a1 * (math.exp(-smap.lam * x) / (smap.alpha * smap.lam ** 2) - (t + smap.a2) ** 2 / 4)
    if rad < 0:
        if rad > -1e-14 * abs(smap.a1):
            rad = 0.0
        else:
            raise DomainError(f"separation: negative radicand {rad:.6g} at (x, t) = ({x}, {t})")
    return math.sqrt(rad), 4.0 / smap.a1


@dataclass(frozen=True)
class _ScaledNonlinearity:
    inner: object
    scale: float

    def __call__(self, wp, w, t):
        return self.scale * self.inner(wp, w, t)


def separated_nonlinearity(nonlinearity, smap):
    """``(4/a1) N`` as a nonlinearity for the Cauchy solvers."""
    return _ScaledNonlinearity(nonlinearity, 4.0 / smap.a1)


@dataclass(frozen=True)
class _SpatialPart:
    nx: object
    C: float

    def __call__(self, wp, w, x):
        return self.nx(wp, x) - self.C


@dataclass(frozen=True)
class _TemporalPart:
    nt: object
    C: float

    def __call__(self, wp, w, t):
        return -self.nt(wp, t) - self.C


def additive_separation(nx, nt, C):
    """Split ``w_tt = w_xx + Nx(w_x, x) + Nt(w_t, t)`` with ``w = psi(x) + phi(t)``.

    Returns the nonlinearities of ``psi'' + Nx(psi', x) - C = 0`` and
    ``phi'' - Nt(phi', t) - C = 0`` in the ``w'' + N(w', w, t) = 0`` form.
    """
    return _SpatialPart(nx, float(C)), _TemporalPart(nt, float(C))
