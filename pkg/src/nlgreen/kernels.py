"""Catalogue of closed-form nonlinear Green's functions.

Each entry pairs a nonlinearity ``N(w', w, t)`` with the closed form of
``theta(t) * w0(t)``, where ``w0`` solves ``w0'' + N = 0`` with ``w0(0) = 0``
and ``w0'(0) = s``. The integration constants ``c1, c2`` that the closed
forms carry are fixed from these Cauchy conditions; rows whose constants
the caller wants to pin directly accept ``c1``/``c2`` instead of ``s``.

Rows with complex intermediates (linear-cubic, sinh, quadratic-gradient,
advective with ``s < 0``) are evaluated in complex arithmetic and
projected to the real axis with an imaginary-part guard.
"""

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import optimize

from . import reduce as _reduce
from .errors import AccuracyError, DomainError
from .specfun import (
    as_real,
    ellip_k,
    erf_inv,
    erf_inv_complex,
    jacobi,
    lambert_w0,
    weierstrass_periods,
    weierstrass_pp,
)


@dataclass(frozen=True)
class KernelSpec:
    id: str
    term: str
    defaults: dict
    nonlinearity_factory: Callable
    evaluate: Callable
    resolve: Callable
    jump: Callable
    window: Callable
    offset: float = 0.0
    theorem2: bool = True
    overrides: tuple = ()
    notes: str = ""

    @property
    def params_schema(self):
        return tuple(self.defaults) + tuple(o for o in self.overrides if o not in self.defaults)

    def constants(self, params=None):
        params = dict(params or {})
        allowed = set(self.defaults) | set(self.overrides)
        unknown = set(params) - allowed
        if unknown:
            raise DomainError(f"{self.id}: unknown parameter(s) {sorted(unknown)}; allowed {sorted(allowed)}")
        merged = dict(self.defaults)
        merged.update({k: float(v) for k, v in params.items()})
        return self.resolve(merged)

    def nonlinearity(self, params=None):
        return self.nonlinearity_factory(self.constants(params))

    def closed_form(self, t, params=None):
        return _causal(self, t, self.constants(params))


def _causal(spec, t, k):
    t = np.asarray(t, dtype=float)
    tt = np.atleast_1d(t)
    out = np.zeros(tt.shape)
    pos = tt >= 0
    if np.any(pos):
        out[pos] = np.asarray(spec.evaluate(tt[pos], k), dtype=float)
    return out.reshape(t.shape) if t.ndim else float(out[0])


def _pos(name, k):
    if not k[name] > 0:
        raise DomainError(f"parameter {name} must be positive, got {k[name]}")


# -------------------------------------------------------------------------
# quadratic: w'' + w^2 = 0, G = -wp(c t + c1; 0, c2) / c with c^3 = 1/6

_C_QUAD = 6.0 ** (-1.0 / 3.0)


def _quad_resolve(p):
    s = p["s"]
    k = {"s": s, "c": _C_QUAD}
    if s == 0:
        return k | {"zero": True}
    g3 = -s * s
    w_r = weierstrass_periods(0.0, g3)[0].real
    root = optimize.brentq(lambda z: weierstrass_pp(z, 0.0, g3)[0], 1e-6 * w_r, w_r, xtol=1e-15, rtol=1e-15)
    c1 = root if s > 0 else 2 * w_r - root
    return k | {"zero": False, "c1": c1, "c2": g3, "omega": w_r, "t_pole": (2 * w_r - c1) / _C_QUAD}


def _quad_eval(t, k):
    if k["zero"]:
        return np.zeros_like(t)
    c = k["c"]
    return -weierstrass_pp(c * t + k["c1"], 0.0, k["c2"])[0] / c


def _quad_window(k):
    return 2.0 if k["zero"] else min(2.0, 0.6 * k["t_pole"])


# -------------------------------------------------------------------------
# cubic: w'' + w^3 = 0, G = A sn(beta t, m=-1), A = sqrt(2) beta, s = A beta


def _cubic_resolve(p):
    s = p["s"]
    beta = math.sqrt(abs(s) / math.sqrt(2.0))
    return {"s": s, "beta": beta, "amp": math.copysign(math.sqrt(2.0) * beta, s)}


def _cubic_eval(t, k):
    return k["amp"] * jacobi(k["beta"] * t, -1.0)[0]


# -------------------------------------------------------------------------
# linear-cubic: w'' + w + w^3 = 0,
# G = sqrt(2 - c1) i sn(sqrt(c1/2) |t + c2|, (2 - c1)/c1); real for c1 > 2


def _lincubic_resolve(p):
    if "c1" in p:
        c1 = p["c1"]
        c2 = p.get("c2", 0.0)
        _pos("c1", {"c1": c1})
        s = None
    else:
        s = p["s"]
        c1 = 1.0 + math.sqrt(1.0 + 2.0 * s * s)
        m = (2.0 - c1) / c1
        beta = math.sqrt(c1 / 2.0)
        c2 = 0.0 if s < 0 else 2.0 * ellip_k(m).real / beta
    k = {"c1": c1, "c2": c2, "m": (2.0 - c1) / c1, "beta": math.sqrt(c1 / 2.0)}
    if s is None:
        amp = np.sqrt(complex(2.0 - c1)) * 1j
        _, cn, dn, _ = jacobi(k["beta"] * abs(c2), k["m"])
        s = as_real(amp * k["beta"] * cn * dn * (1.0 if c2 >= 0 else -1.0), what="linear-cubic slope")
    k["s"] = s
    return k


def _lincubic_eval(t, k):
    sn = jacobi(k["beta"] * np.abs(t + k["c2"]), k["m"])[0]
    return as_real(np.sqrt(complex(2.0 - k["c1"])) * 1j * sn, what="linear-cubic G")


# -------------------------------------------------------------------------
# inverse: w'' + 1/w = 0, G = c1 exp(-phi^2),
# phi = erf^{-1}(-sqrt(2/pi) |t + c2| / |c1|), c2 = -|c1| sqrt(pi/2).
# The slope at 0+ is unbounded, so there is no finite jump s.


def _inverse_resolve(p):
    c1 = p["c1"]
    if c1 == 0:
        raise DomainError("inverse: c1 must be non-zero")
    half = abs(c1) * math.sqrt(math.pi / 2.0)
    return {"c1": c1, "c2": p.get("c2", -half), "half": half, "s": math.inf}


def _inverse_eval(t, k):
    arg = -math.sqrt(2.0 / math.pi) * np.abs(t + k["c2"]) / abs(k["c1"])
    if np.any(arg < -1.0 - 1e-12):
        raise DomainError("inverse: erf^{-1} argument below -1; t outside (0, 2|c1| sqrt(pi/2))")
    edge = arg <= -1.0
    phi = erf_inv(np.where(edge, 0.0, arg))
    return np.where(edge, 0.0, k["c1"] * np.exp(-phi * phi))


def _inverse_nl(k):
    return lambda wp, w, t: 1.0 / w


# -------------------------------------------------------------------------
# inverse-cubic: w'' + 1/w^3 = 0, G = sqrt(c1^2 (t + c2)^2 - 1) / sqrt(c1), c2 = 1/c1.


def _invcubic_resolve(p):
    _pos("c1", p)
    return {"c1": p["c1"], "c2": p.get("c2", 1.0 / p["c1"]), "s": math.inf}


def _invcubic_eval(t, k):
    c1 = k["c1"]
    rad = np.maximum(c1 * c1 * (t + k["c2"]) ** 2 - 1.0, 0.0)
    return as_real(np.sqrt(rad + 0j) / np.sqrt(complex(c1)), what="inverse-cubic G")


# -------------------------------------------------------------------------
# exponential: w'' + e^w = 0, G = ln(c1/2 (1 - tanh^2(sqrt(c1 (t + c2)^2) / 2)))


def _exp_resolve(p):
    if "c1" in p:
        c1, c2 = p["c1"], p.get("c2", 0.0)
        _pos("c1", p)
    else:
        s = p["s"]
        c1 = s * s + 2.0
        c2 = -2.0 / math.sqrt(c1) * math.atanh(s / math.sqrt(c1))
    s = -math.sqrt(c1) * math.tanh(math.sqrt(c1) * c2 / 2.0)
    return {"c1": c1, "c2": c2, "s": s}


def _exp_eval(t, k):
    c1 = k["c1"]
    return np.log(0.5 * c1 * (1.0 - np.tanh(0.5 * np.sqrt(c1 * (t + k["c2"]) ** 2)) ** 2))


# -------------------------------------------------------------------------
# sine / cosine: G = 2 am(beta t, m) (- pi/2 for cosine), beta = s/2, m = 4/s^2


def _am_resolve(p):
    s = p["s"]
    if s == 0:
        return {"s": 0.0, "beta": 0.0, "m": 0.0}
    return {"s": s, "beta": s / 2.0, "m": 4.0 / (s * s)}


def _sine_eval(t, k):
    return 2.0 * jacobi(k["beta"] * t, k["m"])[3]


def _cosine_eval(t, k):
    return _sine_eval(t, k) - math.pi / 2.0


# -------------------------------------------------------------------------
# sinh: w'' + sinh w = 0, G = 2i am(c1 |t + c2|, 1/c1^2), c1 = -i s/2, c2 = 0


def _sinh_resolve(p):
    s = p["s"]
    c1 = -0.5j * s
    return {"s": s, "c1": c1, "c2": 0.0, "m": (1.0 / (c1 * c1)).real if s else 0.0}


def _sinh_eval(t, k):
    if k["s"] == 0:
        return np.zeros_like(t)
    am = jacobi(k["c1"] * np.abs(t + k["c2"]), k["m"])[3]
    return as_real(2j * np.asarray(am), what="sinh G")


# -------------------------------------------------------------------------
# cosh: w'' + cosh w = 0. With y = e^w the energy integral gives
# y'^2 = -y^3 + s^2 y^2 + y, so y = s^2/3 - 4 wp(t + t0; g2, g3) with
# g2 = s^4/12 + 1/4 and g3 = -(s^6/216 + s^2/48). The discriminant is always
# positive and y in (0, y_max] keeps wp in [e3, e2], i.e. on the line
# Im z = |omega3|; y -> 0 (G -> -inf) where wp reaches e2 = s^2/12.


def _cosh_resolve(p):
    s = p["s"]
    b = s * s / 3.0
    g2 = s ** 4 / 12.0 + 0.25
    g3 = -(s ** 6 / 216.0 + s * s / 48.0)
    w1, w3 = (w for w in weierstrass_periods(g2, g3))
    w1 = w1.real
    target = (b - 1.0) / 4.0

    def f(x):
        return weierstrass_pp(w3 + x, g2, g3)[0].real - target

    # wp(w3 + x) rises from e3 at x = 0 to e2 at x = +-w1; s > 0 means y
    # increasing, i.e. wp decreasing, so the phase starts on (-w1, 0)
    if s == 0:
        x0 = 0.0
    elif s > 0:
        x0 = optimize.brentq(f, -w1, 0.0, xtol=1e-15, rtol=1e-15)
    else:
        x0 = optimize.brentq(f, 0.0, w1, xtol=1e-15, rtol=1e-15)
    return {"s": s, "b": b, "g2": g2, "g3": g3, "t0": w3 + x0, "t_end": w1 - x0}


def _cosh_eval(t, k):
    y = k["b"] - 4.0 * as_real(weierstrass_pp(t + k["t0"], k["g2"], k["g3"])[0], what="cosh wp")
    if np.any(y <= 0):
        raise DomainError("cosh: t beyond the finite-time singularity")
    return np.log(y)


# -------------------------------------------------------------------------
# advective: w'' + w w' = 0, G = c1 tanh(c1 (t + c2) / 2), c1 = sqrt(2 s)


def _adv_resolve(p):
    if "c1" in p:
        c1 = complex(p["c1"])
        c2 = p.get("c2", 0.0)
    else:
        c1 = np.sqrt(complex(2.0 * p["s"]))
        c2 = 0.0
    s = as_real(c1 * c1 / 2.0 / np.cosh(c1 * c2 / 2.0) ** 2, what="advective slope")
    return {"c1": c1, "c2": c2, "s": s}


def _adv_eval(t, k):
    c1 = k["c1"]
    return as_real(c1 * np.tanh(0.5 * c1 * (t + k["c2"])), what="advective G")


def _adv_window(k):
    if k["s"] >= 0 or k["c2"] != 0:
        return 10.0
    return min(10.0, 0.8 * math.pi / math.sqrt(-k["s"] / 2.0) / 2.0)


# -------------------------------------------------------------------------
# quadratic-gradient: w'' + w w'^2 = 0,
# G = -sqrt(2) i erf^{-1}(sqrt(2/pi) i c1 (t + c2)), c1 = s, c2 = 0


def _qgrad_resolve(p):
    c1 = p.get("c1", p["s"])
    c2 = p.get("c2", 0.0)
    phi = erf_inv_complex(1j * math.sqrt(2.0 / math.pi) * c1 * c2)
    s = as_real(c1 * np.exp(phi * phi), what="quadratic-gradient slope")
    return {"c1": c1, "c2": c2, "s": s}


def _qgrad_eval(t, k):
    arg = 1j * math.sqrt(2.0 / math.pi) * k["c1"] * (t + k["c2"])
    return as_real(-math.sqrt(2.0) * 1j * erf_inv_complex(arg), what="quadratic-gradient G")


# -------------------------------------------------------------------------
# cubic-gradient: w'' + g(w) w'^3 = 0 with g(w) = w^3.
# G0 = F^{-1}(t + c1), F(G) = int_0^G (c2 + int_0^z g) dz, c1 = 0, c2 = 1/s.

_GL_X, _GL_W = np.polynomial.legendre.leggauss(20)
_GL_X = 0.5 * (_GL_X + 1.0)
_GL_W = 0.5 * _GL_W


def _inner_integral(g, z):
    z = np.asarray(z, dtype=float)
    return z * (g(np.multiply.outer(z, _GL_X)) @ _GL_W)


def implicit_gradient_green(t, s, g=lambda w: w ** 3, c1=0.0):
    """Solve ``F(G) = t + c1`` for the ``g(w) (w')^3`` family by nested Gauss-Legendre quadrature.

    Newton iterations are safeguarded by a bracket ``[lo, hi]`` on which
    ``F`` is increasing (requires ``s > 0``).
    """
    if not s > 0:
        raise DomainError("cubic-gradient: slope s > 0 required")
    c2 = 1.0 / s
    t = np.atleast_1d(np.asarray(t, dtype=float)) + c1

    def F(G):
        G = np.asarray(G, dtype=float)
        inner = _inner_integral(g, np.multiply.outer(G, _GL_X))
        return G * ((c2 + inner) @ _GL_W)

    def dF(G):
        return c2 + _inner_integral(g, G)

    lo = np.zeros_like(t)
    hi = np.maximum(s * t, 1e-300)
    for _ in range(200):
        grow = F(hi) < t
        if not np.any(grow):
            break
        hi = np.where(grow, 2.0 * hi, hi)
    G = 0.5 * (lo + hi)
    for _ in range(100):
        r = F(G) - t
        lo = np.where(r < 0, G, lo)
        hi = np.where(r > 0, G, hi)
        step = r / dF(G)
        new = G - step
        bad = (new <= lo) | (new >= hi) | ~np.isfinite(new)
        new = np.where(bad, 0.5 * (lo + hi), new)
        done = np.abs(new - G) <= 1e-15 * np.maximum(1.0, np.abs(new))
        G = new
        if np.all(done):
            break
    else:
        raise AccuracyError("cubic-gradient inversion did not converge")
    return G


def exp_gradient_green(t, s):
    """Closed Lambert-W form for ``w'' + e^w (w')^3 = 0``, ``w(0) = 0``, ``w'(0) = s``.

    With ``k = 1/s - 1`` the solution satisfies ``t + 1 = k G + e^G`` and
    ``G = (t + 1 - k W(exp((t + 1)/k) / k)) / k``. Requires ``0 < s < 1``.
    """
    if not 0 < s < 1:
        raise DomainError("exp-gradient Lambert form requires 0 < s < 1")
    k = 1.0 / s - 1.0
    t = np.asarray(t, dtype=float)
    psi = np.exp((t + 1.0) / k) / k
    return np.where(t >= 0, (t + 1.0 - k * lambert_w0(psi)) / k, 0.0)


def _cgrad_resolve(p):
    _pos("s", p)
    return {"s": p["s"]}


def _cgrad_eval(t, k):
    return implicit_gradient_green(t, k["s"])


# -------------------------------------------------------------------------
# traveling-wave families


def _burgers_resolve(p):
    if p["v"] == 0:
        raise DomainError("burgers: v must be non-zero")
    return dict(p)


def _burgers_window(k):
    s, v = k["s"], k["v"]
    r = math.sqrt(2.0 / math.pi) * s / v
    if v > 0 and abs(r) > 1:
        return min(5.0, 0.8 * -math.log(1.0 - 1.0 / abs(r)) / v)
    if v < 0:
        # 1 - exp(-v chi) grows without bound
        lim = math.log(1.0 + 1.0 / abs(r)) / -v if r else 5.0
        return min(5.0, 0.8 * lim)
    return 5.0


def _wave_map(k):
    a = k["a"]
    if a == 0:
        raise DomainError("damped-wave: a must be non-zero")
    return _reduce.TravelingWaveMap(v=0.0, c=math.sqrt(a)) if a > 0 else _reduce.TravelingWaveMap(v=math.sqrt(-a))


def _wave_window(k):
    a, n, alpha, s = k["a"], k["n"], k["alpha"], k["s"]
    if a > 0:
        return 5.0
    return min(5.0, 0.8 * s ** (1 - n) * -a / (alpha * (n - 1)))


def _family_eval(family, tmap_fn, keys):
    def evaluate(t, k):
        params = {key: k[key] for key in keys}
        return _reduce.closed_green(family, tmap_fn(k), params, k["s"], t)

    return evaluate


def _same(p):
    return dict(p)


def _const(value):
    return lambda k: value


def _s_of(k):
    return k["s"]


def _nl(fn):
    return lambda k: fn


_CATALOGUE = [
    KernelSpec("quadratic", "w^2", {"s": 1.0}, _nl(lambda wp, w, t: w * w), _quad_eval, _quad_resolve, _s_of, _quad_window,
               notes="wp-based; real cube root c = 6^(-1/3), g3 = -s^2"),
    KernelSpec("cubic", "w^3", {"s": 1.0}, _nl(lambda wp, w, t: w ** 3), _cubic_eval, _cubic_resolve, _s_of, _const(10.0)),
    KernelSpec("linear-cubic", "w + w^3", {"s": 1.0}, _nl(lambda wp, w, t: w + w ** 3), _lincubic_eval, _lincubic_resolve,
               _s_of, _const(10.0), overrides=("c1", "c2"), notes="real for c1 > 2"),
    KernelSpec("inverse", "1/w", {"c1": 1.0}, _inverse_nl, _inverse_eval, _inverse_resolve, _s_of,
               lambda k: 1.8 * k["half"], theorem2=False, overrides=("c2",), notes="slope unbounded at 0+"),
    KernelSpec("inverse-cubic", "1/w^3", {"c1": 1.0}, _nl(lambda wp, w, t: 1.0 / w ** 3), _invcubic_eval,
               _invcubic_resolve, _s_of, _const(3.0), theorem2=False, overrides=("c2",), notes="slope unbounded at 0+"),
    KernelSpec("exponential", "exp(w)", {"s": 1.0}, _nl(lambda wp, w, t: math.exp(w)), _exp_eval, _exp_resolve, _s_of,
               _const(3.0), theorem2=False, overrides=("c1", "c2")),
    KernelSpec("sine", "sin(w)", {"s": math.sqrt(2.0)}, _nl(lambda wp, w, t: math.sin(w)), _sine_eval, _am_resolve, _s_of,
               _const(10.0)),
    KernelSpec("cosine", "cos(w)", {"s": math.sqrt(2.0)}, _nl(lambda wp, w, t: math.cos(w)), _cosine_eval, _am_resolve,
               _s_of, _const(10.0), offset=-math.pi / 2.0, theorem2=False),
    KernelSpec("sinh", "sinh(w)", {"s": 1.0}, _nl(lambda wp, w, t: math.sinh(w)), _sinh_eval, _sinh_resolve, _s_of,
               _const(10.0)),
    KernelSpec("cosh", "cosh(w)", {"s": 1.0}, _nl(lambda wp, w, t: math.cosh(w)), _cosh_eval, _cosh_resolve, _s_of,
               lambda k: min(5.0, 0.7 * k["t_end"]), theorem2=False, notes="G = ln(s^2/3 - 4 wp(t + t0))"),
    KernelSpec("advective", "w w'", {"s": 1.0}, _nl(lambda wp, w, t: w * wp), _adv_eval, _adv_resolve, _s_of,
               _adv_window, overrides=("c1", "c2")),
    KernelSpec("quadratic-gradient", "w (w')^2", {"s": 1.0}, _nl(lambda wp, w, t: w * wp * wp), _qgrad_eval,
               _qgrad_resolve, _s_of, _const(10.0), overrides=("c1", "c2")),
    KernelSpec("cubic-gradient", "w^3 (w')^3", {"s": 1.0}, _nl(lambda wp, w, t: w ** 3 * wp ** 3), _cgrad_eval,
               _cgrad_resolve, _s_of, _const(5.0)),
    KernelSpec("burgers", "v w' - w (w')^2", {"s": 0.5, "v": 1.0},
               lambda k: _reduce.BurgersNonlinearity(k["v"]),
               _family_eval("burgers", lambda k: _reduce.TravelingWaveMap(k["v"]), ()), _burgers_resolve, _s_of,
               _burgers_window),
    KernelSpec("heat-gradient", "v w' + (w')^n", {"s": 1.0, "v": 1.0, "n": 2.0},
               lambda k: _reduce.HeatNonlinearity(k["v"], int(k["n"])),
               _family_eval("heat", lambda k: _reduce.TravelingWaveMap(k["v"]), ("n",)), _same, _s_of, _const(5.0)),
    KernelSpec("damped-wave", "(alpha/a) (w')^n", {"s": 1.0, "n": 3.0, "alpha": 1.0, "a": 3.0},
               lambda k: _reduce.WaveNonlinearity(k["alpha"], k["a"], int(k["n"])),
               _family_eval("wave", _wave_map, ("n", "alpha")), _same, _s_of, _wave_window),
]

KERNELS = {spec.id: spec for spec in _CATALOGUE}


def list_kernels():
    """All catalogued kernels, in table order."""
    return list(_CATALOGUE)


def get_kernel(kernel_id):
    try:
        return KERNELS[kernel_id]
    except KeyError:
        raise DomainError(f"unknown kernel {kernel_id!r}; choose from {sorted(KERNELS)}") from None


def eval_kernel(kernel_id, t, params=None):
    """Closed-form Green's function value(s); exactly zero for ``t < 0``."""
    return get_kernel(kernel_id).closed_form(t, params)


def kernel_nonlinearity(kernel_id, params=None):
    return get_kernel(kernel_id).nonlinearity(params)


def kernel_window(kernel_id, params=None):
    """Default validity window ``T_max`` for the row at these parameters."""
    spec = get_kernel(kernel_id)
    return float(spec.window(spec.constants(params)))


def analytic_jump(kernel_id, params=None):
    spec = get_kernel(kernel_id)
    return float(spec.jump(spec.constants(params)))


def kernel_jump(kernel_id, params=None, h0=0.05, levels=8):
    """Right-derivative of the closed form at 0 by Richardson-extrapolated forward differences.

    Rows whose slope is unbounded at ``0+`` return ``inf``.
    """
    spec = get_kernel(kernel_id)
    k = spec.constants(params)
    if math.isinf(spec.jump(k)):
        return math.inf
    h0 = min(h0, 0.25 * float(spec.window(k)))
    hs = h0 / 2.0 ** np.arange(levels)
    g = _causal(spec, np.concatenate([[0.0], hs]), k)
    table = [(g[1:] - g[0]) / hs]
    for j in range(1, levels):
        prev = table[-1]
        table.append(prev[1:] + (prev[1:] - prev[:-1]) / (2.0 ** j - 1.0))
    best = table[-1][0]
    prev_best = table[-2][-1]
    if abs(best - prev_best) > 1e-7 * max(1.0, abs(best)):
        raise AccuracyError(f"{kernel_id}: one-sided slope did not converge ({prev_best} vs {best})")
    return float(best)
