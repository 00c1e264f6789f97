"""Short-time-expansion solutions of ``w'' + N(w', w, t) = f(t)``.

The first-order approximation is ``w(t) ~ a0 * int_0^t G(t - tau) f(tau) dtau``;
the K-term expansion adds ``a_k * int_0^t (t - tau)^k G(t - tau) f(tau) dtau``.
Convolutions use the composite trapezoid rule on the Green's function grid.
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .cauchy import CauchyProblem, SampledTrajectory, integrate
from .errors import ShapeError


@dataclass(frozen=True)
class SourceFunction:
    """Source term: ``delta`` impulse, ``heaviside`` step or ``analytic`` callable.

    A delta source is realised as a slope jump of size ``weight`` at ``tau0``
    unless ``epsilon`` is set, in which case it becomes a one-sided Gaussian
    of width ``epsilon`` carrying the same total weight.
    """

    kind: str
    tau0: float = 0.0
    weight: float = 1.0
    func: Optional[Callable] = None
    name: str = ""
    epsilon: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("delta", "heaviside", "analytic"):
            raise ValueError(f"unknown source kind {self.kind!r}")
        if self.kind == "analytic" and self.func is None:
            raise ValueError("analytic source needs a callable")
        if not math.isfinite(self.weight):
            raise ValueError("delta weight must be finite")
        if not self.name:
            object.__setattr__(self, "name", self.kind)

    @property
    def impulses(self):
        if self.kind == "delta" and self.epsilon is None:
            return ((self.tau0, self.weight),)
        return ()

    def forcing(self, t):
        if self.kind == "analytic":
            return float(self.func(t))
        if self.kind == "heaviside":
            return 1.0 if t >= self.tau0 else 0.0
        if self.epsilon is None or t < self.tau0:
            return 0.0
        x = (t - self.tau0) / self.epsilon
        return self.weight * math.sqrt(2.0 / math.pi) / self.epsilon * math.exp(-0.5 * x * x)

    def sample(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "analytic":
            return np.asarray(self.func(t), dtype=float) * np.ones_like(t)
        if self.kind == "heaviside":
            return (t >= self.tau0).astype(float)
        return np.array([self.forcing(x) for x in t])


def _poly3(t):
    return 1.0 + t + t ** 2 + t ** 3


BUILTIN_SOURCES = {
    "delta": SourceFunction("delta", name="delta"),
    "heaviside": SourceFunction("heaviside", name="heaviside"),
    "sin": SourceFunction("analytic", func=np.sin, name="sin"),
    "exp": SourceFunction("analytic", func=np.exp, name="exp"),
    "poly3": SourceFunction("analytic", func=_poly3, name="poly3"),
    "log1p": SourceFunction("analytic", func=np.log1p, name="log1p"),
}


def builtin_source(name):
    try:
        return BUILTIN_SOURCES[name]
    except KeyError:
        raise ValueError(f"unknown source {name!r}; choose from {sorted(BUILTIN_SOURCES)}") from None


@dataclass(frozen=True)
class ExpansionCoefficients:
    a: tuple

    def __post_init__(self):
        a = tuple(float(x) for x in np.atleast_1d(self.a))
        if not a:
            raise ValueError("need at least a0")
        object.__setattr__(self, "a", a)

    @property
    def order(self):
        return len(self.a) - 1


def _from_zero(G):
    if G.t0 > 1e-9 * G.h:
        raise ShapeError("Green's function must be sampled from t = 0")
    i0 = G.index_of(0.0)
    return G.values[i0:], G.h


def _trapezoid_conv(kernel, fvals, h):
    """``h * trapz_j kernel[i - j] f[j]`` for every i, with ``w[0] = 0``."""
    n = kernel.size
    full = np.convolve(kernel, fvals)[:n]
    w = h * (full - 0.5 * (kernel * fvals[0] + kernel[0] * fvals))
    w[0] = 0.0
    return w


def _source_on_grid(f, n, h):
    if isinstance(f, SampledTrajectory):
        if abs(f.t0) > 1e-9 * h or not math.isclose(f.h, h, rel_tol=1e-12) or len(f) < n:
            raise ShapeError("source samples are not co-sampled with the Green's function")
        return "samples", f.values[:n], 0
    if f.kind == "delta":
        return "delta", None, _grid_index(f.tau0, h)
    if f.kind == "heaviside":
        k0 = _grid_index(f.tau0, h)
        return "heaviside", np.ones(max(n - k0, 0)), k0
    return "samples", f.sample(h * np.arange(n)), 0


def _grid_index(tau, h):
    k = tau / h
    if abs(k - round(k)) > 1e-6 or k < -1e-9:
        raise ShapeError(f"tau0 = {tau} is not a non-negative grid point")
    return int(round(k))


def _convolve_kernel(kernel, f, h):
    n = kernel.size
    kind, fvals, k0 = _source_on_grid(f, n, h)
    w = np.zeros(n)
    if kind == "delta":
        if k0 < n:
            w[k0:] = f.weight * kernel[: n - k0]
        return w
    if k0 < n:
        w[k0:] = _trapezoid_conv(kernel[: n - k0], fvals, h)
    return w


def convolve_first_order(G, f, a0):
    """First-order approximation ``a0 * int_0^t G(t - tau) f(tau) dtau`` on G's grid."""
    g, h = _from_zero(G)
    return SampledTrajectory(0.0, h, a0 * _convolve_kernel(g, f, h))


def short_time_expansion(G, f, coeffs):
    """K-term expansion ``sum_k a_k int_0^t (t - tau)^k G(t - tau) f(tau) dtau``."""
    if not isinstance(coeffs, ExpansionCoefficients):
        coeffs = ExpansionCoefficients(coeffs)
    g, h = _from_zero(G)
    t = h * np.arange(g.size)
    w = coeffs.a[0] * _convolve_kernel(g, f, h)
    for k, ak in enumerate(coeffs.a[1:], start=1):
        w = w + ak * _convolve_kernel(t ** k * g, f, h)
    return SampledTrajectory(0.0, h, w)


def reference_solution(nonlinearity, f, w0=0.0, wp0=0.0, window=(0.0, 1.0), tol=1e-10, h_out=1e-3):
    """High-accuracy trajectory of the forced equation (the error-metric oracle)."""
    if np.ndim(window) == 0:
        window = (0.0, float(window))
    return integrate(CauchyProblem(nonlinearity, f, w0, wp0, tuple(window)), h_out, tol)
