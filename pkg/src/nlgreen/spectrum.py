"""Operator spectra read off the periodic structure of closed-form Green's functions.

* cubic: ``omega_n = pi (2n + 1) / (2 K(-1) 2^(1/4))``, odd harmonics of the sn period
* sine_gordon: ``omega_n = n pi / (sqrt(2) K(2))``; ``K(2)`` is complex, so
  every mode beyond the zero mode carries an imaginary part
* quadratic: ``eps_n = n pi c / omega1(0, c2)`` with ``c = (-6)^(-1/3)`` (principal)

``fft_peaks`` gives the numerical cross-check on sampled kernels.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks

from .cauchy import SampledTrajectory
from .errors import DomainError, ShapeError
from .specfun import ellip_k, weierstrass_periods

KINDS = ("cubic", "sine_gordon", "quadratic")
C_QUADRATIC = complex(-6.0) ** (-1.0 / 3.0)


@dataclass(frozen=True)
class SpectrumSet:
    frequencies: np.ndarray
    kind: str
    zero_mode_included: bool
    indices: np.ndarray

    @property
    def magnitudes(self):
        return np.abs(self.frequencies)

    def __len__(self):
        return len(self.frequencies)


def analytic_spectrum(kind, n_max, params=None):
    """First ``n_max`` modes of the named spectrum.

    ``quadratic`` takes ``params={"c2": ...}`` (the lattice invariant g3, g2 = 0).
    """
    params = dict(params or {})
    if int(n_max) != n_max or n_max < 1:
        raise DomainError("n_max must be a positive integer")
    n_max = int(n_max)
    if kind == "cubic":
        n = np.arange(n_max)
        base = math.pi / (2.0 * ellip_k(-1.0).real * 2.0 ** 0.25)
        return SpectrumSet((2 * n + 1) * base + 0j, kind, False, n)
    if kind == "sine_gordon":
        n = np.arange(n_max)
        base = math.pi / (math.sqrt(2.0) * ellip_k(2.0))
        return SpectrumSet(n * base, kind, True, n)
    if kind == "quadratic":
        c2 = float(params.pop("c2", 1.0))
        if params:
            raise DomainError(f"quadratic spectrum: unknown parameter(s) {sorted(params)}")
        w1 = weierstrass_periods(0.0, c2)[0]
        n = np.arange(1, n_max + 1)
        return SpectrumSet(n * math.pi * C_QUADRATIC / w1, kind, False, n)
    raise DomainError(f"unknown spectrum kind {kind!r}; choose from {KINDS}")


def _spectrum(G):
    if isinstance(G, SampledTrajectory):
        values, h = G.values, G.h
    else:
        values, h = G
    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or values.size < 256:
        raise ShapeError("fft_peaks needs a 1-D signal of at least 256 samples")
    x = (values - values.mean()) * np.hanning(values.size)
    mag = np.abs(np.fft.rfft(x))
    omega = 2.0 * math.pi * np.fft.rfftfreq(values.size, d=h)
    return omega, mag


def fft_peaks(G, n_peaks=1):
    """Dominant angular frequencies of a uniformly sampled real signal, ascending.

    ``G`` is a SampledTrajectory or a ``(values, h)`` pair. Hann window,
    the ``n_peaks`` largest local maxima, parabolic interpolation on the
    log magnitude.
    """
    omega, mag = _spectrum(G)
    logm = np.log(np.maximum(mag, 1e-300))
    idx, _ = find_peaks(mag)
    if idx.size == 0:
        return np.array([])
    idx = idx[np.argsort(mag[idx])[::-1][:n_peaks]]
    dw = omega[1] - omega[0]
    out = []
    for i in idx:
        a, b, c = logm[i - 1], logm[i], logm[i + 1]
        den = a - 2 * b + c
        shift = 0.5 * (a - c) / den if den != 0 else 0.0
        out.append(omega[i] + shift * dw)
    return np.sort(np.array(out))


def spectral_level_db(G, omega_query, omega_ref):
    """Windowed spectral magnitude near ``omega_query`` relative to ``omega_ref``, in dB.

    Each level is the maximum over the bins within one bin of the query,
    so a leakage floor is not mistaken for a suppressed peak.
    """
    omega, mag = _spectrum(G)
    dw = omega[1] - omega[0]

    def level(w):
        sel = np.abs(omega - w) <= 1.5 * dw
        return mag[sel].max()

    return 20.0 * math.log10(level(omega_query) / level(omega_ref))
