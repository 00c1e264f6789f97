"""Complex-capable special functions used by the kernels and spectra.

Elliptic functions take the *parameter* ``m = k**2`` throughout.
"""

import cmath
import math

import mpmath
import numpy as np
from scipy import optimize, special

from .errors import AccuracyError, DomainError, PoleError

IMAG_GUARD = 1e-8
_AGM_MAXITER = 64


def as_real(z, tol=IMAG_GUARD, what="value"):
    """Project ``z`` to the real axis, refusing if the imaginary part is large.

    The guard is relative to ``max(1, |z|)`` so that large real values
    carrying round-off in their imaginary part still project.
    """
    z = np.asarray(z)
    if not np.iscomplexobj(z):
        return z.astype(float) if z.ndim else float(z)
    scale = np.maximum(1.0, np.abs(z.real))
    bad = np.abs(z.imag) > tol * scale
    if np.any(bad):
        worst = np.max(np.abs(z.imag)[bad])
        raise DomainError(f"{what} has imaginary part {worst:.3g} > {tol:g}")
    out = z.real.astype(float)
    return out if out.ndim else float(out)


def agm(a, b):
    """Arithmetic-geometric mean with the optimal choice of square roots."""
    a = complex(a)
    b = complex(b)
    if abs(a - b) > abs(a + b):
        b = -b
    for _ in range(_AGM_MAXITER):
        if abs(a - b) <= 4e-16 * abs(a):
            return a
        a, b = 0.5 * (a + b), cmath.sqrt(a * b)
        if abs(a - b) > abs(a + b):
            b = -b
    raise AccuracyError(f"AGM did not converge for ({a}, {b})")


def ellip_k(m):
    """Complete elliptic integral of the first kind K(m), analytically continued.

    For real ``m > 1`` the branch with positive imaginary part is returned,
    ``K(m) = (K(1/m) + i K(1 - 1/m)) / sqrt(m)``.
    """
    m = complex(m)
    if not (math.isfinite(m.real) and math.isfinite(m.imag)):
        raise DomainError(f"ellip_k: non-finite parameter {m}")
    if m == 1:
        raise PoleError("ellip_k diverges at m = 1")
    if m.imag == 0.0 and m.real > 1.0:
        mr = m.real
        return (ellip_k(1.0 / mr).real + 1j * ellip_k(1.0 - 1.0 / mr).real) / math.sqrt(mr)
    k = math.pi / (2.0 * agm(1.0, cmath.sqrt(1.0 - m)))
    if m.imag == 0.0:
        return complex(k.real, 0.0)
    return k


def _jacobi_real(u, m):
    """sn, cn, dn, am for real ``u`` (array) and real parameter ``m``."""
    u = np.asarray(u, dtype=float)
    if 0.0 <= m <= 1.0:
        return special.ellipj(u, m)
    if m > 1.0:
        r = math.sqrt(m)
        sv, cv, dv, _ = special.ellipj(u * r, 1.0 / m)
        sn = sv / r
        # cn(u|m) = dn(v|1/m) > 0, so am stays in (-pi/2, pi/2)
        return sn, dv, cv, np.arctan2(sn, dv)
    r = math.sqrt(1.0 - m)
    sv, cv, dv, ph = special.ellipj(u * r, -m / (1.0 - m))
    sn = sv / (r * dv)
    cn = cv / dv
    base = np.arctan2(sn, cn)
    am = base + 2 * np.pi * np.round((ph - base) / (2 * np.pi))
    return sn, cn, 1.0 / dv, am


def _principal_am(sn, cn, reference):
    """Complex amplitude from sn, cn, shifted by 2*pi*k toward ``reference``."""
    am = -1j * np.log(cn + 1j * sn)
    return am + 2 * np.pi * np.round((reference - am.real) / (2 * np.pi))


def jacobi(u, m):
    """Jacobi elliptic functions ``(sn, cn, dn, am)`` of argument ``u`` and parameter ``m``.

    ``u`` may be a real or complex scalar or array; ``m`` a scalar. Real ``u``
    with real ``m`` returns real arrays with ``am`` continuous in ``u``.
    Complex ``u`` with real ``m`` uses the addition theorem on ``x + iy``.
    Non-real ``m`` falls back to mpmath, one element at a time.
    """
    m = complex(m)
    if not (math.isfinite(m.real) and math.isfinite(m.imag)):
        raise DomainError(f"jacobi: non-finite parameter {m}")
    u = np.asarray(u)
    if not np.all(np.isfinite(u)):
        raise DomainError("jacobi: non-finite argument")
    if m.imag != 0.0:
        return _jacobi_mpmath(u, m)
    m = m.real
    if not np.iscomplexobj(u) or np.all(u.imag == 0):
        out = _jacobi_real(np.real(u), m)
        return tuple(o if np.ndim(o) else float(o) for o in out)

    x, y = u.real, u.imag
    s, c, d, am_x = _jacobi_real(x, m)
    s1, c1, d1, _ = _jacobi_real(y, 1.0 - m)
    with np.errstate(divide="ignore", invalid="ignore"):
        den = c1 * c1 + m * (s * s1) ** 2
        sn = (s * d1 + 1j * c * d * s1 * c1) / den
        cn = (c * c1 - 1j * s * d * s1 * d1) / den
        dn = (d * c1 * d1 - 1j * m * s * c * s1) / den
    am = _principal_am(sn, cn, am_x)
    out = (sn, cn, dn, am)
    return tuple(o if np.ndim(o) else complex(o) for o in out)


def _jacobi_mpmath(u, m):
    flat = np.atleast_1d(u).astype(complex).ravel()
    res = np.empty((4, flat.size), dtype=complex)
    mm = mpmath.mpc(m.real, m.imag)
    for i, ui in enumerate(flat):
        uu = mpmath.mpc(ui.real, ui.imag)
        res[0, i] = complex(mpmath.ellipfun("sn", uu, m=mm))
        res[1, i] = complex(mpmath.ellipfun("cn", uu, m=mm))
        res[2, i] = complex(mpmath.ellipfun("dn", uu, m=mm))
    res[3] = _principal_am(res[0], res[1], 0.0)
    shape = np.shape(u)
    out = tuple(r.reshape(shape) for r in res)
    return tuple(o if np.ndim(o) else complex(o) for o in out)


# --------------------------------------------------------------------------
# Weierstrass


def weierstrass_roots(g2, g3):
    """Roots of ``4x^3 - g2 x - g3``, Newton-polished, real ones first (descending)."""
    g2 = complex(g2)
    g3 = complex(g3)
    disc = g2 ** 3 - 27 * g3 ** 2
    scale = max(abs(g2) ** 3, 27 * abs(g3) ** 2, 1e-300)
    if abs(disc) <= 1e-13 * scale:
        raise DomainError(f"degenerate lattice: g2^3 - 27 g3^2 = {disc:.3g}")
    roots = np.roots([4.0, 0.0, -g2, -g3]).astype(complex)
    for _ in range(3):
        roots = roots - (4 * roots ** 3 - g2 * roots - g3) / (12 * roots ** 2 - g2)
    if g2.imag == 0 and g3.imag == 0:
        tol = 1e-10 * max(1.0, np.max(np.abs(roots)))
        real = [r.real for r in roots if abs(r.imag) <= tol]
        cplx = sorted((r for r in roots if abs(r.imag) > tol), key=lambda r: -r.imag)
        return [complex(r) for r in sorted(real, reverse=True)] + list(cplx)
    return list(roots)


def _half_period(e, others):
    a = cmath.sqrt(e - others[0])
    b = cmath.sqrt(e - others[1])
    return math.pi / (2.0 * agm(a, b))


def weierstrass_periods(g2, g3):
    """Half-periods ``(omega1, omega2)`` of the lattice with invariants ``g2, g3``.

    ``omega1`` is real and positive whenever the invariants are real;
    ``omega2`` has positive imaginary part. Real invariants go through
    K(m) of the associated real parameter; complex invariants through the
    AGM of root differences followed by Gauss reduction.
    """
    roots = weierstrass_roots(g2, g3)
    g2c, g3c = complex(g2), complex(g3)
    if g2c.imag == 0 and g3c.imag == 0:
        if g2c.real ** 3 - 27 * g3c.real ** 2 > 0:
            e1, e2, e3 = sorted((r.real for r in roots), reverse=True)
            m = (e2 - e3) / (e1 - e3)
            lam = math.sqrt(e1 - e3)
            return complex(ellip_k(m).real / lam, 0.0), 1j * ellip_k(1 - m).real / lam
        e2 = roots[0].real
        h2 = abs(e2 - roots[1])
        m = 0.5 - 3 * e2 / (4 * h2)
        k, kp = ellip_k(m).real, ellip_k(1 - m).real
        lam = math.sqrt(h2)
        return complex(k / lam, 0.0), complex(k, kp) / (2 * lam)
    halves = []
    for i, e in enumerate(roots):
        others = [r for j, r in enumerate(roots) if j != i]
        halves.append(_half_period(e, others))
    w1 = halves[0]
    w2 = max(halves[1:], key=lambda w: abs((w / w1).imag))
    if (w2 / w1).imag == 0:
        raise DomainError("degenerate lattice: collinear half-periods")
    w1, w2 = _gauss_reduce(w1, w2)
    if (w2 / w1).imag < 0:
        w2 = -w2
    return w1, w2


def _gauss_reduce(w1, w2):
    if abs(w2) < abs(w1):
        w1, w2 = w2, w1
    for _ in range(64):
        k = round((w2 / w1).real)
        w2 = w2 - k * w1
        if abs(w2) >= abs(w1):
            break
        w1, w2 = w2, w1
    return w1, w2


def _laurent_coeffs(g2, g3, nterms):
    c = [0j] * (nterms + 2)
    c[2] = g2 / 20.0
    c[3] = g3 / 28.0
    for k in range(4, nterms + 2):
        acc = sum(c[j] * c[k - j] for j in range(2, k - 1))
        c[k] = 3.0 * acc / ((2 * k + 1) * (k - 3))
    return c


def _wp_laurent(z, g2, g3, nterms=28):
    """``(p, p')`` from the Laurent series plus argument halving and duplication."""
    w1, w2 = weierstrass_periods(g2, g3)
    basis = np.array([[2 * w1.real, 2 * w2.real], [2 * w1.imag, 2 * w2.imag]])
    coords = np.linalg.solve(basis, [z.real, z.imag])
    z = z - (round(coords[0]) * 2 * w1 + round(coords[1]) * 2 * w2)
    if abs(z) == 0.0:
        raise PoleError("weierstrass_p evaluated at a lattice point")
    radius = min(abs(2 * w1), abs(2 * w2), abs(2 * w1 + 2 * w2), abs(2 * w1 - 2 * w2))
    halvings = 0
    while abs(z) > 0.15 * radius:
        z /= 2
        halvings += 1
    c = _laurent_coeffs(complex(g2), complex(g3), nterms)
    z2 = z * z
    p = 1.0 / z2
    dp = -2.0 / (z2 * z)
    zp = 1.0 + 0j
    for k in range(2, nterms + 2):
        # zp = z^(2k-4) at the top of iteration k
        p += c[k] * zp * z2
        dp += (2 * k - 2) * c[k] * zp * z
        zp *= z2
    for _ in range(halvings):
        if dp == 0:
            raise AccuracyError("duplication through a half-period")
        ddp = 6 * p * p - g2 / 2
        lam = ddp / dp
        p2 = lam * lam / 4 - 2 * p
        dp = -dp - lam * (p2 - p)
        p = p2
    return p, dp


def weierstrass_pp(z, g2, g3):
    """``(wp(z), wp'(z))`` for scalar or array ``z``.

    Real invariants are evaluated through Jacobi functions of real parameter
    (accurate near machine precision on and off the real axis); complex
    invariants use the Laurent series with duplication.
    """
    g2c, g3c = complex(g2), complex(g3)
    z = np.asarray(z)
    if g2c.imag == 0 and g3c.imag == 0:
        p, dp = _wp_jacobi(z, g2c.real, g3c.real)
    else:
        flat = np.atleast_1d(z).astype(complex).ravel()
        pr = np.array([_wp_laurent(complex(zi), g2c, g3c) for zi in flat])
        p = pr[:, 0].reshape(z.shape)
        dp = pr[:, 1].reshape(z.shape)
    if not (np.all(np.isfinite(p)) and np.all(np.isfinite(dp))):
        raise PoleError("weierstrass_p evaluated at a lattice point")
    if np.ndim(p) == 0:
        p, dp = complex(p), complex(dp)
        if not np.iscomplexobj(z):
            p, dp = p.real, dp.real
    return p, dp


def _wp_jacobi(z, g2, g3):
    roots = weierstrass_roots(g2, g3)
    real = [r.real for r in roots if r.imag == 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        if g2 ** 3 - 27 * g3 ** 2 > 0:
            e1, e2, e3 = sorted((r.real for r in roots), reverse=True)
            lam = math.sqrt(e1 - e3)
            sn, cn, dn, _ = jacobi(lam * z, (e2 - e3) / (e1 - e3))
            sn, cn, dn = (np.asarray(a) for a in (sn, cn, dn))
            p = e3 + (e1 - e3) / sn ** 2
            dp = -2 * lam ** 3 * cn * dn / sn ** 3
        else:
            e2 = real[0]
            ec = [r for r in roots if r.imag != 0][0]
            h2 = abs(e2 - ec)
            lam = 2 * math.sqrt(h2)
            sn, cn, dn, _ = jacobi(lam * z, 0.5 - 3 * e2 / (4 * h2))
            sn, cn, dn = (np.asarray(a) for a in (sn, cn, dn))
            # near z = 0 use 1 - cn = sn^2 / (1 + cn) to avoid cancellation
            near = np.real(cn) > 0
            one_m = np.where(near, sn ** 2 / (1 + cn), 1 - cn)
            p = e2 + h2 * (1 + cn) / one_m
            dp = -2 * h2 * lam * sn * dn / one_m ** 2
    if not np.iscomplexobj(z):
        p, dp = np.real(p), np.real(dp)
    return p, dp


def weierstrass_p(z, g2, g3):
    """Weierstrass elliptic function wp(z; g2, g3)."""
    return weierstrass_pp(z, g2, g3)[0]


# --------------------------------------------------------------------------
# error function, hypergeometric, Lambert W


def erf_inv(y):
    """Inverse error function on (-1, 1), Newton-polished."""
    y = np.asarray(y, dtype=float)
    if np.any(np.abs(y) >= 1) or not np.all(np.isfinite(y)):
        raise DomainError("erf_inv requires -1 < y < 1")
    x = special.erfinv(y)
    for _ in range(2):
        x = x - (special.erf(x) - y) * (0.5 * math.sqrt(math.pi)) * np.exp(x * x)
    return x if x.ndim else float(x)


def _erfi_inv_scalar(y):
    if y == 0:
        return 0.0
    a = abs(y)
    hi = 1.0
    while special.erfi(hi) < a:
        hi *= 2.0
    x = optimize.brentq(lambda t: special.erfi(t) - a, 0.0, hi, xtol=1e-15, rtol=1e-15)
    x -= (special.erfi(x) - a) * 0.5 * math.sqrt(math.pi) * math.exp(-x * x)
    return math.copysign(x, y)


def erfi_inv(y):
    """Inverse of the imaginary error function ``erfi`` (defined for all real y)."""
    y = np.asarray(y, dtype=float)
    out = np.vectorize(_erfi_inv_scalar, otypes=[float])(y)
    return out if out.ndim else float(out)


def erf_inv_complex(z):
    """Inverse error function for complex arguments.

    Purely imaginary input maps exactly to ``i * erfi_inv(Im z)``; other
    complex values are solved by Newton iteration on the complex ``erf``.
    """
    z = np.asarray(z, dtype=complex)
    if np.all(z.real == 0):
        out = 1j * erfi_inv(z.imag)
        return out if np.ndim(out) else complex(out)
    flat = z.ravel()
    res = np.empty_like(flat)
    for i, zi in enumerate(flat):
        if zi.imag == 0 and abs(zi.real) < 1:
            res[i] = erf_inv(zi.real)
            continue
        x = complex(special.erfinv(np.clip(zi.real, -0.999, 0.999)), 0.0)
        for _ in range(100):
            step = (special.erf(x) - zi) * 0.5 * math.sqrt(math.pi) * cmath.exp(x * x)
            x -= step
            if abs(step) <= 1e-15 * max(1.0, abs(x)):
                break
        else:
            raise AccuracyError(f"erf_inv_complex did not converge at {zi}")
        res[i] = x
    res = res.reshape(z.shape)
    return res if res.ndim else complex(res)


def hyp2f1(a, b, c, z, continuation=False):
    """Gauss hypergeometric function 2F1(a, b; c; z) for real z < 1.

    With ``continuation=True`` real ``z > 1`` is allowed and the real part
    of the principal-branch continuation is returned (mpmath).
    """
    if float(c) <= 0 and float(c) == int(c):
        raise DomainError(f"hyp2f1: c = {c} is a non-positive integer")
    z = np.asarray(z, dtype=float)
    beyond = z >= 1
    if np.any(beyond):
        if not continuation or np.any(z == 1):
            raise DomainError("hyp2f1 requires z < 1")
        val = np.empty(z.shape)
        val[~beyond] = special.hyp2f1(a, b, c, z[~beyond])
        val[beyond] = [float(mpmath.re(mpmath.hyp2f1(a, b, c, zi))) for zi in z[beyond]]
    else:
        val = special.hyp2f1(a, b, c, z)
    if not np.all(np.isfinite(val)):
        raise AccuracyError(f"hyp2f1({a}, {b}; {c}; z) did not converge")
    return val if np.ndim(val) else float(val)


def lambert_w0(x):
    """Principal branch of the Lambert W function (W >= -1)."""
    x = np.asarray(x, dtype=float)
    if np.any(x < -1.0 / math.e - 1e-15):
        raise DomainError("lambert_w0 requires x >= -1/e")
    x = np.maximum(x, -1.0 / math.e)
    w = special.lambertw(x, 0).real
    # Newton polish away from the branch point, where w + 1 -> 0
    ok = w > -0.999
    for _ in range(2):
        ew = np.exp(w)
        w = np.where(ok, w - (w * ew - x) / (ew * (w + 1)), w)
    return w if w.ndim else float(w)
