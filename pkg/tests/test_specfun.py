import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from nlgreen.errors import DomainError, PoleError
from nlgreen.specfun import (
    agm,
    as_real,
    ellip_k,
    erf_inv,
    erf_inv_complex,
    erfi_inv,
    hyp2f1,
    jacobi,
    lambert_w0,
    weierstrass_p,
    weierstrass_periods,
    weierstrass_pp,
    weierstrass_roots,
)


def quad_k(m):
    """K(m) = int_0^{pi/2} (1 - m sin^2)^(-1/2), valid for m < 1."""
    return integrate.quad(lambda th: 1.0 / math.sqrt(1.0 - m * math.sin(th) ** 2), 0.0, math.pi / 2, epsabs=1e-14)[0]


class TestEllipticK:
    def test_k_minus_one_against_quadrature(self):
        assert abs(ellip_k(-1.0).real - quad_k(-1.0)) < 1e-12
        assert abs(ellip_k(-1.0).real - 1.3110288) < 1e-6

    @pytest.mark.parametrize("m", [-20.0, -3.0, -0.5, 0.0, 0.3, 0.9, 0.999])
    def test_real_parameter_against_scipy(self, m):
        assert ellip_k(m).imag == 0
        assert ellip_k(m).real == pytest.approx(special.ellipk(m), rel=1e-13)

    def test_k_of_two_branch(self):
        k = ellip_k(2.0)
        # K(m>1) = (K(1/m) + i K(1 - 1/m)) / sqrt(m); both parts equal at m = 2
        assert k.real == pytest.approx(1.3110287771, rel=1e-9)
        assert k.imag == pytest.approx(1.3110287771, rel=1e-9)
        # same magnitude as mpmath's continuation; we take the upper branch
        assert abs(k) == pytest.approx(abs(complex(mpmath.ellipk(2.0))), rel=1e-12)

    def test_complex_parameter_matches_mpmath(self):
        for m in (0.5 + 0.5j, -2 + 1j, 3 - 0.2j):
            assert abs(ellip_k(m) - complex(mpmath.ellipk(m))) < 1e-12 * abs(ellip_k(m))

    def test_pole(self):
        with pytest.raises(PoleError):
            ellip_k(1.0)

    def test_agm_symmetric(self):
        assert agm(1.0, 2.0) == pytest.approx(agm(2.0, 1.0), rel=1e-15)
        assert agm(1.0, math.sqrt(2.0)).real == pytest.approx(1.19814023473559, rel=1e-13)


class TestJacobi:
    @settings(max_examples=60, deadline=None)
    @given(u=st.floats(-20, 20), m=st.floats(-5, 5).filter(lambda m: abs(m - 1) > 1e-3))
    def test_pythagorean_identities(self, u, m):
        sn, cn, dn, _ = jacobi(u, m)
        assert abs(sn * sn + cn * cn - 1) < 1e-10
        assert abs(dn * dn + m * sn * sn - 1) < 1e-9

    @pytest.mark.parametrize("m", [-1.0, -0.7, 0.3, 2.5])
    def test_complex_argument_matches_mpmath(self, m):
        for u in (0.4 + 0.3j, -1.2 + 0.8j, 2.0 - 0.5j, 0.7j):
            sn, cn, dn, _ = jacobi(u, m)
            mp_u = mpmath.mpc(u)
            assert abs(sn - complex(mpmath.ellipfun("sn", mp_u, m=m))) < 1e-10
            assert abs(cn - complex(mpmath.ellipfun("cn", mp_u, m=m))) < 1e-10
            assert abs(dn - complex(mpmath.ellipfun("dn", mp_u, m=m))) < 1e-10

    def test_complex_parameter(self):
        sn, cn, dn, _ = jacobi(0.6, 0.4 + 0.3j)
        assert abs(sn - complex(mpmath.ellipfun("sn", 0.6, m=mpmath.mpc(0.4, 0.3)))) < 1e-12

    @pytest.mark.parametrize("m", [-1.0, 0.5, 2.0])
    def test_amplitude_derivative_is_dn(self, m):
        u = np.linspace(0.1, 6.0, 40)
        h = 1e-5
        am_p = jacobi(u + h, m)[3]
        am_m = jacobi(u - h, m)[3]
        dn = jacobi(u, m)[2]
        assert np.max(np.abs((am_p - am_m) / (2 * h) - dn)) < 1e-8

    def test_sn_of_quarter_period(self):
        k = ellip_k(-1.0).real
        assert jacobi(k, -1.0)[0] == pytest.approx(1.0, abs=1e-14)

    def test_m_one_limit_is_tanh(self):
        u = np.linspace(-3, 3, 7)
        assert np.allclose(jacobi(u, 1.0)[0], np.tanh(u), atol=1e-14)


class TestWeierstrass:
    def test_equianharmonic_half_period(self):
        oracle = special.gamma(1 / 3) ** 3 / (4 * math.pi)
        w1, w2 = weierstrass_periods(0.0, 1.0)
        assert w1.real == pytest.approx(oracle, abs=1e-12)
        assert abs(w1.real - 1.5299540) < 1e-5
        assert w2.imag > 0

    @pytest.mark.parametrize("g2,g3", [(0.0, 1.0), (0.0, -1.0), (4.0, 1.0), (1 / 3, -0.0255), (2.0, -3.0)])
    def test_differential_equation(self, g2, g3):
        z = np.array([0.3, 0.71, 1.1, 0.4 + 0.3j, 0.9 - 0.6j])
        p, dp = weierstrass_pp(z, g2, g3)
        assert np.max(np.abs(dp * dp - (4 * p ** 3 - g2 * p - g3)) / (1 + np.abs(p) ** 3)) < 1e-10

    @pytest.mark.parametrize("g2,g3", [(0.0, 1.0), (0.0, -1.0), (4.0, 1.0), (1 + 1j, 0.5 - 0.2j)])
    def test_half_periods_hit_roots(self, g2, g3):
        roots = weierstrass_roots(g2, g3)
        w1, w2 = weierstrass_periods(g2, g3)
        for w in (w1, w2, w1 + w2):
            p, dp = weierstrass_pp(complex(w), g2, g3)
            assert min(abs(p - r) for r in roots) < 1e-8
            assert abs(dp) < 1e-6

    def test_periodicity(self):
        g2, g3 = 4.0, 1.0
        w1, w2 = weierstrass_periods(g2, g3)
        z = 0.37 + 0.21j
        for shift in (2 * w1, 2 * w2):
            assert abs(weierstrass_p(z + shift, g2, g3) - weierstrass_p(z, g2, g3)) < 1e-9

    def test_eisenstein_sums(self):
        w1, w2 = weierstrass_periods(0.0, 1.0)
        M = 60
        g2 = g3 = 0
        for i in range(-M, M + 1):
            for j in range(-M, M + 1):
                if i or j:
                    w = 2 * i * w1 + 2 * j * w2
                    g2 += w ** -4
                    g3 += w ** -6
        assert abs(60 * g2) < 1e-3
        assert abs(140 * g3 - 1) < 1e-8

    def test_complex_invariants_match_mpmath_definition(self):
        g2, g3 = 1 + 1j, 0.5 - 0.2j
        z = 0.3 + 0.1j
        p, dp = weierstrass_pp(z, g2, g3)
        assert abs(dp * dp - (4 * p ** 3 - g2 * p - g3)) < 1e-10
        assert abs(p - 1 / z ** 2) < 0.1

    def test_small_argument(self):
        p, dp = weierstrass_pp(1e-6, 0.0, -1.0)
        assert p == pytest.approx(1e12, rel=1e-12)

    def test_degenerate_lattice(self):
        with pytest.raises(DomainError):
            weierstrass_roots(3.0, 1.0)

    def test_pole(self):
        with pytest.raises(PoleError):
            weierstrass_p(0.0, 0.0, 1.0)


class TestInverseErrorFunctions:
    @settings(max_examples=80, deadline=None)
    @given(y=st.floats(-0.999999, 0.999999))
    def test_erf_inv_round_trip(self, y):
        assert abs(special.erf(erf_inv(y)) - y) < 2e-16 * max(1.0, abs(erf_inv(y)) * 4)

    def test_erf_inv_newton_oracle(self):
        # independent Newton iteration from x = 0
        y = 0.8
        x = 0.0
        for _ in range(60):
            x -= (math.erf(x) - y) / (2 / math.sqrt(math.pi) * math.exp(-x * x))
        assert erf_inv(y) == pytest.approx(x, abs=1e-15)

    def test_erf_inv_domain(self):
        with pytest.raises(DomainError):
            erf_inv(1.0)

    @pytest.mark.parametrize("y", [-50.0, -2.0, 0.0, 0.3, 7.0, 1e3])
    def test_erfi_inv_round_trip(self, y):
        assert special.erfi(erfi_inv(y)) == pytest.approx(y, rel=1e-13, abs=1e-15)

    def test_erf_inv_complex(self):
        for z in (0.3j, 0.2 + 0.1j, -0.5 + 0.4j):
            w = erf_inv_complex(z)
            assert abs(complex(mpmath.erf(w)) - z) < 1e-13
        assert erf_inv_complex(0.7j) == pytest.approx(1j * erfi_inv(0.7), abs=1e-15)


class TestOtherFunctions:
    def test_hyp2f1_against_mpmath(self):
        for a, b, c, z in [(1, 1, 2, -0.5), (1, 0.5, 1.5, -3.0), (1, 1 / 3, 4 / 3, -10.0), (0.5, 0.5, 1, 0.9)]:
            assert hyp2f1(a, b, c, z) == pytest.approx(float(mpmath.hyp2f1(a, b, c, z)), rel=1e-12)

    def test_hyp2f1_continuation_past_one(self):
        a, b, c, z = 1, 0.5, 1.5, 2.5
        with pytest.raises(DomainError):
            hyp2f1(a, b, c, z)
        assert hyp2f1(a, b, c, z, continuation=True) == pytest.approx(float(mpmath.hyp2f1(a, b, c, z).real), rel=1e-12)
        with pytest.raises(DomainError):
            hyp2f1(a, b, c, 1.0, continuation=True)

    def test_hyp2f1_log_identity(self):
        z = -0.7
        assert hyp2f1(1, 1, 2, z) == pytest.approx(-math.log(1 - z) / z, rel=1e-14)

    @pytest.mark.parametrize("x", [-1 / math.e + 1e-9, -0.2, 0.0, 1.0, 50.0])
    def test_lambert_newton_oracle(self, x):
        w = lambert_w0(x)
        assert w * math.exp(w) == pytest.approx(x, abs=1e-12 * max(1, abs(x)))

    def test_lambert_domain(self):
        with pytest.raises(DomainError):
            lambert_w0(-1.0)

    def test_as_real_guard(self):
        assert as_real(2 + 1e-12j) == 2.0
        with pytest.raises(DomainError):
            as_real(2 + 1e-3j)

    def test_cmath_consistency(self):
        assert ellip_k(0.0) == pytest.approx(cmath.pi / 2)
