import itertools

import numpy as np
import pytest

from math import exp, lgamma, log, pi, sqrt

from randcrit import constants as ct
from randcrit.ensembles import universal_params
from randcrit.exceptions import ParameterError, UnsupportedError
from randcrit.matgauss import expected_abs_det

TARGET_I2 = 4.0 / sqrt(3.0)


def test_k_m_value():
    assert ct.k_m(2) == pytest.approx(1.0 / (16.0 * pi), rel=1e-14)


def test_c_over_k_identity():
    for m in range(2, 65):
        assert ct.c_m(m) / ct.k_m(m) == pytest.approx(1.0 / (m + 4), rel=1e-12)


def test_volume_identity():
    # (2 pi)^m / omega_m = (4 pi)^{m/2} Gamma(1 + m/2)
    for m in range(2, 65):
        omega, _ = ct.ball_sphere_volumes(m)
        lhs = m * log(2 * pi) - log(omega)
        rhs = 0.5 * m * log(4 * pi) + lgamma(1 + 0.5 * m)
        assert lhs == pytest.approx(rhs, rel=1e-12)


def test_ball_sphere_volumes_examples():
    assert ct.ball_sphere_volumes(2) == (pytest.approx(pi), pytest.approx(2 * pi))
    assert ct.ball_sphere_volumes(3)[0] == pytest.approx(4 * pi / 3)
    assert ct.ball_sphere_volumes(1) == (pytest.approx(2.0), pytest.approx(2.0))


def test_spectral_constant_k_and_c():
    m = 2
    e1 = (1, 0)
    assert ct.spectral_constant(e1, e1, m) == pytest.approx(1.0 / (16.0 * pi), rel=1e-12)
    for m in (2, 3, 5):
        e1 = tuple([1] + [0] * (m - 1))
        assert ct.spectral_constant(e1, e1, m) == pytest.approx(ct.k_m(m), rel=1e-12)
        a_ii = tuple([2] + [0] * (m - 1))
        a_jj = tuple([0, 2] + [0] * (m - 2))
        assert ct.spectral_constant(a_ii, a_jj, m) == pytest.approx(ct.c_m(m), rel=1e-12)
        assert ct.spectral_constant(a_ii, a_ii, m) == pytest.approx(3 * ct.c_m(m), rel=1e-12)
        a_ij = tuple([1, 1] + [0] * (m - 2))
        assert ct.spectral_constant(a_ij, a_ij, m) == pytest.approx(ct.c_m(m), rel=1e-12)


def test_spectral_constant_sign():
    # alpha = (2,0), beta = (0,0): (-1)^1 * positive
    assert ct.spectral_constant((2, 0), (0, 0), 2) < 0.0


def test_spectral_constant_odd_vanishes_exhaustively():
    # all multi-index pairs of total order <= 4 at m = 3
    m = 3
    idx = [t for t in itertools.product(range(5), repeat=m) if sum(t) <= 4]
    for a in idx:
        for b in idx:
            if sum(a) + sum(b) > 4:
                continue
            if any((x - y) % 2 for x, y in zip(a, b)):
                assert ct.spectral_constant(a, b, m) == 0.0


def test_spectral_constant_mixed_pairs_vanish():
    # C_m(i,j; k,l) = 0 for (i,j) != (k,l) unless both are diagonal pairs
    m = 3
    assert ct.spectral_constant((1, 1, 0), (1, 0, 1), m) == 0.0
    assert ct.spectral_constant((1, 1, 0), (0, 2, 0), m) == 0.0


def test_spectral_constant_order_guard():
    with pytest.raises(UnsupportedError):
        ct.spectral_constant((4, 0), (2, 0), 2)


def test_i2_exact():
    assert ct.i_m_fyodorov(2) == pytest.approx(TARGET_I2, rel=1e-4)


def test_i2_weighted_rho_value():
    # int rho_3 e^{-x^2/2} dx = (4/sqrt3) / (2^{5/2} Gamma(5/2) / sqrt(pi))
    want = TARGET_I2 / exp(ct.log_i_m_prefactor(2))
    assert ct.gaussian_weighted_rho(3, 64) == pytest.approx(want, rel=1e-6)


def test_route_agreement_m3_to_m6():
    for m in (3, 4, 5, 6):
        i_f = ct.i_m_fyodorov(m)
        mc = expected_abs_det(universal_params(m), 200_000, seed=m)
        assert abs(i_f - mc.mean) < max(0.02 * i_f, 3 * mc.std_error)


def test_c_of_2():
    lv, v = ct.c_of_m(2)
    assert v == pytest.approx((2 * pi / 3) * TARGET_I2, rel=1e-4)


def test_c_of_m_positive_increasing():
    logs = [ct.log_c_of_m(m) for m in range(2, 51)]
    assert all(np.isfinite(logs))
    assert all(b > a for a, b in zip(logs, logs[1:]))


def test_density_limit_coefficient():
    # m = 2: C(2)/(4 pi) = I_2/6
    v = ct.density_limit_coefficient(2)
    assert v == pytest.approx(ct.c_of_m(2)[1] / (4 * pi), rel=1e-12)
    assert v == pytest.approx(TARGET_I2 / 6.0, rel=1e-4)
    # identity: C(m) omega_m/(2 pi)^m = (c_m/K_m)^{m/2} I_m
    for m in (2, 3, 5, 8):
        lhs = ct.density_limit_coefficient(m)
        rhs = (ct.c_m(m) / ct.k_m(m)) ** (0.5 * m) * ct.i_m_fyodorov(m)
        assert lhs == pytest.approx(rhs, rel=1e-10)
    assert all(ct.density_limit_coefficient(m) > 0 for m in range(2, 51))


def test_quadrature_doubling_guard():
    # convergent by construction; a one-node rule must trip the check
    from randcrit.exceptions import NumericError

    with pytest.raises(NumericError):
        ct.log_i_m_fyodorov(8, n_nodes=1)


def test_diagnostic_rows():
    rows = ct.asymptotic_diagnostic([8, 16, 32, 64])
    gaps = [r.ratio_gap for r in rows]
    assert all(b < a for a, b in zip(gaps, gaps[1:]))
    # m = 2 anchor: finite, recorded, no claim
    r2 = ct.constants_row(2)
    assert np.isfinite(r2.log_ratio_c) and np.isfinite(r2.log_ratio_i)
    with pytest.raises(ParameterError):
        ct.asymptotic_diagnostic([1, 8])
