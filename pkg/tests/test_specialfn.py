import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import gamma

from hodgetau.specialfn import (
    SiegelPoint,
    ThetaCharacteristic,
    ThetaDomainError,
    ThetaRadiusError,
    all_characteristics,
    dedekind_eta,
    eisenstein_e2,
    log_dedekind_eta,
    log_eta_product,
    odd_characteristics,
    quasi_periodicity_factor,
    riemann_theta,
    theta_gradient,
)

THETA3_AT_I = math.pi ** 0.25 / gamma(0.75)
ETA_AT_I = gamma(0.25) / (2 * math.pi ** 0.75)

floats = st.floats(-1, 1, allow_nan=False)


@st.composite
def siegel(draw, g=None):
    g = g or draw(st.sampled_from([1, 2]))
    a = np.array(draw(st.lists(floats, min_size=g * g, max_size=g * g))).reshape(g, g)
    x = np.array(draw(st.lists(floats, min_size=g * g, max_size=g * g))).reshape(g, g)
    y = 0.6 * a @ a.T + 0.7 * np.eye(g)
    return SiegelPoint((x + x.T) / 4 + 1j * y)


@st.composite
def vectors(draw, g):
    re = draw(st.lists(floats, min_size=g, max_size=g))
    im = draw(st.lists(floats, min_size=g, max_size=g))
    return np.array(re) + 1j * np.array(im)


upper = st.builds(complex, st.floats(-2, 2), st.floats(0.4, 3))


def test_theta_oracles():
    sp = SiegelPoint([[1j]])
    assert abs(riemann_theta([0], sp) - THETA3_AT_I) < 1e-12
    assert abs(dedekind_eta(1j) - ETA_AT_I) < 1e-12
    assert abs(eisenstein_e2(1j) - 3 / math.pi) < 1e-10


def test_characteristic_counts():
    assert len(all_characteristics(2)) == 16
    assert len(odd_characteristics(2)) == 6
    assert len(odd_characteristics(1)) == 1
    assert str(odd_characteristics(1)[0]) == "[1/2; 1/2]"
    with pytest.raises(ValueError):
        ThetaCharacteristic((0.25,), (0,))


def test_domain_errors():
    with pytest.raises(ThetaDomainError):
        SiegelPoint([[1j, 0.5], [0.2, 1j]])
    with pytest.raises(ThetaDomainError):
        SiegelPoint([[1j, 2j], [2j, 1j]])
    with pytest.raises(ThetaRadiusError):
        riemann_theta([0], SiegelPoint([[1e-5j]]))
    with pytest.raises(ValueError):
        riemann_theta([0, 0], SiegelPoint([[1j]]))
    with pytest.raises(ValueError):
        eisenstein_e2(-1j)


@given(siegel(g=2))
def test_odd_theta_vanishes_at_zero(sp):
    for ch in odd_characteristics(2):
        assert abs(riemann_theta(np.zeros(2), sp, ch)) < 1e-10


@given(st.data())
def test_parity(data):
    sp = data.draw(siegel())
    v = data.draw(vectors(sp.g))
    for ch in all_characteristics(sp.g):
        sign = -1 if ch.is_odd else 1
        a = riemann_theta(v, sp, ch, normalized=True)
        b = riemann_theta(-v, sp, ch, normalized=True)
        assert abs(a - sign * b) < 1e-9


@given(st.data())
def test_quasi_periodicity(data):
    sp = data.draw(siegel())
    g = sp.g
    v = data.draw(vectors(g))
    n = np.array(data.draw(st.lists(st.integers(-1, 1), min_size=g, max_size=g)))
    m = np.array(data.draw(st.lists(st.integers(-2, 2), min_size=g, max_size=g)))
    ch = data.draw(st.sampled_from(all_characteristics(g)))
    lhs = riemann_theta(v + sp.omega @ n + m, sp, ch)
    rhs = quasi_periodicity_factor(v, sp, n, m, ch) * riemann_theta(v, sp, ch)
    assert abs(lhs - rhs) < 1e-10 * max(1.0, abs(rhs), abs(lhs))


@given(st.data())
def test_diagonal_period_matrix_factorises(data):
    a = data.draw(siegel(g=1))
    b = data.draw(siegel(g=1))
    v = data.draw(vectors(2))
    sp = SiegelPoint(np.diag([a.omega[0, 0], b.omega[0, 0]]))
    prod = riemann_theta(v[:1], a) * riemann_theta(v[1:], b)
    assert abs(riemann_theta(v, sp) - prod) < 1e-10 * max(1.0, abs(prod))


@given(st.data())
def test_derivatives_match_finite_differences(data):
    sp = data.draw(siegel(g=2))
    v = data.draw(vectors(2)) * 0.3
    w = data.draw(vectors(2))
    h = 1e-4

    def f(t):
        return riemann_theta(v + t * w, sp, tol=1e-14)

    fd1 = (f(h) - f(-h)) / (2 * h)
    fd2 = (f(h) - 2 * f(0) + f(-h)) / h ** 2
    d1 = riemann_theta(v, sp, directions=[w])
    d2 = riemann_theta(v, sp, directions=[w, w])
    assert abs(d1 - fd1) < 1e-5 * max(1, abs(d1))
    assert abs(d2 - fd2) < 1e-3 * max(1, abs(d2))
    grad = theta_gradient(v, sp)
    assert abs(grad @ w - d1) < 1e-8 * max(1, abs(d1))


@given(siegel(g=2), st.data())
def test_halving_tolerance_is_self_consistent(sp, data):
    v = data.draw(vectors(2))
    for tol in (1e-6, 1e-9):
        a = riemann_theta(v, sp, tol=tol, normalized=True)
        b = riemann_theta(v, sp, tol=tol / 2, normalized=True)
        assert abs(a - b) <= tol


@given(upper)
def test_eta_functional_equations(sigma):
    lt = log_dedekind_eta(sigma, tol=1e-15)
    shift = log_dedekind_eta(sigma + 1, tol=1e-15) - lt
    assert abs(cmath.exp(shift - 1j * math.pi / 12) - 1) < 1e-10
    inv = log_dedekind_eta(-1 / sigma, tol=1e-15) - lt
    assert abs(cmath.exp(inv) / cmath.sqrt(-1j * sigma) - 1) < 1e-10


@given(upper, st.sampled_from([((1, 1), (0, 1)), ((0, -1), (1, 0)), ((2, 1), (1, 1)), ((1, 0), (3, 1))]))
def test_eta24_is_weight_12(sigma, gamma_):
    (a, b), (c, d) = gamma_
    new = (a * sigma + b) / (c * sigma + d)
    lhs = 24 * (log_dedekind_eta(new, 1e-15) - log_dedekind_eta(sigma, 1e-15))
    assert abs(cmath.exp(lhs) / (c * sigma + d) ** 12 - 1) < 1e-9


@given(upper)
def test_e2_is_log_derivative_of_eta(sigma):
    h = 1e-5
    d = (log_dedekind_eta(sigma + h, 1e-15) - log_dedekind_eta(sigma - h, 1e-15)) / (2 * h)
    assert abs(eisenstein_e2(sigma, 1e-14) - 12 / (math.pi * 1j) * d) < 1e-8 * max(1, abs(eisenstein_e2(sigma)))


@given(st.floats(0.5, 40))
def test_eta_product_accurate_for_tiny_q(y):
    q = math.exp(-2 * math.pi * y)
    val = log_eta_product(1j * y, tol=1e-300)
    # log(1 - q) + log(1 - q^2) ~ -q - 3 q^2 / 2 for small q
    if q < 1e-6:
        assert abs(val + q + 1.5 * q * q) <= 1e-12 * q
    assert val.real < 0
