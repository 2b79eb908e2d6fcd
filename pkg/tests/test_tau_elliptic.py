import cmath
import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import gamma

from hodgetau.tau_elliptic import (
    EllipticPeriods,
    GridTooSmallError,
    InvalidPeriodsError,
    StepTooLargeError,
    _derivative,
    bergman_connection_check,
    connection_coefficients,
    cusp_asymptotics_check,
    euler_identity_genus1,
    log_tau_genus1,
    modular_factor_check,
    nonvanishing_grid,
    sl2z_matrices,
    tau_genus1,
)

TAU_AT_I = (gamma(0.25) / (2 * math.pi ** 0.75)) ** 48

periods = st.builds(
    lambda a, s: EllipticPeriods(a, a * s),
    st.builds(complex, st.floats(0.3, 3), st.floats(-1, 1)),
    st.builds(complex, st.floats(-0.5, 0.5), st.floats(0.8, 2.5)),
)
MATS = sl2z_matrices(5)


def test_value_at_i():
    assert abs(tau_genus1(EllipticPeriods(1, 1j)) / TAU_AT_I - 1) < 1e-12
    assert abs(TAU_AT_I - 3.1875455e-6) < 1e-12


def test_invalid_periods():
    with pytest.raises(InvalidPeriodsError):
        EllipticPeriods(0, 1j)
    with pytest.raises(InvalidPeriodsError):
        EllipticPeriods(1, -1j)
    with pytest.raises(InvalidPeriodsError):
        modular_factor_check(-1j, ((1, 0), (0, 1)))
    with pytest.raises(ValueError):
        modular_factor_check(1j, ((2, 0), (0, 1)))


def test_modular_examples():
    assert modular_factor_check(2j, ((0, -1), (1, 0)))["residual"] < 1e-10
    assert modular_factor_check(0.3 + 1j, ((1, 0), (0, 1)))["residual"] == 0
    assert modular_factor_check(0.3 + 1j, ((1, 1), (0, 1)))["residual"] < 1e-10


def test_sl2z_sample_size():
    assert all(a * d - b * c == 1 for (a, b), (c, d) in MATS)
    assert ((0, -1), (1, 0)) in MATS and len(MATS) > 100


@given(periods, st.builds(complex, st.floats(-3, 3), st.floats(-3, 3)).filter(lambda z: abs(z) > 0.1))
def test_scale_invariance(p, eps):
    a = log_tau_genus1(p)
    b = log_tau_genus1(EllipticPeriods(eps * p.A, eps * p.B))
    assert abs(cmath.exp(b - a) - 1) < 1e-10


@given(periods)
def test_translation_invariance(p):
    a = log_tau_genus1(p)
    b = log_tau_genus1(EllipticPeriods(p.A, p.B + p.A))
    assert abs(cmath.exp(b - a) - 1) < 1e-10


@given(st.builds(complex, st.floats(-0.5, 0.5), st.floats(0.8, 2.0)), st.sampled_from(MATS))
def test_modular_factor_random(sigma, g):
    assert modular_factor_check(sigma, g)["residual"] < 1e-9


def test_cusp_asymptotics():
    r = cusp_asymptotics_check()
    assert abs(r["slope"] - 2) < 1e-6
    assert abs(r["constant"] - 1) < 1e-3
    assert r["monotone_tail"] and r["envelope_ok"]
    assert r["check"] == "lemma7-cusp-asymptotics"
    json.dumps(r)
    with pytest.raises(GridTooSmallError):
        cusp_asymptotics_check(n=2)
    with pytest.raises(GridTooSmallError):
        cusp_asymptotics_check(im_range=(10, 5))


def test_bergman_value_at_i():
    r = bergman_connection_check(EllipticPeriods(1, 1j))
    assert abs(complex(*r["observed"]) - 12j) < 1e-8
    assert r["residual"] < 1e-8
    assert r["observed_order"] >= 1.9
    assert "s1=-b" in r["convention"]


@given(periods)
def test_bergman_connection_random(p):
    r = bergman_connection_check(p)
    assert r["residual"] < 1e-8 and r["dA"]["residual"] < 1e-8


def test_bergman_scaling_invariance():
    a = bergman_connection_check(EllipticPeriods(1, 1j))["residual"]
    b = bergman_connection_check(EllipticPeriods(2, 2j))["residual"]
    assert abs(a - b) < 1e-10


@given(periods)
def test_euler_identity_vanishes(p):
    assert abs(euler_identity_genus1(p)) < 1e-12 * max(1, abs(connection_coefficients(p)[1] * p.B))


def test_derivative_rejects_noisy_function():
    rng = np.random.default_rng(0)
    with pytest.raises(StepTooLargeError):
        _derivative(lambda x: x + 1e-3 * rng.normal(), 0.0, 1e-2, 1e-12, max_halvings=8)


def test_nonvanishing():
    assert math.isfinite(nonvanishing_grid())
