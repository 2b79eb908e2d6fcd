"""Genus-1 tau function ``tau(A, B) = eta(B/A)^48`` and its checks.

``A`` and ``B`` are the a- and b-periods of ``omega``.  All computations go
through ``log tau = 48 log eta`` because ``eta^48`` under- or overflows
quickly away from ``Im sigma ~ 1``.

Connection convention on the torus ``C / (A Z + B Z)`` with ``omega = dz``:
``S_omega = 0``, ``S_B = 12 eta_1 / A^2`` with ``eta_1 = pi^2 E2(sigma) / 6``,
cycles ``s_1 = -b``, ``s_2 = a``, coordinates ``z_1 = A``, ``z_2 = B``, and
``d log tau / d z_i = (2 i / pi) oint_{s_i} (S_B - S_omega) / omega``.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .specialfn import eisenstein_e2, log_dedekind_eta, log_eta_product

CONVENTION = ("s1=-b, s2=a; z1=A, z2=B; dlog(tau)/dz_i = (2i/pi) oint_{s_i} (S_B - S_omega)/omega; "
              "S_B = 2 pi^2 E2(B/A) / A^2, S_omega = 0; log tau = 48 log eta with log eta = pi i sigma/12 + sum log(1-q^n)")


class InvalidPeriodsError(ValueError):
    pass


class GridTooSmallError(ValueError):
    pass


class StepTooLargeError(RuntimeError):
    pass


@dataclass(frozen=True)
class EllipticPeriods:
    A: complex
    B: complex

    def __post_init__(self):
        A, B = complex(self.A), complex(self.B)
        if A == 0:
            raise InvalidPeriodsError("a-period must be nonzero")
        if (B / A).imag <= 0:
            raise InvalidPeriodsError(f"Im(B/A) must be positive, got {B / A}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @property
    def sigma(self) -> complex:
        return self.B / self.A


def log_tau_genus1(p: EllipticPeriods) -> complex:
    return 48 * log_dedekind_eta(p.sigma, tol=1e-15)


def tau_genus1(p: EllipticPeriods) -> complex:
    return cmath.exp(log_tau_genus1(p))


def _report(check, inputs, expected, observed, residual, **extra):
    def enc(z):
        if isinstance(z, complex):
            return [z.real, z.imag]
        return z
    out = {"check": check, "inputs": {k: enc(v) for k, v in inputs.items()}, "expected": enc(expected),
           "observed": enc(observed), "residual": float(residual), "convention": CONVENTION}
    out.update(extra)
    return out


def _mobius(gamma, sigma):
    (a, b), (c, d) = gamma
    return (a * sigma + b) / (c * sigma + d)


def modular_factor_check(sigma, gamma) -> dict:
    """``tau(gamma.sigma)/tau(sigma)`` against ``(c sigma + d)^24``."""
    sigma = complex(sigma)
    if sigma.imag <= 0:
        raise InvalidPeriodsError("Im(sigma) must be positive")
    g = np.asarray(gamma, dtype=int)
    if g.shape != (2, 2) or round(np.linalg.det(g)) != 1 or g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0] != 1:
        raise ValueError("gamma must be an integer matrix of determinant 1")
    new = _mobius(g, sigma)
    lhs = 48 * (log_dedekind_eta(new, tol=1e-16) - log_dedekind_eta(sigma, tol=1e-16))
    cfac = g[1, 0] * sigma + g[1, 1]
    rhs = 24 * cmath.log(cfac)
    diff = lhs - rhs
    diff -= 2j * math.pi * round(diff.imag / (2 * math.pi))
    resid = abs(cmath.exp(diff) - 1)
    return _report("lemma3-modular-factor", {"sigma": sigma, "gamma": g.tolist()}, cfac ** 24,
                   complex(cmath.exp(lhs - rhs) * cfac ** 24), resid)


def sl2z_matrices(bound: int = 5) -> list[tuple[tuple[int, int], tuple[int, int]]]:
    """All integer matrices of determinant 1 with entries bounded by ``bound``."""
    r = range(-bound, bound + 1)
    return [((a, b), (c, d)) for a, b, c, d in itertools.product(r, r, r, r) if a * d - b * c == 1]


def _cexpm1(z: complex) -> complex:
    x, y = z.real, z.imag
    return complex(math.expm1(x) * math.cos(y) - 2 * math.sin(y / 2) ** 2, math.exp(x) * math.sin(y))


def cusp_asymptotics_check(A: complex = 1.0, im_range=(5.0, 20.0), n: int = 16) -> dict:
    """Fit ``log|tau| = k log|t| + log|c|`` on ``sigma = i y``, ``t = exp(2 pi i sigma)``."""
    if n < 3:
        raise GridTooSmallError("need at least 3 grid points")
    ys = np.linspace(im_range[0], im_range[1], n)
    if np.any(np.diff(ys) <= 0):
        raise GridTooSmallError("Im(sigma) grid must be increasing")
    logt = -2 * math.pi * ys
    logtau = np.array([log_tau_genus1(EllipticPeriods(A, A * 1j * y)).real for y in ys])
    slope, intercept = np.polyfit(logt, logtau, 1)
    # tau t^-2 = prod (1 - q^n)^48, kept apart from the leading term to avoid cancellation
    corr = [_cexpm1(48 * log_eta_product(1j * y, tol=1e-300)) for y in ys]
    dev = np.abs(corr)
    constant = 1 + corr[-1].real
    monotone = bool(np.all(np.diff(dev) < 0))
    y0 = float(ys[0])
    t0 = math.exp(-2 * math.pi * y0)
    return _report("lemma7-cusp-asymptotics", {"A": complex(A), "im_range": list(map(float, im_range)), "n": n},
                   {"slope": 2.0, "constant": 1.0}, {"slope": float(slope), "constant": constant},
                   abs(slope - 2), slope=float(slope), intercept=float(intercept), constant=constant,
                   monotone_tail=monotone, envelope_ok=bool(dev[0] < 50 * t0),
                   envelope={"im": y0, "deviation": float(dev[0]), "bound": 50 * t0})


def _central(f, x, h):
    d = f(x + h) - f(x - h)
    return d / (2 * h)


def _derivative(f, x, h0, tol, max_halvings=30):
    """Central differences with step halving and Richardson extrapolation.

    Stops when two successive extrapolated estimates agree to ``tol``
    (relative).  Returns the estimate, the final step and the observed
    order of the raw central differences.
    """
    h = h0
    raw = [_central(f, x, h)]
    ext = []
    for _ in range(max_halvings):
        h /= 2
        raw.append(_central(f, x, h))
        # central differences err by O(h^2)
        ext.append(raw[-1] + (raw[-1] - raw[-2]) / 3)
        if len(ext) >= 2 and abs(ext[-1] - ext[-2]) < tol * max(1.0, abs(ext[-1])):
            order = math.log2(abs(raw[-3] - raw[-2]) / abs(raw[-2] - raw[-1])) if len(raw) >= 3 else math.nan
            return ext[-1], h, order
    raise StepTooLargeError("finite differences did not settle to the requested tolerance")


def connection_coefficients(p: EllipticPeriods) -> tuple[complex, complex]:
    """Closed forms of ``d log tau / dA`` and ``d log tau / dB``."""
    e2 = eisenstein_e2(p.sigma, tol=1e-16)
    s_b = 2 * math.pi ** 2 * e2 / p.A ** 2
    k = 2j / math.pi
    return k * (-s_b * p.B), k * (s_b * p.A)


def bergman_connection_check(p: EllipticPeriods, tol: float = 1e-8) -> dict:
    """Finite-difference ``d log tau / dB`` (and ``dA``) against ``4 pi i E2 / A`` (and ``-4 pi i E2 B / A^2``)."""
    d_a_exp, d_b_exp = connection_coefficients(p)
    h0 = 1e-2 * abs(p.A)

    def lt_b(b):
        return log_tau_genus1(EllipticPeriods(p.A, b))

    def lt_a(a):
        return log_tau_genus1(EllipticPeriods(a, p.B))

    d_b, hb, order_b = _derivative(lt_b, p.B, h0, tol * 1e-1)
    d_a, _, order_a = _derivative(lt_a, p.A, h0, tol * 1e-1)
    res_b = abs(d_b - d_b_exp) / abs(d_b_exp)
    res_a = abs(d_a - d_a_exp) / max(abs(d_a_exp), 1e-300)
    euler = p.A * d_a_exp + p.B * d_b_exp
    return _report("bercon-dB-log-tau", {"A": p.A, "B": p.B}, d_b_exp, complex(d_b), res_b,
                   dA={"expected": [d_a_exp.real, d_a_exp.imag], "observed": [d_a.real, d_a.imag], "residual": res_a,
                               "observed_order": order_a},
                   euler_sum=[euler.real, euler.imag], step=hb, observed_order=order_b)


def euler_identity_genus1(p: EllipticPeriods) -> complex:
    """``z_1 oint_{s_1} + z_2 oint_{s_2}`` of ``(S_B - S_omega)/omega``; vanishes at genus 1."""
    s_b = 2 * math.pi ** 2 * eisenstein_e2(p.sigma, tol=1e-16) / p.A ** 2
    return p.A * (-s_b * p.B) + p.B * (s_b * p.A)


def nonvanishing_grid(n: int = 12) -> float:
    """Smallest ``log|tau|`` over a grid on the fundamental domain; finite means nonzero."""
    worst = math.inf
    for x in np.linspace(-0.5, 0.5, n):
        for y in np.linspace(math.sqrt(3) / 2, 3.0, n):
            if x * x + y * y < 1:
                continue
            worst = min(worst, log_tau_genus1(EllipticPeriods(1, complex(x, y))).real)
    return worst
