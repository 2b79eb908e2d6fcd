"""Prime form ``E(x, y) = theta[delta](int_x^y omega) / (sqrt(omega_delta)(x) sqrt(omega_delta)(y))``.

All values are expressed in the natural frame ``d zeta = lam * omega`` of a
differential ``omega = (c0 + c1 x) dx / y``.  In that frame

    omega_delta / d zeta = grad theta[delta](0) . N (1, x) / (lam (c0 + c1 x)),

which depends on ``x`` only.  Square roots are principal; ``branch`` flips
them explicitly.
"""

from __future__ import annotations

import cmath

import numpy as np

from ..specialfn import ThetaCharacteristic, riemann_theta, theta_gradient
from .curve import CurvePoint, DifferentialSpec, ZeroFrame
from .periods import PeriodData


class PrimeFormError(ValueError):
    pass


def _require_odd(ch: ThetaCharacteristic):
    if ch is None or not ch.is_odd:
        raise PrimeFormError("the prime form needs an odd characteristic")


def delta_coefficients(pd: PeriodData, ch: ThetaCharacteristic) -> np.ndarray:
    """Coefficients of ``omega_delta`` on the raw basis ``(dx/y, x dx/y)``."""
    _require_odd(ch)
    grad = theta_gradient(np.zeros(2), pd.sp, ch)
    if np.max(np.abs(grad)) < 1e-12:
        raise PrimeFormError(f"characteristic {ch} is singular")
    return grad @ pd.normalization


def omega_delta_over_dzeta(pd, ch, spec: DifferentialSpec, x: complex, lam: complex = 1) -> complex:
    cd = delta_coefficients(pd, ch)
    return (cd[0] + cd[1] * x) / (lam * (spec.c0 + spec.c1 * x))


def omega_delta_over_dzeta_k(pd, ch, frame: ZeroFrame, lam: complex = 1) -> complex:
    """``omega_delta / d zeta_k`` at the zero itself, ``omega = d(zeta_k^2) / lam``."""
    cd = delta_coefficients(pd, ch)
    p = frame.point
    return (cd[0] + cd[1] * p.x) / p.y / cmath.sqrt(lam * frame.dfdx / 2)


def prime_form(pd: PeriodData, spec: DifferentialSpec, x: CurvePoint, y: CurvePoint,
               ch: ThetaCharacteristic, lam: complex = 1, branch=(1, 1)) -> complex:
    """``E(zeta(x), zeta(y))`` in the frame ``d zeta = lam * omega``."""
    _require_odd(ch)
    if x == y:
        raise PrimeFormError("prime form is evaluated at distinct points only")
    u = pd.abel(y) - pd.abel(x)
    num = riemann_theta(u, pd.sp, ch)
    sx = branch[0] * cmath.sqrt(omega_delta_over_dzeta(pd, ch, spec, x.x, lam))
    sy = branch[1] * cmath.sqrt(omega_delta_over_dzeta(pd, ch, spec, y.x, lam))
    return num / (sx * sy)


def prime_form_base_zero(pd, spec, base: CurvePoint, frame: ZeroFrame, ch, lam: complex = 1,
                         u=None, branch=(1, 1)) -> complex:
    """Limit ``E(zeta, x_k)``: the zero enters in its own frame ``zeta_k``.

    ``u`` overrides ``int_base^{x_k} omega`` (to shift its lattice class).
    """
    _require_odd(ch)
    if u is None:
        u = pd.abel(frame.point) - pd.abel(base)
    num = riemann_theta(u, pd.sp, ch)
    sb = branch[0] * cmath.sqrt(omega_delta_over_dzeta(pd, ch, spec, base.x, lam))
    sk = branch[1] * cmath.sqrt(omega_delta_over_dzeta_k(pd, ch, frame, lam))
    return num / (sb * sk)


def prime_form_zeros(pd, spec, f1: ZeroFrame, f2: ZeroFrame, ch, lam: complex = 1, u=None, branch=(1, 1)) -> complex:
    """Limit ``E(x_k, x_l)`` with both arguments in their zero frames."""
    _require_odd(ch)
    if u is None:
        u = pd.abel(f2.point) - pd.abel(f1.point)
    num = riemann_theta(u, pd.sp, ch)
    s1 = branch[0] * cmath.sqrt(omega_delta_over_dzeta_k(pd, ch, f1, lam))
    s2 = branch[1] * cmath.sqrt(omega_delta_over_dzeta_k(pd, ch, f2, lam))
    return num / (s1 * s2)


def _near(frame: ZeroFrame, curve, h: complex) -> CurvePoint:
    p = frame.point
    x = p.x + h
    return CurvePoint(x, p.y * np.prod(np.sqrt((x - curve.e) / (p.x - curve.e))))


def prime_form_base_zero_extrapolated(pd, spec, base, frame: ZeroFrame, ch, h: float, lam: complex = 1) -> complex:
    """Square of ``E(zeta, x_k)`` by offsetting from the zero and Richardson extrapolation.

    ``E(zeta(x), zeta(y))^2 * (d zeta_k / d zeta)(y)`` is evaluated at
    ``y = x_k + h`` and ``x_k + h/2`` with ``d zeta_k / d zeta = 1/(2 zeta_k)``,
    ``zeta_k^2 = lam * int_{x_k}^y omega``.  Squares avoid branch bookkeeping.
    """
    curve = pd.curve
    vals = []
    for step in (h, h / 2):
        yp = _near(frame, curve, step)
        e = prime_form(pd, spec, base, yp, ch, lam)
        zk2 = lam * spec.coeffs @ (pd.lassos.point_integral(yp) - pd.lassos.point_integral(frame.point))
        vals.append(e * e / (2 * cmath.sqrt(zk2)) * _sqrt_sign(zk2, frame, step, lam))
    return 2 * vals[1] - vals[0]


def _sqrt_sign(zk2, frame: ZeroFrame, step, lam):
    # match sqrt(zeta_k^2) to the branch zeta_k ~ sqrt(lam f'/2) (x - x_k)
    ref = cmath.sqrt(lam * frame.dfdx / 2) * step
    return 1 if abs(cmath.sqrt(zk2) - ref) <= abs(cmath.sqrt(zk2) + ref) else -1
