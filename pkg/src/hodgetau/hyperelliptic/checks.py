"""Invariance, homogeneity, Euler, symplectic and degeneration checks for genus-2 tau."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad_vec

from ..specialfn import odd_characteristics
from .curve import CurvePoint, DegenerateStratumError, DifferentialSpec, HyperellipticCurve, zeros_of_differential
from .periods import PeriodData, period_data
from .tau import default_basepoint, tau0_eval

HOMOGENEITY_EPS = (2, 1 + 1j, 0.5)

#: Symplectic matrices ``[[A, B], [C, D]]`` used by the transformation check.
SYMPLECTIC_SAMPLES = {
    "shear": ((1, 0, 1, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)),
    "mixed-shear": ((1, 0, 1, 1), (0, 1, 1, 0), (0, 0, 1, 0), (0, 0, 0, 1)),
    "involution": ((0, 0, -1, 0), (0, 0, 0, -1), (1, 0, 0, 0), (0, 1, 0, 0)),
    "partial-involution": ((0, 0, -1, 0), (0, 1, 0, 0), (1, 0, 0, 0), (0, 0, 0, 1)),
    "unimodular": ((1, 1, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, -1, 1)),
    "minus-identity": ((-1, 0, 0, 0), (0, -1, 0, 0), (0, 0, -1, 0), (0, 0, 0, -1)),
}
SYMPLECTIC_NAMES = tuple(SYMPLECTIC_SAMPLES)
HOMOGENEITY_DEGREE = 6


def random_corpus(n: int, seed: int = 0) -> list[tuple[HyperellipticCurve, DifferentialSpec]]:
    """Random curves with branch points in angular order and generic differentials."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        ang = np.sort(rng.uniform(0, 2 * math.pi, 6))
        if np.min(np.diff(np.concatenate([ang, [ang[0] + 2 * math.pi]]))) < 0.35:
            continue
        e = rng.uniform(0.6, 1.4, 6) * np.exp(1j * ang) + complex(*rng.normal(0, 0.2, 2))
        x0 = complex(*rng.uniform(-0.6, 0.6, 2)) + complex(np.mean(e))
        if np.min(np.abs(e - x0)) < 0.25:
            continue
        c1 = complex(*rng.normal(size=2))
        out.append((HyperellipticCurve(tuple(e)), DifferentialSpec(-c1 * x0, c1)))
    return out


def _rel(a, b):
    return abs(a / b - 1)


def invariance_report(c, spec, pd=None, n_basepoints: int = 2) -> dict:
    """Basepoint, characteristic, zero-labelling and branch-flip invariance of tau."""
    pd = pd or period_data(c)
    ref = tau0_eval(c, spec, pd)
    base = max(_rel(tau0_eval(c, spec, pd, basepoint=default_basepoint(c, spec, i)).value, ref.value)
               for i in range(1, n_basepoints + 1))
    chars = max(_rel(tau0_eval(c, spec, pd, ch=ch).value, ref.value) for ch in odd_characteristics(2))
    swap = _rel(tau0_eval(c, spec, pd, swap_zeros=True).value, ref.value)
    flip = _rel(tau0_eval(c, spec, pd, branch_flip=True).value, ref.value)
    return {"value": ref.value, "basepoint": base, "characteristics": chars, "zero_swap": swap,
            "branch_flip": flip, "nonzero": abs(ref.value) > 0 and math.isfinite(ref.log_value.real)}


def homogeneity_check(c, spec, pd=None, eps_values=HOMOGENEITY_EPS) -> dict:
    """Ratios ``tau(eps omega)/tau(omega)`` and the exponent fitted to them.

    The fit is least squares of ``log(ratio) = k log(eps)`` over the complex
    logarithms, with the branch of each ``log(ratio)`` taken nearest to
    ``6 log(eps)`` only to undo the ``2 pi i`` ambiguity.
    """
    pd = pd or period_data(c)
    base = tau0_eval(c, spec, pd)
    logs, ratios = [], []
    for eps in eps_values:
        t = tau0_eval(c, spec.scaled(eps), pd)
        ratios.append(t.value / base.value)
        lr = t.log_value - base.log_value
        le = cmath.log(eps)
        k = round(((HOMOGENEITY_DEGREE * le - lr) / (2j * math.pi)).real)
        logs.append((le, lr + 2j * math.pi * k))
    num = sum((le.conjugate() * lr) for le, lr in logs)
    den = sum(abs(le) ** 2 for le, _ in logs)
    fitted = num / den
    resid = max(abs(r / eps ** HOMOGENEITY_DEGREE - 1) for r, eps in zip(ratios, eps_values))
    return {"eps": list(eps_values), "ratios": ratios, "fitted_exponent": fitted, "ratio_residual": resid}


@dataclass
class _Marked:
    """Deformation-stable evaluation of coordinates and log tau."""

    curve: HyperellipticCurve
    spec: DifferentialSpec
    pd: PeriodData
    zero_ref: CurvePoint
    via: int


def _marked(c, spec, ref: PeriodData | None = None, zero_ref=None, via=None) -> _Marked:
    if ref is None:
        pd = period_data(c)
    else:
        pd = period_data(c, basepoint=ref.lassos.p0, order=ref.lassos.order, sheet_ref=ref.lassos.yb)
        if not np.array_equal(pd.cycles, ref.cycles):
            raise DegenerateStratumError("deformation step changed the marking")
    f1, _ = zeros_of_differential(c, spec)
    if via is None:
        via = int(np.argmin(np.abs(c.e - f1.point.x)))
    return _Marked(c, spec, pd, zero_ref or f1.point, via)


def _coords_and_log(m: _Marked, basepoint_x: complex):
    c, spec, pd = m.curve, m.spec, m.pd
    f1, f2 = zeros_of_differential(c, spec)
    if abs(f1.point.y - m.zero_ref.y) > abs(f2.point.y - m.zero_ref.y):
        f1, f2 = f2, f1
    periods = np.concatenate([spec.coeffs @ pd.a_periods_raw, spec.coeffs @ pd.b_periods_raw])
    rel = spec.coeffs @ (pd.lassos.point_integral(f1.point, m.via) - pd.lassos.point_integral(f2.point, m.via))
    z = np.concatenate([periods, [rel]])
    t = tau0_eval(c, spec, pd, basepoint=c.point(basepoint_x))
    return z, t.log_value


def _perturb(c: HyperellipticCurve, spec: DifferentialSpec, dp):
    e = list(c.branch_points)
    for i in range(3):
        e[i] += dp[i]
    return HyperellipticCurve(tuple(e), c.min_separation, c.chain), DifferentialSpec(spec.c0 + dp[3], spec.c1 + dp[4])


def euler_check(c, spec, h: float | None = None, tol: float = 1e-6) -> dict:
    """``sum_i z_i d log tau / d z_i`` over the five period coordinates.

    Parameters ``(e_0, e_1, e_2, c0, c1)`` are perturbed by central
    differences; the Jacobian of the coordinates is inverted to get the
    parameter direction ``dp`` with ``J dp = z``, along which the derivative
    of ``log tau`` is the Euler sum.  The step is halved until two estimates
    agree to ``tol``.
    """
    m0 = _marked(c, spec)
    scale = float(np.max(np.abs(c.e - np.mean(c.e))))
    h = h or 1e-3 * scale
    bx = default_basepoint(c, spec).x

    def estimate(h):
        z0, _ = _coords_and_log(m0, bx)
        J = np.empty((5, 5), dtype=complex)
        for k in range(5):
            dp = np.zeros(5, dtype=complex)
            dp[k] = h
            zp, _ = _coords_and_log(_marked(*_perturb(c, spec, dp), m0.pd, m0.zero_ref, m0.via), bx)
            zm, _ = _coords_and_log(_marked(*_perturb(c, spec, -dp), m0.pd, m0.zero_ref, m0.via), bx)
            J[:, k] = (zp - zm) / (2 * h)
        cond = float(np.linalg.cond(J))
        direction = np.linalg.solve(J, z0)
        step = h / max(np.max(np.abs(direction)), 1e-300)
        _, lp = _coords_and_log(_marked(*_perturb(c, spec, step * direction), m0.pd, m0.zero_ref, m0.via), bx)
        _, lm = _coords_and_log(_marked(*_perturb(c, spec, -step * direction), m0.pd, m0.zero_ref, m0.via), bx)
        d = lp - lm
        d -= 2j * math.pi * round(d.imag / (2 * math.pi))
        return d / (2 * step), cond

    prev, cond = estimate(h)
    for _ in range(4):
        h /= 2
        cur, cond = estimate(h)
        if abs(cur - prev) < tol:
            prev = cur
            break
        prev = cur
    return {"euler_sum": prev, "jacobian_condition": cond, "step": h}


def invariance_suite(c, spec, euler: bool = True) -> dict:
    """Homogeneity and Euler identity, plus the basic invariances."""
    pd = period_data(c)
    out = {"invariance": invariance_report(c, spec, pd), "homogeneity": homogeneity_check(c, spec, pd)}
    if euler:
        out["euler"] = euler_check(c, spec)
    return out


def symplectic_check(c, spec, gamma, pd: PeriodData | None = None) -> dict:
    """``tau`` in the basis ``gamma . (a, b)`` against ``det(C Omega + D)^24``."""
    pd = pd or period_data(c)
    gamma = np.asarray(gamma, dtype=int)
    new = pd.transformed(gamma)
    t0 = tau0_eval(c, spec, pd)
    t1 = tau0_eval(c, spec, new)
    C, D = gamma[2:, :2], gamma[2:, 2:]
    factor = np.linalg.det(C @ pd.omega + D) ** 24
    ratio = t1.value / t0.value
    return {"ratio": ratio, "expected": factor, "residual": abs(ratio / factor - 1)}


def separation_t(pd: PeriodData, spec: DifferentialSpec, branch_index: int) -> tuple[complex, complex]:
    """``t = (int_{x2}^{x1} omega)^2`` by two routings.

    The first goes through the nearby branch point; the second integrates
    ``omega`` once around the circle through the zeros centred there.
    """
    c = pd.curve
    f1, f2 = zeros_of_differential(c, spec, threshold=0.0)
    e = c.e[branch_index]
    z_a = spec.coeffs @ (pd.lassos.point_integral(f1.point, branch_index)
                         - pd.lassos.point_integral(f2.point, branch_index))
    x0 = f1.point.x
    r = x0 - e
    rest = np.delete(c.e, branch_index)
    den = x0 - rest

    def fun(s):
        th = 2 * math.pi * s
        x = e + r * cmath.exp(1j * th)
        y = f1.point.y * cmath.exp(0.5j * th) * np.prod(np.sqrt((x - rest) / den))
        dx = 2j * math.pi * r * cmath.exp(1j * th)
        return np.array([(spec.c0 + spec.c1 * x) * dx / y])

    loop = quad_vec(fun, 0.0, 1.0, epsabs=1e-14, epsrel=1e-12)[0][0]
    # the circle runs from x1 to x2
    return z_a ** 2, loop ** 2


def ddeg_exponent_probe(c, branch_index: int = 0, c1: complex = 1.0, distances=None, direction: complex = None) -> dict:
    """Fitted slopes as the zeros of ``omega`` merge at a branch point.

    ``x0 = e_i + d * direction`` for ``d`` in ``distances``; returns the
    slope of ``log|tau|`` against ``log|t|`` (expected 1/3) and of
    ``log|t|`` against ``log d`` (expected 3).
    """
    if distances is None:
        distances = np.geomspace(1e-2, 5e-4, 9)
    e = c.e
    scale = float(np.max(np.abs(e - np.mean(e))))
    if direction is None:
        centre = np.mean(e)
        direction = (centre - e[branch_index]) / abs(centre - e[branch_index]) * cmath.exp(0.4j)
    pd = period_data(c)
    rows = []
    for d in distances:
        x0 = e[branch_index] + d * scale * direction
        spec = DifferentialSpec(-c1 * x0, c1)
        t_a, t_b = separation_t(pd, spec, branch_index)
        tau = tau0_eval(c, spec, pd)
        rows.append({"distance": float(d * scale), "t": t_a, "t_circle": t_b, "log_abs_tau": tau.log_value.real})
    lt = np.log([abs(r["t"]) for r in rows])
    ltau = np.array([r["log_abs_tau"] for r in rows])
    ld = np.log([r["distance"] for r in rows])
    slope_tau = float(np.polyfit(lt, ltau, 1)[0])
    slope_t = float(np.polyfit(ld, lt, 1)[0])
    t_agree = max(abs(r["t"] - r["t_circle"]) / abs(r["t"]) for r in rows)
    return {"rows": rows, "slope_tau_vs_t": slope_tau, "slope_t_vs_distance": slope_t,
            "t_routing_residual": t_agree, "decades_of_t": float((lt.max() - lt.min()) / math.log(10))}
