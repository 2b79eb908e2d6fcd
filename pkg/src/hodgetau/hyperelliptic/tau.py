"""Tau function of a generic differential on a genus-2 hyperelliptic curve.

For ``omega = (c0 + c1 x) dx / y`` with simple zeros ``x1, x2`` and a base
point ``zeta``,

    tau = [D^2 theta(K^zeta)]^16 / (exp(4 pi i <Omega Z + s 4 K^zeta, Z>) W^16)
          * E(x1, x2)^4 / (E(zeta, x1)^8 E(zeta, x2)^8)

with ``D = sum_i (omega_i / d zeta)(zeta) d/dv_i``, ``W`` the Wronskian of the
normalised differentials in the natural frame, and integers ``Z, Z'`` from
``A^zeta(x1) + A^zeta(x2) + 2 K^zeta = Omega Z + Z'``.  The sign ``s = -1`` is
the one for which the expression is unchanged when any of the integration
paths (to ``x1``, to ``x2``, or for ``K``) is moved by a lattice vector;
``exponent_sign=+1`` is kept for comparison.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from ..specialfn import ThetaCharacteristic, odd_characteristics, riemann_theta
from .curve import (
    DEFAULT_DEGENERACY_THRESHOLD,
    CurvePoint,
    DifferentialSpec,
    HyperellipticCurve,
    zeros_of_differential,
)
from .periods import PeriodData, lattice_coordinates, period_data, riemann_constants
from .primeform import prime_form_base_zero, prime_form_zeros

LATTICE_TOL = 1e-6
THETA_NOISE_FLOOR = 1e-11


class TauEvaluationError(RuntimeError):
    pass


def _c(z):
    return [float(np.real(z)), float(np.imag(z))]


@dataclass
class TauEvaluation:
    value: complex
    log_value: complex
    theta_term: complex
    wronskian: complex
    e_zeros: complex
    e_base: tuple[complex, complex]
    riemann_constants: np.ndarray
    Z: np.ndarray
    Z_prime: np.ndarray
    lattice_residual: float
    prefactor: complex
    characteristic: str
    basepoint: CurvePoint
    exponent_sign: int
    k_method: str

    def to_dict(self) -> dict:
        return {
            "value": _c(self.value),
            "log_abs": float(self.log_value.real),
            "theta_term": _c(self.theta_term),
            "wronskian": _c(self.wronskian),
            "E_x1_x2": _c(self.e_zeros),
            "E_zeta_xk": [_c(v) for v in self.e_base],
            "K": [_c(v) for v in self.riemann_constants],
            "Z": [int(v) for v in self.Z],
            "Z_prime": [int(v) for v in self.Z_prime],
            "lattice_residual": self.lattice_residual,
            "prefactor": _c(self.prefactor),
            "characteristic": self.characteristic,
            "basepoint": {"x": _c(self.basepoint.x), "y": _c(self.basepoint.y)},
            "exponent_sign": self.exponent_sign,
            "k_method": self.k_method,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def default_basepoint(c: HyperellipticCurve, spec: DifferentialSpec, index: int = 0) -> CurvePoint:
    """A regular point well away from branch points and zeros.

    Candidates lie on a circle around the centroid; ``index`` picks
    successively worse-ranked candidates, giving distinct base points.
    """
    e = c.e
    centre = complex(np.mean(e))
    rad = float(np.max(np.abs(e - centre)))
    avoid = list(e)
    if spec.c1 != 0:
        avoid.append(-spec.c0 / spec.c1)
    cands = []
    for r in (0.3, 0.55, 0.8):
        for j in range(16):
            x = centre + rad * r * cmath.exp(2j * math.pi * (j + 0.25) / 16)
            cands.append((-min(abs(x - a) for a in avoid), r, j, x))
    cands.sort()
    x = cands[index][3]
    return c.point(x, 1 if index % 2 == 0 else -1)


def tau0_eval(c: HyperellipticCurve, spec: DifferentialSpec, pd: PeriodData | None = None,
              basepoint: CurvePoint | None = None, ch: ThetaCharacteristic | None = None,
              k_method: str = "auto", exponent_sign: int = -1, swap_zeros: bool = False,
              branch_flip: bool = False, shifts: dict | None = None,
              threshold: float = DEFAULT_DEGENERACY_THRESHOLD, tol: float = 1e-12) -> TauEvaluation:
    """Evaluate the tau function of ``(c, omega)`` in the marking of ``pd``.

    ``shifts`` maps ``"u1"``, ``"u2"`` or ``"K"`` to integer pairs ``(n, m)``
    adding ``Omega n + m`` to the corresponding path integral; the result is
    independent of them.
    """
    if pd is None:
        pd = period_data(c, tol)
    f1, f2 = zeros_of_differential(c, spec, threshold)
    if swap_zeros:
        f1, f2 = f2, f1
    if basepoint is None:
        basepoint = default_basepoint(c, spec)
    if ch is None:
        ch = odd_characteristics(2)[0]
    om = pd.omega
    shifts = shifts or {}

    def lat(key):
        n, m = shifts.get(key, ((0, 0), (0, 0)))
        return om @ np.asarray(n, float) + np.asarray(m, float)

    if k_method == "auto":
        k_method = "quadrature" if pd.canonical_words is not None else "intrinsic"
    K = riemann_constants(pd, basepoint, k_method) + lat("K")
    a0 = pd.abel(basepoint)
    u1 = pd.abel(f1.point) - a0 + lat("u1")
    u2 = pd.abel(f2.point) - a0 + lat("u2")
    Z, Zp, resid = lattice_coordinates(pd, u1 + u2 + 2 * K)
    if resid > LATTICE_TOL:
        raise TauEvaluationError(f"lattice relation residual {resid:.3g} exceeds {LATTICE_TOL}")

    xz = basepoint.x
    f0 = spec.c0 + spec.c1 * xz
    direction = pd.normalization @ np.array([1.0, xz]) / f0
    theta_term = riemann_theta(K, pd.sp, directions=[direction, direction])
    scale = (2 * math.pi * np.linalg.norm(direction)) ** 2 * abs(riemann_theta(K, pd.sp, normalized=True) + 1)
    norm_term = riemann_theta(K, pd.sp, directions=[direction, direction], normalized=True)
    if abs(norm_term) < THETA_NOISE_FLOOR * max(scale, 1.0):
        raise TauEvaluationError("theta-derivative term is below the noise floor")
    wronskian = basepoint.y * np.linalg.det(pd.normalization) / f0 ** 3

    bf = (-1, 1) if branch_flip else (1, 1)
    e12 = prime_form_zeros(pd, spec, f1, f2, ch, u=u2 - u1, branch=bf)
    eb1 = prime_form_base_zero(pd, spec, basepoint, f1, ch, u=u1, branch=bf)
    eb2 = prime_form_base_zero(pd, spec, basepoint, f2, ch, u=u2, branch=bf[::-1])
    expo = 4j * math.pi * ((om @ Z + exponent_sign * 4 * K) @ Z)
    log_tau = (16 * cmath.log(theta_term) - expo - 16 * cmath.log(wronskian)
               + 4 * cmath.log(e12) - 8 * cmath.log(eb1) - 8 * cmath.log(eb2))
    value = cmath.exp(log_tau) if log_tau.real < 700 else complex("inf")
    return TauEvaluation(value, log_tau, theta_term, wronskian, e12, (eb1, eb2), K, Z, Zp, resid,
                         cmath.exp(expo), str(ch), basepoint, exponent_sign, k_method)
