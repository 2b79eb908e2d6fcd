"""Periods, Abel map and Riemann constants on genus-2 hyperelliptic curves.

Paths are built from *lassos*: from a base point ``P0`` straight to a branch
point ``e_k`` and back on the other sheet.  Along a straight segment from a
regular point ``A`` the function ``y`` is continued as
``y_A * prod sqrt((x - e_i)/(A - e_i))`` with principal roots, which is
continuous as long as the segment does not pass through a branch point.

Seen from ``P0`` the branch points have a cyclic order ``o_0 .. o_5``; the
chain loops ``c_j`` (lasso to ``o_j`` then lasso to ``o_{j+1}``) have
intersection numbers ``c_j . c_{j+1} = +-1`` and ``0`` otherwise.  The
symplectic basis is ``a1 = c0``, ``a2 = c2``, ``b1 = e1 c1 + e1 e2 e3 c3``,
``b2 = e3 c3`` with the signs ``e_j`` fixed by requiring ``Omega`` symmetric
with positive definite imaginary part.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.integrate import quad_vec

from ..specialfn import SiegelPoint, riemann_theta
from .curve import CurvePoint, HyperellipticCurve

DEFAULT_TOL = 1e-12


class QuadratureError(RuntimeError):
    pass


class PeriodMatrixError(RuntimeError):
    """No orientation of the loop basis gives a Riemann matrix."""


def _integrate(fun, tol):
    val, err = quad_vec(fun, 0.0, 1.0, epsabs=tol, epsrel=tol, limit=2000)
    if not np.all(np.isfinite(val)) or err > max(1e3 * tol, 1e-9) * (1 + np.max(np.abs(val))):
        raise QuadratureError(f"quadrature did not converge (error estimate {err:.3g})")
    return val


def segment_integral(c: HyperellipticCurve, a: complex, ya: complex, b: complex,
                     tol: float = DEFAULT_TOL) -> tuple[np.ndarray, complex | None]:
    """``int_a^b (1, x) dx / y`` along the straight segment, starting with ``y(a) = ya``.

    ``b`` may be a branch point; the square-root singularity there is
    absorbed by ``x = b + (a - b) u^2``.  Returns the integral and the
    continued value ``y(b)`` (``None`` when ``b`` is a branch point).
    """
    e = c.e
    a = complex(a)
    b = complex(b)
    if a == b:
        return np.zeros(2, dtype=complex), ya
    hit = np.flatnonzero(np.abs(e - b) <= 1e-14 * (1 + abs(b)))
    if hit.size:
        k = int(hit[0])
        rest = np.delete(e, k)
        den_a = a - rest
        d = a - b

        def fun(u):
            x = b + d * u * u
            yr = ya * np.prod(np.sqrt((x - rest) / den_a))
            return (-2 * d / yr) * np.array([1.0, x])

        return _integrate(fun, tol), None
    den_a = a - e
    d = b - a

    def fun(s):
        x = a + d * s
        yx = ya * np.prod(np.sqrt((x - e) / den_a))
        return (d / yx) * np.array([1.0, x])

    yb = ya * np.prod(np.sqrt((b - e) / den_a))
    return _integrate(fun, tol), complex(yb)


def _seg_clearance(p, q, pts):
    """Smallest distance from ``pts`` to the segment ``[p, q]``."""
    d = q - p
    t = np.clip(((pts - p) * np.conj(d)).real / (abs(d) ** 2), 0.0, 1.0)
    return float(np.min(np.abs(pts - (p + t * d)))) if len(pts) else math.inf


def _angular_order(p0, e):
    ang = np.angle(e - p0)
    return [int(i) for i in np.argsort(ang, kind="stable")]


def _cyclic_match(order, target):
    n = len(order)
    for seq in (list(target), list(reversed(target))):
        k = order.index(seq[0])
        if [order[(k + i) % n] for i in range(n)] == seq:
            return list(target)
    return None


def _chain_gaps_ok(p0, e, seq):
    # consecutive chain points must be seen under an angle below pi; the
    # wrap-around gap between seq[5] and seq[0] is unconstrained
    for j in range(5):
        gap = abs(cmath.phase((e[seq[j + 1]] - p0) / (e[seq[j]] - p0)))
        if gap >= 0.97 * math.pi:
            return False
    return True


def choose_basepoint(c: HyperellipticCurve) -> tuple[complex, list[int]]:
    """Base point and chain order.

    Candidates sit on a fixed grid relative to the centroid and diameter of
    the branch points, so the choice is equivariant under ``x -> lam x + b``
    with ``lam > 0``.  A candidate must see each of the five chain gaps
    under an angle below pi.  Among those realising the
    requested chain order (input order by default) the one with the best
    clearance wins; otherwise the best candidate overall with its own
    angular order starting at branch point 0.
    """
    e = c.e
    centre = complex(np.mean(e))
    radius = float(np.max(np.abs(e - centre)))
    target = list(c.chain) if c.chain is not None else list(range(6))
    best_pref = None
    best_any = None
    for r in (0.0, 0.08, 0.16, 0.25, 0.35, 0.5):
        for j in range(24 if r else 1):
            p0 = centre + radius * r * cmath.exp(2j * math.pi * (j + 0.5) / 24)
            if np.min(np.abs(e - p0)) < 1e-9 * radius:
                continue
            order = _angular_order(p0, e)
            score = min(_seg_clearance(p0, e[k], np.delete(e, k)) for k in range(6)) / radius
            score = min(score, float(np.min(np.abs(e - p0))) / radius)
            seq = _cyclic_match(order, target)
            if seq is not None and _chain_gaps_ok(p0, e, seq) and (best_pref is None or score > best_pref[0] + 1e-12):
                best_pref = (score, p0, seq)
            k = order.index(0)
            own = order[k:] + order[:k]
            if _chain_gaps_ok(p0, e, own) and (best_any is None or score > best_any[0] + 1e-12):
                best_any = (score, p0, own)
    if best_pref is not None and best_pref[0] >= 0.02:
        return best_pref[1], best_pref[2]
    if best_any is None:
        raise PeriodMatrixError("no admissible base point inside the branch-point hull")
    return best_any[1], best_any[2]


@dataclass(frozen=True)
class LassoSystem:
    """Base point data and ``I[k] = int_{P0}^{e_k} (1, x) dx / y`` on the sheet ``y(P0) = yb``."""

    curve: HyperellipticCurve
    p0: complex
    yb: complex
    order: tuple[int, ...]
    I: np.ndarray
    tol: float

    def word_integral(self, word) -> np.ndarray:
        """Raw integral along a lasso word (must have even length to close)."""
        s = 1
        total = np.zeros(2, dtype=complex)
        for k in word:
            total = total + 2 * s * self.I[k]
            s = -s
        return total

    def chain_word(self, j: int, sign: int = 1) -> list[int]:
        a, b = self.order[j], self.order[j + 1]
        return [a, b] if sign > 0 else [b, a]

    def cycle_word(self, coeffs) -> list[int]:
        """Concatenated word for the integer combination ``sum n_j c_j``."""
        word = []
        for j, n in enumerate(coeffs):
            n = int(n)
            for _ in range(abs(n)):
                word += self.chain_word(j, 1 if n > 0 else -1)
        return word

    def chain_periods(self) -> np.ndarray:
        """Raw periods of the five chain loops, shape (5, 2)."""
        return np.array([self.word_integral(self.chain_word(j)) for j in range(5)])

    def chain_periods_direct(self) -> np.ndarray:
        """Same periods routed through the midpoint of each branch-point pair."""
        c = self.curve
        e = c.e
        out = []
        for j in range(5):
            ka, kb = self.order[j], self.order[j + 1]
            mid = (e[ka] + e[kb]) / 2
            _, ym = segment_integral(c, self.p0, self.yb, mid, self.tol)
            ia, _ = segment_integral(c, mid, ym, e[ka], self.tol)
            ib, _ = segment_integral(c, mid, ym, e[kb], self.tol)
            out.append(2 * (ia - ib))
        return np.array(out)

    def point_integral(self, p: CurvePoint, via: int | None = None) -> np.ndarray:
        """``int_{P0}^{p} (1, x) dx / y`` through the branch point ``via``.

        By default the branch point nearest to ``p`` is used, so the final
        segment cannot pass through another branch point.
        """
        e = self.curve.e
        j = int(np.argmin(np.abs(e - p.x))) if via is None else via
        if abs(p.x - e[j]) < 1e-14 * (1 + abs(e[j])):
            return self.I[j].copy()
        tail, _ = segment_integral(self.curve, p.x, p.y, e[j], self.tol)
        return self.I[j] - tail


def lasso_system(c: HyperellipticCurve, tol: float = DEFAULT_TOL, basepoint: complex | None = None,
                 order=None, sheet_ref: complex | None = None) -> LassoSystem:
    if basepoint is None:
        p0, order = choose_basepoint(c)
    else:
        p0 = complex(basepoint)
        if order is None:
            order = _angular_order(p0, c.e)
            k = order.index(0)
            order = order[k:] + order[:k]
    yb = cmath.sqrt(complex(c.poly(p0)))
    if sheet_ref is not None and abs(yb + sheet_ref) < abs(yb - sheet_ref):
        yb = -yb
    I = np.array([segment_integral(c, p0, yb, ek, tol)[0] for ek in c.e])
    return LassoSystem(c, p0, yb, tuple(order), I, tol)


#: Lasso words (in chain positions) of a canonical system ``prod [a_i, b_i] = 1``
#: realising the basis below; the iterated integrals of the Riemann constants
#: are only valid along such loops.
CANONICAL_WORDS = {
    (1, 1, 1): ((2, 1, 0, 2), (2, 3), (2, 5, 0, 2), (3, 4)),
    (-1, -1, -1): ((0, 1), (2, 3), (1, 0, 5, 1), (4, 3)),
}


def _basis_coeffs(eps):
    """Chain-loop coefficients of (a1, a2, b1, b2) for intersection signs (e1, e2, e3)."""
    e1, e2, e3 = eps
    return np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, e1, 0, e1 * e2 * e3], [0, 0, 0, e3]])


@dataclass(frozen=True)
class PeriodData:
    """Normalised periods for a marked curve.

    ``a_periods_raw[i, j] = oint_{a_j} phi_i`` with ``phi = (dx/y, x dx/y)``;
    the normalised differentials are ``omega = normalization @ phi``.
    ``cycles`` holds the chain-loop coefficients of ``a1, a2, b1, b2``.
    """

    sp: SiegelPoint
    a_periods_raw: np.ndarray
    b_periods_raw: np.ndarray
    normalization: np.ndarray
    cycles: np.ndarray
    lassos: LassoSystem
    symmetry_residual: float
    intersection_signs: tuple[int, int, int]
    canonical_words: tuple | None = None

    @property
    def omega(self) -> np.ndarray:
        return self.sp.omega

    @property
    def curve(self) -> HyperellipticCurve:
        return self.lassos.curve

    def normalized(self, raw) -> np.ndarray:
        return self.normalization @ raw

    def cycle_word(self, which: int) -> list[int]:
        """Lasso word of basis cycle ``which`` (0, 1 = a1, a2; 2, 3 = b1, b2)."""
        return self.lassos.cycle_word(self.cycles[which])

    def abel(self, p: CurvePoint, via: int | None = None) -> np.ndarray:
        """Normalised ``int_{P0}^p omega``."""
        return self.normalization @ self.lassos.point_integral(p, via)

    @cached_property
    def lasso_normalized(self) -> np.ndarray:
        return (self.normalization @ self.lassos.I.T).T

    def transformed(self, gamma) -> "PeriodData":
        """Period data in the basis ``a' = D a + C b``, ``b' = A b + B a``."""
        gamma = np.asarray(gamma, dtype=int)
        g = 2
        A, B, C, D = gamma[:g, :g], gamma[:g, g:], gamma[g:, :g], gamma[g:, g:]
        J = np.block([[np.zeros((g, g), int), np.eye(g, dtype=int)], [-np.eye(g, dtype=int), np.zeros((g, g), int)]])
        if not np.array_equal(gamma.T @ J @ gamma, J):
            raise ValueError("gamma is not symplectic")
        a, b = self.cycles[:g], self.cycles[g:]
        new = np.vstack([D @ a + C @ b, A @ b + B @ a])
        words = self.canonical_words if np.array_equal(gamma, np.eye(2 * g, dtype=int)) else None
        return _build(self.lassos, new, self.intersection_signs, words)


def _build(ls: LassoSystem, cycles: np.ndarray, eps, words=None) -> PeriodData:
    chain = ls.chain_periods()[:4]
    raw = cycles @ chain
    pa = raw[:2].T
    pb = raw[2:].T
    n = np.linalg.inv(pa)
    om = n @ pb
    sym = float(np.max(np.abs(om - om.T)))
    if words is not None:
        words = tuple(tuple(ls.order[j] for j in w) for w in words)
    return PeriodData(SiegelPoint(om), pa, pb, n, cycles, ls, sym, tuple(eps), words)


def period_data(c: HyperellipticCurve, tol: float = DEFAULT_TOL, basepoint: complex | None = None,
                order=None, sheet_ref: complex | None = None) -> PeriodData:
    """Normalised period data in the chain-loop basis.

    ``basepoint``, ``order`` and ``sheet_ref`` (a reference value of
    ``y(P0)``) pin the marking under small deformations.
    """
    ls = lasso_system(c, tol, basepoint, order, sheet_ref)
    chain = ls.chain_periods()[:4]
    best = None
    for eps in itertools.product((1, -1), repeat=3):
        cyc = _basis_coeffs(eps)
        raw = cyc @ chain
        pa, pb = raw[:2].T, raw[2:].T
        om = np.linalg.solve(pa, pb)
        sym = float(np.max(np.abs(om - om.T)))
        im = ((om + om.T) / 2).imag
        if np.all(np.linalg.eigvalsh(im) > 0) and (best is None or sym < best[0]):
            best = (sym, eps)
    if best is None or best[0] > 1e-6 * (1 + np.max(np.abs(chain))) or best[1] not in CANONICAL_WORDS:
        raise PeriodMatrixError("no orientation of the chain basis yields a Riemann matrix")
    return _build(ls, _basis_coeffs(best[1]), best[1], CANONICAL_WORDS[best[1]])


def abel_map(pd: PeriodData, x: CurvePoint, basepoint: CurvePoint, loop=None) -> np.ndarray:
    """``int_basepoint^x (omega_1, omega_2)``.

    ``loop`` optionally inserts a closed path at ``P0``: either an index into
    the basis (0, 1 = a1, a2; 2, 3 = b1, b2) or a chain-loop coefficient
    vector.
    """
    val = pd.abel(x) - pd.abel(basepoint)
    if loop is not None:
        coeffs = pd.cycles[loop] if np.ndim(loop) == 0 else np.asarray(loop)
        val = val + pd.normalized(pd.lassos.word_integral(pd.lassos.cycle_word(coeffs)))
    return val


def _a_cycle_iterated(pd: PeriodData) -> np.ndarray:
    """``L[l, j] = oint_{a_l} omega_l(y) int_{P0}^y omega_j`` along the canonical a-words.

    A lasso to ``e_k`` entered on sheet ``s`` with running integral ``F``
    contributes ``2 s F_j H_l + 2 H_l H_j`` where ``H = int_{P0}^{e_k} omega``;
    the iterated integral along the spoke cancels between the two passes.
    """
    H = pd.lasso_normalized
    out = np.zeros((2, 2), dtype=complex)
    for l in range(2):
        F = np.zeros(2, dtype=complex)
        s = 1
        for k in pd.canonical_words[l]:
            out[l] += 2 * s * F * H[k, l] + 2 * H[k, l] * H[k]
            F = F + 2 * s * H[k]
            s = -s
    return out


def riemann_constants(pd: PeriodData, basepoint: CurvePoint | None = None, method: str = "quadrature") -> np.ndarray:
    """Vector of Riemann constants ``K^x`` for the marked curve.

    ``quadrature``: ``K_j = (1 + Omega_jj)/2 - sum_{l != j} oint_{a_l} omega_l(y) int_x^y omega_j``.
    ``intrinsic``: ``-A^x((omega))/2`` plus the half period for which
    ``theta(K + A^x(p))`` vanishes identically in ``p``.  ``auto`` uses the
    quadrature when a canonical loop system is known for the basis.
    Both agree modulo the lattice.
    """
    g = 2
    om = pd.omega
    shift = np.zeros(g, dtype=complex) if basepoint is None else pd.abel(basepoint)
    if method == "auto":
        method = "quadrature" if pd.canonical_words is not None else "intrinsic"
    if method == "quadrature":
        if pd.canonical_words is None:
            raise ValueError("quadrature needs the canonical loop system of the chain basis")
        L = _a_cycle_iterated(pd)
        k = np.empty(g, dtype=complex)
        for j in range(g):
            k[j] = (1 + om[j, j]) / 2 - sum(L[l, j] - shift[j] for l in range(g) if l != j)
        return k
    if method == "intrinsic":
        return _intrinsic_constants(pd, shift)
    raise ValueError(f"unknown method {method!r}")


def canonical_divisor_points(c: HyperellipticCurve) -> tuple[CurvePoint, CurvePoint]:
    """Zeros of ``(x - x*) dx / y`` for a fixed regular ``x*``, a canonical divisor."""
    xs = complex(np.mean(c.e)) + 0.37 * float(np.max(np.abs(c.e - np.mean(c.e)))) * (1 + 0.6j)
    p = c.point(xs)
    return p, CurvePoint(p.x, -p.y)


def _intrinsic_constants(pd: PeriodData, shift: np.ndarray) -> np.ndarray:
    c = pd.curve
    om = pd.omega
    p, q = canonical_divisor_points(c)
    base = -(pd.abel(p) + pd.abel(q)) / 2 + shift
    e = c.e
    centre = np.mean(e)
    rad = float(np.max(np.abs(e - centre)))
    probes = [c.point(centre + rad * 0.41 * cmath.exp(1j * t), sgn) for t, sgn in ((0.3, 1), (2.1, -1), (4.0, 1))]
    probe_vals = [pd.abel(x) - shift for x in probes]
    best = None
    for alpha in itertools.product((0, 0.5), repeat=2):
        for beta in itertools.product((0, 0.5), repeat=2):
            k = base + om @ np.array(alpha) + np.array(beta)
            r = max(abs(riemann_theta(k + v, pd.sp, normalized=True)) for v in probe_vals)
            if best is None or r < best[0]:
                best = (r, k)
    return best[1]


def lattice_coordinates(pd: PeriodData, v) -> tuple[np.ndarray, np.ndarray, float]:
    """Integer ``Z, Z'`` with ``v ~ Omega Z + Z'`` and the rounding residual."""
    om = pd.omega
    v = np.asarray(v, dtype=complex)
    zr = np.linalg.solve(om.imag, v.imag)
    z = np.rint(zr)
    zpr = (v - om @ z).real
    zp = np.rint(zpr)
    resid = float(np.max(np.abs(v - om @ z - zp)))
    return z.astype(int), zp.astype(int), resid
