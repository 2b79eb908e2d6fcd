"""Riemann theta functions with characteristics, Dedekind eta and E2.

Theta sums run over lattice points inside an ellipsoid sized so that the
Gaussian tail is below ``tol``.  The bound is on the *normalised* series,
i.e. the sum divided by ``exp(pi * Im(v)^T (Im Omega)^-1 Im(v))``, which is
the natural scale of the function at ``v``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

DEFAULT_TOL = {1: 1e-10, 2: 1e-8}
MAX_BOX = 60


class ThetaDomainError(ValueError):
    """Im(Omega) is not positive definite."""


class ThetaRadiusError(RuntimeError):
    """The certified summation radius exceeds the hard cap."""


@dataclass(frozen=True)
class SiegelPoint:
    omega: np.ndarray

    def __post_init__(self):
        om = np.atleast_2d(np.asarray(self.omega, dtype=complex))
        if om.shape[0] != om.shape[1]:
            raise ThetaDomainError(f"period matrix must be square, got {om.shape}")
        if np.max(np.abs(om - om.T)) > 1e-8 * max(1.0, np.max(np.abs(om))):
            raise ThetaDomainError("period matrix is not symmetric")
        im = om.imag
        for k in range(1, om.shape[0] + 1):
            if np.linalg.det(im[:k, :k]) <= 0:
                raise ThetaDomainError("Im(Omega) is not positive definite")
        object.__setattr__(self, "omega", (om + om.T) / 2)

    @property
    def g(self) -> int:
        return self.omega.shape[0]


@dataclass(frozen=True)
class ThetaCharacteristic:
    """Half-integer characteristic ``[eps; eps_prime]`` with entries in {0, 1/2}."""

    eps: tuple[float, ...]
    eps_prime: tuple[float, ...]

    def __post_init__(self):
        if len(self.eps) != len(self.eps_prime):
            raise ValueError("characteristic halves differ in length")
        for x in self.eps + self.eps_prime:
            if x not in (0, 0.5):
                raise ValueError(f"characteristic entries must be 0 or 1/2, got {x}")

    @classmethod
    def zero(cls, g: int) -> "ThetaCharacteristic":
        return cls((0,) * g, (0,) * g)

    @property
    def g(self) -> int:
        return len(self.eps)

    def parity(self) -> str:
        return "odd" if round(4 * sum(a * b for a, b in zip(self.eps, self.eps_prime))) % 2 else "even"

    @property
    def is_odd(self) -> bool:
        return self.parity() == "odd"

    def __str__(self):
        def f(x):
            return "1/2" if x else "0"
        return "[" + " ".join(map(f, self.eps)) + "; " + " ".join(map(f, self.eps_prime)) + "]"


def parity(ch: ThetaCharacteristic) -> str:
    return ch.parity()


def all_characteristics(g: int) -> list[ThetaCharacteristic]:
    vals = list(itertools.product((0, 0.5), repeat=g))
    return [ThetaCharacteristic(a, b) for a in vals for b in vals]


def odd_characteristics(g: int) -> list[ThetaCharacteristic]:
    return [ch for ch in all_characteristics(g) if ch.is_odd]


def _radius(g, order, tol, tmin, cnorm):
    # smallest rho with  shell-count * |2 pi n|^order * exp(-pi (rho-1)^2) < tol,
    # |n| <= rho / tmin + |center| on the shell
    rho = 1.0
    while True:
        growth = (2 * g) * ((rho + 2) / tmin) ** (g - 1) * (2 * math.pi * ((rho + 2) / tmin + cnorm + 1)) ** order
        if growth * math.exp(-math.pi * max(rho - 1.0, 0.0) ** 2) < tol:
            return rho
        rho += 0.25


def _lattice_points(sp: SiegelPoint, center: np.ndarray, rho: float):
    y = sp.omega.imag
    yinv = np.linalg.inv(y)
    half = rho * np.sqrt(np.diag(yinv))
    lo = np.floor(center - half).astype(int)
    hi = np.ceil(center + half).astype(int)
    if np.any(hi - lo > 2 * MAX_BOX):
        raise ThetaRadiusError(f"summation box {hi - lo} exceeds the hard cap; Omega is badly conditioned")
    axes = [np.arange(a, b + 1) for a, b in zip(lo, hi)]
    pts = np.array(np.meshgrid(*axes, indexing="ij")).reshape(len(axes), -1).T
    chol = np.linalg.cholesky(y)
    dist = np.einsum("ij,nj->ni", chol.T, pts - center)
    keep = np.sum(dist ** 2, axis=1) <= (rho + math.sqrt(sp.g)) ** 2
    return pts[keep]


def riemann_theta(v, sp: SiegelPoint | np.ndarray, ch: ThetaCharacteristic | None = None,
                  deriv: Sequence[int] | None = None, directions: Sequence[Sequence[complex]] | None = None,
                  tol: float | None = None, normalized: bool = False) -> complex:
    """Theta function ``theta[ch](v; Omega)`` and its derivatives in ``v``.

    ``deriv`` is a multi-index of partial derivatives; ``directions`` is a
    list of vectors giving a mixed directional derivative (one factor per
    vector).  Both are applied term by term, exactly.  With
    ``normalized=True`` the value is divided by ``exp(pi Im(v)^T Y^-1 Im(v))``.
    """
    if not isinstance(sp, SiegelPoint):
        sp = SiegelPoint(sp)
    g = sp.g
    v = np.atleast_1d(np.asarray(v, dtype=complex))
    if v.shape != (g,):
        raise ValueError(f"argument must have length {g}")
    if ch is None:
        ch = ThetaCharacteristic.zero(g)
    if tol is None:
        tol = DEFAULT_TOL.get(g, 1e-8)
    if tol <= 0:
        raise ValueError("tol must be positive")
    eps = np.asarray(ch.eps, dtype=float)
    epsp = np.asarray(ch.eps_prime, dtype=float)
    order = 0
    if deriv is not None:
        if len(deriv) != g:
            raise ValueError("derivative multi-index has wrong length")
        order += sum(deriv)
    if directions is not None:
        order += len(directions)

    om = sp.omega
    y = om.imag
    yinv = np.linalg.inv(y)
    iv = v.imag
    # terms peak where n + eps = -Y^-1 Im v
    center = -yinv @ iv - eps
    tmin = math.sqrt(max(np.linalg.eigvalsh(y).min(), 1e-300))
    rho = _radius(g, order, tol, tmin, float(np.linalg.norm(center)))
    n = _lattice_points(sp, center, rho) + eps
    quad = np.einsum("ni,ij,nj->n", n, om, n)
    expo = 1j * math.pi * quad + 2j * math.pi * (n @ (v + epsp)) - math.pi * (iv @ yinv @ iv)
    terms = np.exp(expo)
    if deriv is not None:
        for j, k in enumerate(deriv):
            if k:
                terms = terms * (2j * math.pi * n[:, j]) ** k
    if directions is not None:
        for w in directions:
            terms = terms * (2j * math.pi * (n @ np.asarray(w, dtype=complex)))
    total = complex(np.sum(terms))
    if normalized:
        return total
    return total * math.exp(math.pi * (iv @ yinv @ iv))


def theta_gradient(v, sp, ch=None, tol=None) -> np.ndarray:
    """Gradient of ``theta[ch]`` in ``v``."""
    if not isinstance(sp, SiegelPoint):
        sp = SiegelPoint(sp)
    g = sp.g
    out = np.empty(g, dtype=complex)
    for j in range(g):
        idx = [0] * g
        idx[j] = 1
        out[j] = riemann_theta(v, sp, ch, deriv=idx, tol=tol)
    return out


def quasi_periodicity_factor(v, sp: SiegelPoint, n, m, ch: ThetaCharacteristic | None = None) -> complex:
    """Multiplier relating ``theta[ch](v + Omega n + m)`` to ``theta[ch](v)``."""
    n = np.asarray(n, dtype=float)
    m = np.asarray(m, dtype=float)
    v = np.asarray(v, dtype=complex)
    phase = 0.0
    if ch is not None:
        phase = 2 * math.pi * (np.dot(ch.eps, m) - np.dot(ch.eps_prime, n))
    return complex(np.exp(-1j * math.pi * n @ sp.omega @ n - 2j * math.pi * n @ v + 1j * phase))


def _check_upper(sigma):
    sigma = complex(sigma)
    if sigma.imag <= 0:
        raise ValueError(f"Im(sigma) must be positive, got {sigma}")
    return sigma


def _nterms(sigma, tol):
    aq = math.exp(-2 * math.pi * sigma.imag)
    # tail of sum |log(1 - q^n)| is about |q|^N / (1 - |q|)
    n = math.log(tol * (1 - aq)) / math.log(aq)
    return max(1, int(math.ceil(n)) + 1)


def _clog1p(z: np.ndarray) -> np.ndarray:
    # numpy's complex log1p loses all digits for |z| below machine epsilon
    x, y = z.real, z.imag
    return 0.5 * np.log1p(2 * x + x * x + y * y) + 1j * np.arctan2(y, 1 + x)


def log_eta_product(sigma, tol: float = 1e-10) -> complex:
    """``sum log(1 - q^n)``, the correction to the leading ``q^(1/24)``."""
    sigma = _check_upper(sigma)
    n = np.arange(1, _nterms(sigma, tol) + 1)
    qn = np.exp(2j * math.pi * n * sigma)
    return complex(np.sum(_clog1p(-qn)))


def log_dedekind_eta(sigma, tol: float = 1e-10) -> complex:
    """``pi i sigma / 12 + sum log(1 - q^n)``, a holomorphic branch of log eta."""
    sigma = _check_upper(sigma)
    return 1j * math.pi * sigma / 12 + log_eta_product(sigma, tol)


def dedekind_eta(sigma, tol: float = 1e-10) -> complex:
    """``eta(sigma) = q^(1/24) prod (1 - q^n)``, ``q = exp(2 pi i sigma)``."""
    return complex(np.exp(log_dedekind_eta(sigma, tol)))


def eisenstein_e2(sigma, tol: float = 1e-10) -> complex:
    """Quasimodular ``E2 = 1 - 24 sum n q^n / (1 - q^n)``."""
    sigma = _check_upper(sigma)
    aq = math.exp(-2 * math.pi * sigma.imag)
    n_max = _nterms(sigma, tol / 24)
    # the Lambert terms carry an extra factor n
    while n_max * aq ** n_max / (1 - aq) ** 2 > tol / 24:
        n_max += max(1, n_max // 4)
    n = np.arange(1, n_max + 1)
    qn = np.exp(2j * math.pi * n * sigma)
    return 1 - 24 * complex(np.sum(n * qn / (1 - qn)))
