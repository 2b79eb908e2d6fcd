"""Genus-2 hyperelliptic curves ``y^2 = prod (x - e_i)`` and differentials on them."""

from __future__ import annotations

import cmath
import json
from dataclasses import dataclass, field

import numpy as np

DEFAULT_MIN_SEPARATION = 1e-3
DEFAULT_DEGENERACY_THRESHOLD = 1e-4


class CurveInputError(ValueError):
    """Malformed or invalid curve/differential data."""


class DegenerateStratumError(ValueError):
    """The differential has a zero on (or too close to) the branch locus."""

    def __init__(self, message, branch_index=None, distance=None):
        super().__init__(message)
        self.branch_index = branch_index
        self.distance = distance


@dataclass(frozen=True)
class CurvePoint:
    """A point ``(x, y)`` of the affine model; ``y`` selects the sheet."""

    x: complex
    y: complex


@dataclass(frozen=True)
class HyperellipticCurve:
    """Six distinct branch points.

    The homology basis is built from loops around consecutive branch points
    in the cyclic order seen from an interior base point (see
    :mod:`hodgetau.hyperelliptic.periods`).  ``chain`` optionally pins that
    order; by default the input order is used when it is realisable.
    """

    branch_points: tuple[complex, ...]
    min_separation: float = DEFAULT_MIN_SEPARATION
    chain: tuple[int, ...] | None = field(default=None)

    def __post_init__(self):
        pts = tuple(complex(e) for e in self.branch_points)
        if len(pts) != 6:
            raise CurveInputError(f"genus 2 needs 6 branch points, got {len(pts)}")
        if not all(np.isfinite([p.real for p in pts] + [p.imag for p in pts])):
            raise CurveInputError("branch points must be finite")
        scale = max(abs(p - q) for p in pts for q in pts)
        for i in range(6):
            for j in range(i + 1, 6):
                if abs(pts[i] - pts[j]) < self.min_separation * max(scale, 1e-300):
                    raise CurveInputError(f"branch points {i} and {j} are closer than the minimum separation")
        object.__setattr__(self, "branch_points", pts)
        if self.chain is not None and sorted(self.chain) != list(range(6)):
            raise CurveInputError("chain must be a permutation of 0..5")

    @property
    def genus(self) -> int:
        return 2

    @property
    def e(self) -> np.ndarray:
        return np.array(self.branch_points)

    def poly(self, x) -> complex:
        return np.prod(x - self.e, axis=-1) if np.ndim(x) == 0 else np.prod(np.subtract.outer(x, self.e), axis=-1)

    def point(self, x, sign: int = 1) -> CurvePoint:
        """Point over ``x`` on the sheet ``y = sign * principal sqrt``."""
        return CurvePoint(complex(x), sign * cmath.sqrt(complex(self.poly(complex(x)))))

    def scaled(self, lam, shift=0) -> "HyperellipticCurve":
        return HyperellipticCurve(tuple(lam * e + shift for e in self.branch_points), self.min_separation, self.chain)


@dataclass(frozen=True)
class DifferentialSpec:
    """``omega = (c0 + c1 x) dx / y``."""

    c0: complex
    c1: complex

    def __post_init__(self):
        object.__setattr__(self, "c0", complex(self.c0))
        object.__setattr__(self, "c1", complex(self.c1))
        if self.c0 == 0 and self.c1 == 0:
            raise CurveInputError("differential is identically zero")

    @property
    def coeffs(self) -> np.ndarray:
        return np.array([self.c0, self.c1])

    def scaled(self, eps) -> "DifferentialSpec":
        return DifferentialSpec(eps * self.c0, eps * self.c1)


@dataclass(frozen=True)
class ZeroFrame:
    """Simple zero ``x_k`` of ``omega`` with its natural coordinate data.

    Near the zero ``zeta_k = sqrt(f'(x_k)/2) (x - x_k) + ...`` where
    ``f = omega/dx``, so that ``omega = d(zeta_k^2)``.
    """

    point: CurvePoint
    dfdx: complex

    @property
    def dzeta_dx(self) -> complex:
        return cmath.sqrt(self.dfdx / 2)


def zeros_of_differential(c: HyperellipticCurve, spec: DifferentialSpec,
                          threshold: float = DEFAULT_DEGENERACY_THRESHOLD) -> tuple[ZeroFrame, ZeroFrame]:
    """The two simple zeros ``(x0, y0)``, ``(x0, -y0)`` with ``x0 = -c0/c1``.

    Raises :class:`DegenerateStratumError` when ``x0`` lies within
    ``threshold`` (relative to the curve size) of a branch point.
    """
    if spec.c1 == 0:
        raise DegenerateStratumError("c1 = 0: the zeros sit at infinity")
    x0 = -spec.c0 / spec.c1
    scale = max(abs(p - q) for p in c.branch_points for q in c.branch_points)
    dist = np.abs(c.e - x0)
    i = int(np.argmin(dist))
    if dist[i] < threshold * scale:
        raise DegenerateStratumError(f"zero of omega is within {dist[i]:.3g} of branch point {i}",
                                     branch_index=i, distance=float(dist[i]))
    p = c.point(x0)
    # f = (c0 + c1 x)/y vanishes at x0, so f'(x0) = c1 / y0
    return ZeroFrame(p, spec.c1 / p.y), ZeroFrame(CurvePoint(p.x, -p.y), spec.c1 / -p.y)


def _pair(v):
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(isinstance(t, (int, float)) for t in v):
        return complex(v[0], v[1])
    raise CurveInputError(f"expected [re, im], got {v!r}")


def load_curve_json(text: str) -> tuple[HyperellipticCurve, DifferentialSpec]:
    """Parse ``{branch_points: [[re, im], ...], c0: [re, im], c1: [re, im]}``."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CurveInputError(f"invalid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise CurveInputError("top level must be an object")
    for key in ("branch_points", "c0", "c1"):
        if key not in obj:
            raise CurveInputError(f"missing key {key!r}")
    if not isinstance(obj["branch_points"], list):
        raise CurveInputError("branch_points must be a list")
    pts = tuple(_pair(p) for p in obj["branch_points"])
    return HyperellipticCurve(pts), DifferentialSpec(_pair(obj["c0"]), _pair(obj["c1"]))


def dump_curve_json(c: HyperellipticCurve, spec: DifferentialSpec) -> str:
    def pr(z):
        return [z.real, z.imag]
    return json.dumps({"branch_points": [pr(e) for e in c.branch_points], "c0": pr(spec.c0), "c1": pr(spec.c1)})
