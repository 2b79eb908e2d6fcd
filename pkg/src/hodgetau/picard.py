"""Exact divisor-class arithmetic on the projectivized Hodge bundle.

Classes are rational vectors over the generators ``psi``, ``lambda``,
``delta_deg`` and ``delta_0 .. delta_[g/2]``.  The free basis of the
rational Picard group omits ``delta_deg``; :func:`reduce_class` removes it
using the tau-divisor relation.  ``delta_1`` already carries the 1/2 stack
factor, so no formula below needs to mention it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .origami import Stratum


def symbols(g: int) -> tuple[str, ...]:
    return ("psi", "lambda", "delta_deg") + tuple(f"delta_{j}" for j in range(g // 2 + 1))


def free_basis(g: int) -> tuple[str, ...]:
    """Free generators of the rational Picard group (no ``delta_deg``)."""
    return tuple(s for s in symbols(g) if s != "delta_deg")


@dataclass(frozen=True)
class DivisorClass:
    genus: int
    coefficients: tuple[Fraction, ...]

    def __post_init__(self):
        if self.genus < 1:
            raise ValueError("genus must be at least 1")
        coeffs = tuple(Fraction(c) for c in self.coefficients)
        if len(coeffs) != len(symbols(self.genus)):
            raise ValueError(f"expected {len(symbols(self.genus))} coefficients, got {len(coeffs)}")
        object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def zero(cls, g: int) -> "DivisorClass":
        return cls(g, (Fraction(0),) * len(symbols(g)))

    @classmethod
    def from_map(cls, g: int, coeffs: Mapping[str, object]) -> "DivisorClass":
        names = symbols(g)
        unknown = set(coeffs) - set(names)
        if unknown:
            raise KeyError(f"unknown symbols for genus {g}: {sorted(unknown)}")
        return cls(g, tuple(Fraction(coeffs.get(s, 0)) for s in names))

    @classmethod
    def generator(cls, g: int, name: str) -> "DivisorClass":
        return cls.from_map(g, {name: 1})

    def __getitem__(self, name: str) -> Fraction:
        return self.coefficients[symbols(self.genus).index(name)]

    def as_dict(self) -> dict[str, Fraction]:
        return dict(zip(symbols(self.genus), self.coefficients))

    def is_zero(self) -> bool:
        return not any(self.coefficients)

    def __add__(self, other):
        return combine(self, Fraction(1), other)

    def __sub__(self, other):
        return combine(self, Fraction(-1), other)

    def __rmul__(self, r):
        return DivisorClass(self.genus, tuple(Fraction(r) * c for c in self.coefficients))

    def __neg__(self):
        return Fraction(-1) * self

    def to_json(self) -> str:
        return json.dumps({"genus": self.genus,
                           "coefficients": {k: f"{v.numerator}/{v.denominator}" for k, v in self.as_dict().items()}})

    @classmethod
    def from_json(cls, text: str) -> "DivisorClass":
        obj = json.loads(text)
        return cls.from_map(obj["genus"], {k: Fraction(v) for k, v in obj["coefficients"].items()})

    def render(self) -> str:
        """Linear-combination text such as ``24*lambda - 6*psi``."""
        parts = []
        coeffs = self.as_dict()
        order = ["lambda", "psi"] + [k for k in coeffs if k not in ("lambda", "psi")]
        for name in order:
            c = coeffs[name]
            if c == 0:
                continue
            mag = abs(c)
            term = name if mag == 1 else f"{mag}*{name}"
            if not parts:
                parts.append(term if c > 0 else f"-{term}")
            else:
                parts.append(("+ " if c > 0 else "- ") + term)
        return " ".join(parts) if parts else "0"


def combine(a: DivisorClass, r, b: DivisorClass) -> DivisorClass:
    """``a + r*b``."""
    if a.genus != b.genus:
        raise ValueError(f"genus mismatch: {a.genus} != {b.genus}")
    r = Fraction(r)
    return DivisorClass(a.genus, tuple(x + r * y for x, y in zip(a.coefficients, b.coefficients)))


def hodge_rhs(g: int) -> DivisorClass:
    """``(g-1)/4 psi + 1/24 delta_deg + 1/12 delta_0 + 1/8 sum_{j>=1} delta_j``.

    Defined for ``g >= 1``; at ``g = 1`` it is ``delta_deg/24 + delta_0/12``.
    """
    coeffs = {"psi": Fraction(g - 1, 4), "delta_deg": Fraction(1, 24), "delta_0": Fraction(1, 12)}
    for j in range(1, g // 2 + 1):
        coeffs[f"delta_{j}"] = Fraction(1, 8)
    return DivisorClass.from_map(g, coeffs)


def hodge_formula(g: int) -> tuple[DivisorClass, DivisorClass]:
    """Return ``(relation, rhs)`` where ``relation = lambda - rhs`` vanishes in Pic."""
    if g < 2:
        raise ValueError("the Hodge class formula needs genus >= 2")
    rhs = hodge_rhs(g)
    return DivisorClass.generator(g, "lambda") - rhs, rhs


def tau_divisor_relation(g: int) -> DivisorClass:
    """``24 lambda - (6g-6) psi - delta_deg - 2 delta_0 - 3 sum_{j>=1} delta_j``.

    The multiplicities 1, 2, 3 are those of ``D_deg``, ``D_0`` and ``D_j`` in
    the divisor of the tau function.
    """
    if g < 2:
        raise ValueError("the tau divisor relation needs genus >= 2")
    coeffs = {"lambda": 24, "psi": -(6 * g - 6), "delta_deg": -1, "delta_0": -2}
    for j in range(1, g // 2 + 1):
        coeffs[f"delta_{j}"] = -3
    rel = DivisorClass.from_map(g, coeffs)
    assert combine(rel, -24, hodge_formula(g)[0]).is_zero()
    return rel


def tau_multiplicities(g: int) -> dict[str, Fraction]:
    """Multiplicity of each boundary divisor in the divisor of ``tau_0``.

    ``D_1`` enters with 3/2 because ``delta_1 = [D_1]/2``.
    """
    rel = tau_divisor_relation(g)
    out = {}
    for name in symbols(g)[2:]:
        m = -rel[name]
        out[name] = m / 2 if name == "delta_1" else m
    return out


def reduce_class(cls: DivisorClass) -> dict[str, Fraction]:
    """Coordinates in the free basis, eliminating ``delta_deg``."""
    g = cls.genus
    c = cls["delta_deg"]
    if c and g < 2:
        raise ValueError("delta_deg cannot be eliminated below genus 2")
    if c:
        cls = combine(cls, c, tau_divisor_relation(g))
    assert cls["delta_deg"] == 0
    return {k: v for k, v in cls.as_dict().items() if k != "delta_deg"}


def psi_coefficient(s: Stratum) -> Fraction:
    """Psi coefficient ``2 (2g - 2 + r - sum 1/(m_k+1))`` of the stratum relation."""
    total = 2 * s.genus - 2 + s.r - sum((Fraction(1, m + 1) for m in s.zero_orders), Fraction(0))
    return 2 * total


def homogeneity_degree(s: Stratum) -> Fraction:
    """Degree of the tau function under ``omega -> eps*omega``; same number as above."""
    return psi_coefficient(s)


def lambda_psi_relation(s: Stratum) -> DivisorClass:
    """``24 lambda - 2(2g-2+r-sum 1/(m_k+1)) psi``, zero on the open stratum."""
    g = max(s.genus, 1)
    return DivisorClass.from_map(g, {"lambda": 24, "psi": -psi_coefficient(s)})


def kappa_from_psi_relation(s: Stratum) -> Fraction:
    return psi_coefficient(s) / 24


class PairingRefused(ValueError):
    pass


def pair_with_curve(cls: DivisorClass, rep, vanishing=None) -> Fraction:
    """Intersection number of ``cls`` with the Teichmueller curve behind ``rep``.

    ``psi`` pairs to ``rep.psi_number`` and ``delta_0`` to ``K *
    rep.delta0_number``; ``delta_deg`` and ``delta_j`` (j >= 1) pair to zero
    on generic-stratum curves, which is only trusted when ``vanishing`` (a
    :class:`~hodgetau.teichcurve.VanishingReport`) passed.  ``lambda`` pairs
    to ``rep.lyap_sum * rep.psi_number``, the cylinder-side value, so pairing
    the Hodge relation tests the boundary side against it.
    """
    if not rep.stratum.is_generic:
        raise PairingRefused(f"pairing is defined for generic strata only, got {rep.stratum}")
    if cls.genus != rep.genus:
        raise ValueError(f"genus mismatch: class {cls.genus}, curve {rep.genus}")
    if vanishing is not None and not vanishing.passed:
        raise PairingRefused(f"boundary vanishing check failed: {vanishing}")
    return (cls["psi"] * rep.psi_number
            + cls["delta_0"] * rep.K * rep.delta0_number
            + cls["lambda"] * rep.lyap_sum * rep.psi_number)


def render_relation(cls: DivisorClass) -> str:
    return f"{cls.render()} = 0"
