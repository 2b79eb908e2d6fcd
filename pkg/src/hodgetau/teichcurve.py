"""Intersection numbers and Lyapunov sums on arithmetic Teichmueller curves.

Everything here is exact (:class:`fractions.Fraction`).  Two estimators of
the Lyapunov sum are produced for every orbit:

* ``kappa + siegel_veech``, the cylinder-average route;
* the boundary route ``(g-1)/4 + K/12 * (T.delta_0) / (T.psi)``, valid for
  the generic stratum, where ``K`` is a calibration constant fixed by
  requiring the sum to be 1 on torus covers.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .origami import (
    Stratum,
    TeichCurve,
    automorphism_order,
    cusp_stable_graph,
    cusps,
    enumerate_origamis,
    horizontal_cylinders,
    sl2_orbits,
    stratum_of,
)

log = logging.getLogger(__name__)

#: Calibration constant of the boundary estimator.
DEFAULT_K = Fraction(12)


class UnsupportedStratumError(ValueError):
    pass


def kappa(s: Stratum) -> Fraction:
    """``(g-1)/6 + r/12 - (1/12) * sum 1/(m_i + 1)``."""
    g = s.genus
    return (Fraction(g - 1, 6) + Fraction(s.r, 12)
            - Fraction(1, 12) * sum((Fraction(1, m + 1) for m in s.zero_orders), Fraction(0)))


def psi_number(c: TeichCurve, weighted: bool = True) -> Fraction:
    """Degree of the curve over the modular curve: ``sum 1/|Aut|`` over the orbit.

    With ``weighted=False`` this is the plain orbit size.
    """
    if not weighted:
        return Fraction(c.size)
    return sum((Fraction(1, automorphism_order(o)) for o in c.members), Fraction(0))


def delta0_number(c: TeichCurve, weighted: bool = True, cuspwise: bool = True) -> Fraction:
    """Raw boundary number ``sum over cusps W * sum_cyl ht/w``.

    ``cuspwise=False`` sums the cylinder moduli over every orbit member
    instead; both agree because T preserves horizontal cylinders.
    """
    total = Fraction(0)
    if cuspwise:
        for cusp in cusps(c):
            w = Fraction(1, automorphism_order(cusp.representative)) if weighted else Fraction(1)
            total += w * cusp.width * cusp.cylinders.modulus_sum()
    else:
        for o in c.members:
            w = Fraction(1, automorphism_order(o)) if weighted else Fraction(1)
            total += w * horizontal_cylinders(o).modulus_sum()
    return total


def siegel_veech(c: TeichCurve) -> Fraction:
    """Cylinder average ``(1/|orbit|) sum_orbit sum_cyl ht/w``."""
    return delta0_number(c, weighted=False, cuspwise=False) / c.size


def lyapunov_sum(c: TeichCurve) -> Fraction:
    return kappa(c.stratum) + siegel_veech(c)


def lyapunov_via_boundary(c: TeichCurve, K: Fraction = DEFAULT_K, weighted: bool = True) -> Fraction:
    if not c.stratum.is_generic:
        raise UnsupportedStratumError(f"boundary estimator needs the generic stratum, got {c.stratum}")
    g = c.genus
    ratio = delta0_number(c, weighted=weighted) / psi_number(c, weighted=weighted)
    return Fraction(g - 1, 4) + Fraction(1, 12) * K * ratio


@dataclass
class VanishingReport:
    passed: bool
    degenerate_members: list = field(default_factory=list)
    separating_nodes: list = field(default_factory=list)


def boundary_vanishing_check(c: TeichCurve, graphs=None) -> VanishingReport:
    """Check that the curve misses ``D_deg`` and every separating-node divisor.

    ``graphs`` overrides the computed stable graphs (one per member); it
    exists so a reducible graph can be injected as a negative control.
    """
    if not c.stratum.is_generic:
        raise UnsupportedStratumError(f"vanishing check needs the generic stratum, got {c.stratum}")
    rep = VanishingReport(True)
    for i, o in enumerate(c.members):
        s = stratum_of(o)
        if not s.is_generic:
            rep.degenerate_members.append(o.to_json())
        graph = graphs[i] if graphs is not None else cusp_stable_graph(o)
        if not graph.irreducible:
            rep.separating_nodes.append({"origami": o.to_json(), "nodes": [graph.nodes[k] for k in graph.separating]})
    rep.passed = not rep.degenerate_members and not rep.separating_nodes
    return rep


@dataclass(frozen=True)
class LyapunovReport:
    stratum: Stratum
    degree: int
    orbit_id: int
    orbit_size: int
    psi_number: Fraction
    delta0_number: Fraction
    kappa: Fraction
    siegel_veech: Fraction
    lyap_sum: Fraction
    boundary_lyap_sum: Fraction | None
    K: Fraction = DEFAULT_K
    weighting: str = "1/|Aut|"

    @property
    def genus(self) -> int:
        return self.stratum.genus

    def row(self) -> dict:
        """Flat row with rationals rendered as ``p/q`` strings."""
        def q(x):
            return "" if x is None else f"{x.numerator}/{x.denominator}"
        return {
            "stratum": ",".join(map(str, self.stratum.zero_orders)),
            "d": self.degree,
            "orbit_id": self.orbit_id,
            "orbit_size": self.orbit_size,
            "psi_number": q(self.psi_number),
            "delta0_number": q(self.delta0_number),
            "kappa": q(self.kappa),
            "siegel_veech": q(self.siegel_veech),
            "lyap_sum": q(self.lyap_sum),
            "boundary_lyap_sum": q(self.boundary_lyap_sum),
            "K": q(self.K),
        }


def report(c: TeichCurve, K: Fraction = DEFAULT_K) -> LyapunovReport:
    boundary = lyapunov_via_boundary(c, K) if c.stratum.is_generic else None
    return LyapunovReport(
        stratum=c.stratum,
        degree=c.degree,
        orbit_id=c.orbit_id,
        orbit_size=c.size,
        psi_number=psi_number(c),
        delta0_number=delta0_number(c),
        kappa=kappa(c.stratum),
        siegel_veech=siegel_veech(c),
        lyap_sum=lyapunov_sum(c),
        boundary_lyap_sum=boundary,
        K=Fraction(K),
    )


@dataclass(frozen=True)
class DegreeAggregate:
    """Orbits at one degree averaged with ``psi_number`` weights."""

    stratum: Stratum
    degree: int
    orbits: int
    psi_total: Fraction
    lyap_sum: Fraction
    boundary_lyap_sum: Fraction | None


def _curves_for_degree(args):
    s, d = args
    return sl2_orbits(enumerate_origamis(d, s))


def convergence_table(s: Stratum, d_range, K: Fraction = DEFAULT_K, jobs: int = 1):
    """Per-orbit reports and per-degree aggregates over ``d_range``.

    Returns ``(rows, aggregates)``; degrees with no origamis contribute
    nothing.
    """
    degrees = [d for d in d_range if s.admits_degree(d)]
    tasks = [(s, d) for d in degrees]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            per_degree = list(pool.map(_curves_for_degree, tasks))
    else:
        per_degree = [_curves_for_degree(t) for t in tasks]
    log.info("convergence table for %s, K=%s, degrees %s", s, K, degrees)
    rows = []
    aggregates = []
    for d, curves in zip(degrees, per_degree):
        reps = [report(c, K) for c in curves]
        rows.extend(reps)
        if not reps:
            continue
        psi_total = sum((r.psi_number for r in reps), Fraction(0))
        lyap = sum((r.psi_number * r.lyap_sum for r in reps), Fraction(0)) / psi_total
        boundary = None
        if s.is_generic:
            boundary = sum((r.psi_number * r.boundary_lyap_sum for r in reps), Fraction(0)) / psi_total
        aggregates.append(DegreeAggregate(s, d, len(reps), psi_total, lyap, boundary))
    return rows, aggregates
