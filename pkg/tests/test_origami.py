import itertools
import warnings
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hodgetau.origami import (
    InconsistentStratumWarning,
    Origami,
    Permutation,
    Stratum,
    automorphism_order,
    canonical_form,
    commutator,
    conjugacy_class_size,
    conjugate,
    cusp_stable_graph,
    cusps,
    cylinder_multiset,
    enumerate_origamis,
    horizontal_cylinders,
    s_action,
    sl2_orbits,
    stable_graph_from_edges,
    stratum_of,
    t_action,
)

# Independent brute force over S_d x S_d (conjugacy by the full S_d action):
# (d, stratum) -> per orbit (size, sorted modulus sums, sorted cusp widths, Counter of |Aut|)
ORACLE = {
    (1, ()): [(1, ["1"], [1], {1: 1})],
    (2, ()): [(3, ["1/2", "1/2", "2"], [1, 2], {2: 3})],
    (3, ()): [(4, ["1/3", "1/3", "1/3", "3"], [1, 3], {3: 4})],
    (3, (2,)): [(3, ["1/3", "3/2", "3/2"], [1, 2], {1: 3})],
    (4, (2,)): [(9, ["1/4"] * 4 + ["4/3"] * 3 + ["5/2"] * 2, [2, 3, 4], {1: 9})],
    (4, (1, 1)): [(6, ["1/4", "1/4", "1", "1", "5/2", "5/2"], [2, 2, 2], {2: 6}),
                  (4, ["1", "4/3", "4/3", "4/3"], [1, 3], {1: 4})],
    (5, (1, 1)): [(24, ["1/5"] * 5 + ["5/6"] * 6 + ["5/4"] * 8 + ["7/3"] * 3 + ["7/2"] * 2,
                   [2, 3, 4, 4, 5, 6], {1: 24})],
}
ORBIT_SIZES_D6 = [4, 12, 24, 24, 24]


def _perm(d):
    return st.permutations(list(range(d))).map(lambda p: Permutation(tuple(p)))


@st.composite
def origamis(draw, dmax=6):
    d = draw(st.integers(1, dmax))
    while True:
        h = draw(_perm(d))
        v = draw(_perm(d))
        try:
            return Origami(h, v)
        except ValueError:
            continue


def _summary(c):
    sums = sorted(horizontal_cylinders(o).modulus_sum() for o in c.members)
    widths = sorted(k.width for k in cusps(c))
    auts = dict(Counter(automorphism_order(o) for o in c.members))
    return c.size, sorted(sums), widths, auts


@pytest.mark.parametrize("key", sorted(ORACLE))
def test_orbits_match_brute_force(key):
    d, orders = key
    curves = sl2_orbits(enumerate_origamis(d, Stratum(orders)))
    got = sorted(_summary(c) for c in curves)
    want = sorted((n, sorted(Fraction(x) for x in s), w, a) for n, s, w, a in ORACLE[key])
    assert got == want


def test_h11_degree6_orbit_sizes():
    curves = sl2_orbits(enumerate_origamis(6, Stratum((1, 1))))
    assert sorted(c.size for c in curves) == ORBIT_SIZES_D6
    assert sum(c.size for c in curves) == 88


def test_enumeration_matches_naive_class_count():
    # conjugacy classes found by orbit-stabiliser: sum |class| over reps = number of raw pairs
    d, s = 4, Stratum((1, 1))
    reps = enumerate_origamis(d, s)
    raw = 0
    for h in itertools.permutations(range(d)):
        for v in itertools.permutations(range(d)):
            try:
                o = Origami.from_images(h, v)
            except ValueError:
                continue
            raw += stratum_of(o) == s
    assert sum(conjugacy_class_size(o) for o in reps) == raw


def test_enumeration_independent_of_jobs():
    s = Stratum((1, 1))
    assert enumerate_origamis(5, s, jobs=1) == enumerate_origamis(5, s, jobs=3)


def test_inconsistent_degree_warns_and_returns_nothing():
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        assert enumerate_origamis(2, Stratum((1, 1))) == []
    assert any(issubclass(w.category, InconsistentStratumWarning) for w in rec)


def test_stratum_validation_and_parsing():
    assert Stratum.parse("") == Stratum(())
    assert Stratum.parse("1, 1") == Stratum((1, 1))
    assert Stratum.parse("2").genus == 2
    assert Stratum((1, 3)).zero_orders == (3, 1)
    with pytest.raises(ValueError):
        Stratum.parse("3")
    with pytest.raises(ValueError):
        Stratum((0, 2))
    assert Stratum.generic(3) == Stratum((1, 1, 1, 1))
    assert Stratum((1, 1)).min_degree() == 4


def test_permutation_basics():
    p = Permutation.from_cycles(4, (0, 1, 2))
    assert p.cycle_type() == (3, 1)
    assert (p * p.inverse()).is_identity()
    assert p(0) == 1
    with pytest.raises(ValueError):
        Permutation((0, 0, 1))
    with pytest.raises(ValueError):
        p * Permutation.identity(3)


def test_intransitive_pair_rejected():
    with pytest.raises(ValueError):
        Origami.from_images((1, 0, 2), (1, 0, 2))


def test_json_round_trip():
    o = enumerate_origamis(3, Stratum((2,)))[0]
    assert Origami.from_json(o.to_json()) == o
    with pytest.raises(ValueError):
        Origami.from_json({"d": 4, "h": list(o.h.images), "v": list(o.v.images)})


def test_stable_graph_bridges():
    assert stable_graph_from_edges(1, [(0, 0), (0, 0)]).irreducible
    g = stable_graph_from_edges(2, [(0, 0), (0, 1), (1, 1)])
    assert g.separating == (1,)
    assert not stable_graph_from_edges(2, [(0, 1), (0, 1)]).separating


@given(origamis())
def test_commutator_has_even_total_order(o):
    s = stratum_of(o)
    assert sum(s.zero_orders) % 2 == 0
    assert commutator(o.h, o.v).cycle_type()[0] >= 1
    assert o.d == 2 * s.genus - 2 + s.r + (o.d - sum(m + 1 for m in s.zero_orders))


@given(origamis(), st.data())
def test_canonical_form_is_conjugacy_invariant(o, data):
    sigma = data.draw(_perm(o.d))
    assert canonical_form(conjugate(o, sigma)) == canonical_form(o)


@given(origamis())
def test_generators_preserve_stratum_and_area(o):
    for nxt in (t_action(o), s_action(o)):
        assert stratum_of(nxt) == stratum_of(o)
        assert horizontal_cylinders(nxt).area() == o.d


@given(origamis())
def test_s_has_order_four_and_t_preserves_cylinders(o):
    c = canonical_form(o)
    assert s_action(s_action(s_action(s_action(c)))) == c
    assert horizontal_cylinders(t_action(c)) == horizontal_cylinders(c)


@given(origamis(dmax=5))
def test_automorphism_count_is_orbit_stabiliser(o):
    import math
    assert conjugacy_class_size(o) * automorphism_order(o) == math.factorial(o.d)


@given(origamis(dmax=6))
def test_cusps_partition_orbit(o):
    c = sl2_orbits([o])[0]
    cs = cusps(c)
    assert sum(k.width for k in cs) == c.size
    assert sum(cylinder_multiset(c).values()) == c.size
    assert cusp_stable_graph(o).node_count == len(horizontal_cylinders(o))
