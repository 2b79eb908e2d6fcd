"""Square-tiled surfaces as pairs of permutations.

An origami of degree ``d`` is a pair ``(h, v)`` of permutations of
``{0, ..., d-1}``: ``h`` sends a square to its right neighbour and ``v`` to
the square above.  Composition is right-to-left, ``(p*q)(x) = p(q(x))``,
and the cone-point monodromy is the commutator ``h v h^-1 v^-1``.

The SL(2,Z) action is realised on canonical forms through the two
generators

    T: (h, v) -> (h, v h^-1)        S: (h, v) -> (v, h^-1)
"""

from __future__ import annotations

import itertools
import json
import warnings
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence


class InconsistentStratumWarning(UserWarning):
    """Degree and stratum violate the degree formula; nothing to enumerate."""


@dataclass(frozen=True, order=True)
class Permutation:
    """Bijection of ``{0, ..., d-1}`` stored as its image array."""

    images: tuple[int, ...]

    def __post_init__(self):
        images = tuple(int(i) for i in self.images)
        if sorted(images) != list(range(len(images))) or not images:
            raise ValueError(f"not a permutation of 0..{len(images) - 1}: {images}")
        object.__setattr__(self, "images", images)

    @classmethod
    def identity(cls, d: int) -> "Permutation":
        return cls(tuple(range(d)))

    @classmethod
    def from_cycles(cls, d: int, *cycles: Sequence[int]) -> "Permutation":
        """Build from disjoint cycles, e.g. ``from_cycles(3, (0, 1))``."""
        images = list(range(d))
        for cyc in cycles:
            for a, b in zip(cyc, tuple(cyc[1:]) + (cyc[0],)):
                images[a] = b
        return cls(tuple(images))

    @property
    def d(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x]

    def __mul__(self, other: "Permutation") -> "Permutation":
        if self.d != other.d:
            raise ValueError(f"degree mismatch: {self.d} != {other.d}")
        return Permutation(_compose(self.images, other.images))

    def inverse(self) -> "Permutation":
        return Permutation(_inverse(self.images))

    def cycles(self) -> list[tuple[int, ...]]:
        return _cycles(self.images)

    def cycle_type(self) -> tuple[int, ...]:
        return tuple(sorted((len(c) for c in self.cycles()), reverse=True))

    def is_identity(self) -> bool:
        return self.images == tuple(range(self.d))


# Tuple-level kernels; the enumeration loops call these directly.

def _compose(p, q):
    return tuple(p[x] for x in q)


def _inverse(p):
    r = [0] * len(p)
    for i, x in enumerate(p):
        r[x] = i
    return tuple(r)


def _cycles(p):
    seen = [False] * len(p)
    out = []
    for i in range(len(p)):
        if seen[i]:
            continue
        cyc = []
        j = i
        while not seen[j]:
            seen[j] = True
            cyc.append(j)
            j = p[j]
        out.append(tuple(cyc))
    return out


def _commutator(h, v):
    # h v h^-1 v^-1
    return _compose(_compose(_compose(h, v), _inverse(h)), _inverse(v))


def _is_transitive(h, v):
    d = len(h)
    seen = [False] * d
    seen[0] = True
    stack = [0]
    count = 1
    while stack:
        x = stack.pop()
        for y in (h[x], v[x]):
            if not seen[y]:
                seen[y] = True
                count += 1
                stack.append(y)
    return count == d


def commutator(h: Permutation, v: Permutation) -> Permutation:
    """Return ``h v h^-1 v^-1``; raises ``ValueError`` on degree mismatch."""
    if h.d != v.d:
        raise ValueError(f"degree mismatch: {h.d} != {v.d}")
    return Permutation(_commutator(h.images, v.images))


@dataclass(frozen=True)
class Stratum:
    """Stratum of abelian differentials given by zero orders ``m_1 >= ... >= m_r``.

    The empty stratum is the genus-one stratum (no zeros).
    """

    zero_orders: tuple[int, ...] = ()

    def __post_init__(self):
        orders = tuple(sorted((int(m) for m in self.zero_orders), reverse=True))
        if any(m < 1 for m in orders):
            raise ValueError(f"zero orders must be positive: {orders}")
        if sum(orders) % 2:
            raise ValueError(f"sum of zero orders must be even: {orders}")
        object.__setattr__(self, "zero_orders", orders)

    @classmethod
    def parse(cls, text: str) -> "Stratum":
        """Parse the comma-separated CLI form, e.g. ``"1,1"`` or ``""``."""
        text = text.strip()
        if not text:
            return cls(())
        return cls(tuple(int(tok) for tok in text.split(",") if tok.strip()))

    @classmethod
    def generic(cls, genus: int) -> "Stratum":
        return cls((1,) * (2 * genus - 2))

    @property
    def r(self) -> int:
        return len(self.zero_orders)

    @property
    def genus(self) -> int:
        return 1 + sum(self.zero_orders) // 2

    @property
    def degeneracy(self) -> tuple[int, ...]:
        """The degeneracy type ``(m_1 - 1, ..., m_r - 1)``."""
        return tuple(m - 1 for m in self.zero_orders)

    @property
    def is_generic(self) -> bool:
        return all(m == 1 for m in self.zero_orders)

    def min_degree(self) -> int:
        return sum(self.zero_orders) + self.r

    def admits_degree(self, d: int) -> bool:
        """Degree formula ``d = sum(m_k) + r + m`` with ``m >= 0`` unramified corners."""
        return d >= max(1, self.min_degree())

    def __str__(self):
        return "H(" + ",".join(map(str, self.zero_orders)) + ")" if self.zero_orders else "H()"

    def to_json(self):
        return list(self.zero_orders)


@dataclass(frozen=True, order=True)
class Origami:
    h: Permutation
    v: Permutation

    def __post_init__(self):
        if self.h.d != self.v.d:
            raise ValueError(f"degree mismatch: {self.h.d} != {self.v.d}")
        if not _is_transitive(self.h.images, self.v.images):
            raise ValueError("h and v do not generate a transitive group")

    @classmethod
    def from_images(cls, h: Sequence[int], v: Sequence[int]) -> "Origami":
        return cls(Permutation(tuple(h)), Permutation(tuple(v)))

    @property
    def d(self) -> int:
        return self.h.d

    @property
    def key(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        return self.h.images, self.v.images

    def to_json(self) -> dict:
        return {"d": self.d, "h": list(self.h.images), "v": list(self.v.images)}

    @classmethod
    def from_json(cls, obj) -> "Origami":
        if isinstance(obj, str):
            obj = json.loads(obj)
        o = cls.from_images(obj["h"], obj["v"])
        if o.d != obj.get("d", o.d):
            raise ValueError("declared degree does not match image arrays")
        return o

    def __str__(self):
        return f"Origami(h={list(self.h.images)}, v={list(self.v.images)})"


def stratum_of(o: Origami) -> Stratum:
    """Zero orders read off the nontrivial cycles of the commutator."""
    c = _commutator(o.h.images, o.v.images)
    lengths = [len(cyc) for cyc in _cycles(c) if len(cyc) > 1]
    total = sum(lengths) - len(lengths)
    if total % 2:
        raise RuntimeError(f"odd total zero order for {o}; commutator is not even")
    s = Stratum(tuple(n - 1 for n in lengths))
    unramified = o.d - sum(lengths)
    # Riemann-Hurwitz: d = 2g - 2 + m + r
    assert o.d == 2 * s.genus - 2 + unramified + s.r
    return s


def _centralizer_order(h, v):
    d = len(h)
    count = 0
    for target in range(d):
        sigma = [-1] * d
        sigma[0] = target
        stack = [0]
        ok = True
        while stack and ok:
            x = stack.pop()
            sx = sigma[x]
            for gen in (h, v):
                y, sy = gen[x], gen[sx]
                if sigma[y] < 0:
                    sigma[y] = sy
                    stack.append(y)
                elif sigma[y] != sy:
                    ok = False
                    break
        if ok and len(set(sigma)) == d:
            count += 1
    return count


def automorphism_order(o: Origami) -> int:
    """Order of the common centralizer of ``h`` and ``v`` in the symmetric group.

    Transitivity means an automorphism is fixed by the image of square 0, so
    this tries each of the ``d`` candidates.
    """
    return _centralizer_order(o.h.images, o.v.images)


def _relabel(h, v, seed):
    d = len(h)
    label = [-1] * d
    label[seed] = 0
    order = [seed]
    i = 0
    while i < len(order):
        x = order[i]
        i += 1
        for y in (h[x], v[x]):
            if label[y] < 0:
                label[y] = len(order)
                order.append(y)
    return (tuple(label[h[x]] for x in order), tuple(label[v[x]] for x in order))


def _canonical_key(h, v):
    return min(_relabel(h, v, s) for s in range(len(h)))


def canonical_form(o: Origami) -> Origami:
    """Distinguished representative of the simultaneous conjugacy class.

    Each seed square is sent to 0 and the rest are numbered in
    breadth-first order along ``h`` then ``v``; the lexicographically least
    ``(h, v)`` encoding over all seeds is returned.
    """
    h, v = _canonical_key(o.h.images, o.v.images)
    return Origami(Permutation(h), Permutation(v))


def _partitions(n, largest=None):
    if largest is None:
        largest = n
    if n == 0:
        yield ()
        return
    for k in range(min(n, largest), 0, -1):
        for rest in _partitions(n - k, k):
            yield (k,) + rest


def _perm_with_cycle_type(parts):
    images = []
    start = 0
    for k in parts:
        images.extend(start + (j + 1) % k for j in range(k))
        start += k
    return tuple(images)


def _search_v(h, d, unramified, target_type):
    """Backtrack over ``v`` for fixed ``h``.

    A square ``z`` is an unramified corner iff ``h v z == v h z``; the
    number of such squares must equal ``unramified``, which prunes as soon
    as ``v`` is known on both ``z`` and ``h z``.
    """
    v = [-1] * d
    used = [False] * d
    hinv = _inverse(h)
    found = []
    good = bad = 0
    max_bad = d - unramified

    def status(z):
        a, b = v[z], v[h[z]]
        if a < 0 or b < 0:
            return 0
        return 1 if h[a] == b else -1

    def rec(x):
        nonlocal good, bad
        if x == d:
            vt = tuple(v)
            if _is_transitive(h, vt):
                ctype = sorted((len(c) for c in _cycles(_commutator(h, vt)) if len(c) > 1), reverse=True)
                if tuple(ctype) == target_type:
                    found.append(vt)
            return
        for y in range(d):
            if used[y]:
                continue
            v[x] = y
            used[y] = True
            # squares whose status becomes known by assigning v[x]
            touched = {x, hinv[x]}
            delta = [status(z) for z in touched]
            g = sum(1 for s in delta if s > 0)
            b = sum(1 for s in delta if s < 0)
            good += g
            bad += b
            if good <= unramified and bad <= max_bad:
                rec(x + 1)
            good -= g
            bad -= b
            used[y] = False
            v[x] = -1

    rec(0)
    return found


def _enumerate_for_h(args):
    parts, d, unramified, target_type = args
    h = _perm_with_cycle_type(parts)
    keys = set()
    for v in _search_v(h, d, unramified, target_type):
        keys.add(_canonical_key(h, v))
    return keys


def enumerate_origamis(d: int, s: Stratum, jobs: int = 1) -> list[Origami]:
    """All origamis of degree ``d`` in stratum ``s`` up to conjugacy.

    ``h`` runs over one representative per cycle type and ``v`` is found by
    backtracking.  Results are canonical forms in sorted order, so the
    output does not depend on ``jobs``.  An inconsistent ``(d, s)`` gives an
    empty list and an :class:`InconsistentStratumWarning`.
    """
    if d < 1:
        raise ValueError("degree must be positive")
    if not s.admits_degree(d):
        warnings.warn(f"degree {d} is below the minimum {s.min_degree()} for {s}",
                      InconsistentStratumWarning, stacklevel=2)
        return []
    unramified = d - s.min_degree()
    target_type = tuple(m + 1 for m in s.zero_orders)
    tasks = [(parts, d, unramified, target_type) for parts in _partitions(d)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_enumerate_for_h, tasks))
    else:
        results = [_enumerate_for_h(t) for t in tasks]
    keys = sorted(set().union(*results))
    return [Origami(Permutation(h), Permutation(v)) for h, v in keys]


def t_action(o: Origami) -> Origami:
    """Horizontal shear ``(h, v) -> (h, v h^-1)``, canonicalised."""
    h, v = o.key
    return Origami(*map(Permutation, _canonical_key(h, _compose(v, _inverse(h)))))


def s_action(o: Origami) -> Origami:
    """Quarter turn ``(h, v) -> (v, h^-1)``, canonicalised."""
    h, v = o.key
    return Origami(*map(Permutation, _canonical_key(v, _inverse(h))))


@dataclass(frozen=True)
class TeichCurve:
    """One SL(2,Z)-orbit of canonical origamis, i.e. an arithmetic Teichmueller curve."""

    stratum: Stratum
    degree: int
    members: tuple[Origami, ...]
    orbit_id: int = 0

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def genus(self) -> int:
        return self.stratum.genus


def sl2_orbits(origamis: Iterable[Origami]) -> list[TeichCurve]:
    """Partition canonical origamis into orbits under the T and S generators.

    Orbits are closed under both generators even if that pulls in origamis
    missing from the input.  They are ordered by their least member.
    """
    pool = sorted({canonical_form(o) for o in origamis})
    if not pool:
        return []
    d = pool[0].d
    strata = {stratum_of(o) for o in pool}
    if len(strata) != 1 or any(o.d != d for o in pool):
        raise ValueError("sl2_orbits expects origamis of one degree and one stratum")
    stratum = strata.pop()
    remaining = set(pool)
    orbits = []
    while remaining:
        start = min(remaining)
        orbit = {start}
        stack = [start]
        while stack:
            o = stack.pop()
            for nxt in (t_action(o), s_action(o)):
                if nxt not in orbit:
                    orbit.add(nxt)
                    stack.append(nxt)
        remaining -= orbit
        orbits.append(sorted(orbit))
    orbits.sort(key=lambda orb: orb[0])
    return [TeichCurve(stratum, d, tuple(orb), i) for i, orb in enumerate(orbits)]


@dataclass(frozen=True)
class CylinderDiagram:
    """Horizontal cylinders as ``(width, height)`` pairs, sorted."""

    cylinders: tuple[tuple[int, int], ...]

    def area(self) -> int:
        return sum(w * ht for w, ht in self.cylinders)

    def modulus_sum(self) -> Fraction:
        """Sum of ``height / width`` over the cylinders."""
        return sum((Fraction(ht, w) for w, ht in self.cylinders), Fraction(0))

    def __len__(self):
        return len(self.cylinders)


def _cylinder_rows(o: Origami):
    """Rows (cycles of ``h``) and, for each cylinder, its rows bottom to top."""
    h, v = o.key
    rows = _cycles(h)
    row_of = {x: k for k, row in enumerate(rows) for x in row}
    # glue[k] = row above k when the top of k is glued cone-point free
    glue = {}
    for k, row in enumerate(rows):
        if all(v[h[x]] == h[v[x]] for x in row):
            glue[k] = row_of[v[row[0]]]
    below = {b: a for a, b in glue.items()}
    seen = set()
    cylinders = []
    for k in range(len(rows)):
        if k in seen:
            continue
        # walk down to the bottom row; a closed loop means the surface is one torus cylinder
        bottom = k
        while bottom in below and below[bottom] != k:
            bottom = below[bottom]
        stack = [bottom]
        cur = bottom
        while cur in glue and glue[cur] != bottom:
            cur = glue[cur]
            stack.append(cur)
        seen.update(stack)
        cylinders.append(tuple(stack))
    return rows, cylinders


def horizontal_cylinders(o: Origami) -> CylinderDiagram:
    rows, cylinders = _cylinder_rows(o)
    diagram = tuple(sorted((len(rows[c[0]]), len(c)) for c in cylinders))
    out = CylinderDiagram(diagram)
    assert out.area() == o.d
    return out


@dataclass(frozen=True)
class Cusp:
    width: int
    representative: Origami
    cylinders: CylinderDiagram
    members: tuple[Origami, ...] = field(default=(), compare=False)


def cusps(c: TeichCurve) -> list[Cusp]:
    """Orbits of the T generator inside a Teichmueller curve."""
    remaining = set(c.members)
    out = []
    while remaining:
        start = min(remaining)
        cycle = [start]
        nxt = t_action(start)
        while nxt != start:
            cycle.append(nxt)
            nxt = t_action(nxt)
        remaining -= set(cycle)
        out.append(Cusp(len(cycle), start, horizontal_cylinders(start), tuple(cycle)))
    return out


@dataclass(frozen=True)
class StableGraph:
    """Dual graph of the stable limit at the horizontal cusp.

    Vertices are the pieces left after cutting every horizontal cylinder
    along its core curve; each cylinder becomes a node joining the piece
    below its core to the piece above it.
    """

    components: int
    nodes: tuple[tuple[int, int], ...]
    separating: tuple[int, ...]

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def irreducible(self) -> bool:
        return not self.separating


def _bridges(n_vertices, edges):
    out = []
    for i, (a, b) in enumerate(edges):
        if a == b:
            continue
        parent = list(range(n_vertices))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for j, (p, q) in enumerate(edges):
            if j != i:
                parent[find(p)] = find(q)
        if find(a) != find(b):
            out.append(i)
    return tuple(out)


def stable_graph_from_edges(n_vertices: int, edges: Sequence[tuple[int, int]]) -> StableGraph:
    edges = tuple((int(a), int(b)) for a, b in edges)
    return StableGraph(n_vertices, edges, _bridges(n_vertices, edges))


def cusp_stable_graph(o: Origami) -> StableGraph:
    h, v = o.key
    rows, cylinders = _cylinder_rows(o)
    n = len(cylinders)
    cyl_of_row = {r: i for i, cyl in enumerate(cylinders) for r in cyl}
    row_of = {x: k for k, row in enumerate(rows) for x in row}
    # half-cylinders: 2i is below the core of cylinder i, 2i+1 above it
    parent = list(range(2 * n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, cyl in enumerate(cylinders):
        for x in rows[cyl[-1]]:
            j = cyl_of_row[row_of[v[x]]]
            parent[find(2 * i + 1)] = find(2 * j)
    roots = sorted({find(x) for x in range(2 * n)})
    index = {r: k for k, r in enumerate(roots)}
    edges = [(index[find(2 * i)], index[find(2 * i + 1)]) for i in range(n)]
    return stable_graph_from_edges(len(roots), edges)


def conjugate(o: Origami, sigma: Permutation) -> Origami:
    """``(sigma h sigma^-1, sigma v sigma^-1)``."""
    si = sigma.inverse()
    return Origami(sigma * o.h * si, sigma * o.v * si)


def conjugacy_class_size(o: Origami) -> int:
    """Number of distinct pairs simultaneously conjugate to ``o`` (brute force)."""
    d = o.d
    seen = set()
    for images in itertools.permutations(range(d)):
        seen.add(conjugate(o, Permutation(images)).key)
    return len(seen)


def cylinder_multiset(c: TeichCurve) -> Counter:
    return Counter(horizontal_cylinders(o) for o in c.members)
