"""Bruhat intervals as graded posets.

A lower interval [e, w] is materialized once per system and cached: its
elements get dense integer ids sorted by (length, word), covers are stored
as adjacency lists, and the full order relation is kept as per-element
bitmasks so comparisons inside an interval are O(1).

Coatoms come from the subword property: every element covered by u is
obtained by deleting one letter of a reduced word of u, so single-letter
deletions of the canonical word enumerate them completely.

Marked intervals attach the parabolic-quotient membership flag
(no right descent inside H) to each element.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .coxeter import CoxeterSystem, Element, genset_indices

__all__ = [
    "Interval",
    "MarkedInterval",
    "build_lower_interval",
    "build_interval",
    "mark_interval",
    "is_dihedral_interval",
    "find_marked_isomorphism",
    "find_isomorphism",
    "find_order_isomorphism",
    "interval_to_json",
]


def _coatoms(sys: CoxeterSystem, u: Element) -> tuple[Element, ...]:
    """Elements covered by u (cached on the element)."""
    cached = u._coatoms
    if cached is None:
        word = u.word
        seen = set()
        for i in range(len(word)):
            c = sys.element_from_word(word[:i] + word[i + 1:])
            if c.length == u.length - 1:
                seen.add(c)
        cached = tuple(sorted(seen))
        u._coatoms = cached
    return cached


class Interval:
    """A Bruhat interval [bottom, top], graded by l(z) - l(bottom).

    Element ids are positions in `elements`, which is sorted by
    (length, word); id 0 is the bottom and the last id is the top.
    """

    def __init__(self, system: CoxeterSystem, bottom: Element, top: Element,
                 elements: Sequence[Element],
                 hasse_down: Sequence[Sequence[int]]):
        self.system = system
        self.bottom = bottom
        self.top = top
        self.elements = tuple(elements)
        self.index = {el: i for i, el in enumerate(self.elements)}
        base = bottom.length
        self.rank_of = tuple(el.length - base for el in self.elements)
        self.hasse_down = tuple(tuple(sorted(d)) for d in hasse_down)
        n = len(self.elements)
        up: list[list[int]] = [[] for _ in range(n)]
        for b in range(n):
            for a in self.hasse_down[b]:
                up[a].append(b)
        self.hasse_up = tuple(tuple(sorted(u)) for u in up)
        by_rank: list[list[int]] = [[] for _ in range(self.rank_of[-1] + 1)]
        for i, r in enumerate(self.rank_of):
            by_rank[r].append(i)
        self.by_rank = tuple(tuple(level) for level in by_rank)
        # order bitmasks: above[i] = ids j with element i <= element j,
        # below[i] the reverse; computed by closing the covers
        above = [0] * n
        for i in range(n - 1, -1, -1):
            m = 1 << i
            for j in self.hasse_up[i]:
                m |= above[j]
            above[i] = m
        below = [0] * n
        for i in range(n):
            m = 1 << i
            for j in self.hasse_down[i]:
                m |= below[j]
            below[i] = m
        self.above = tuple(above)
        self.below = tuple(below)
        self._special_matchings = None

    def __len__(self) -> int:
        return len(self.elements)

    def __repr__(self) -> str:
        return "Interval[%s, %s](%d elements)" % (
            self.bottom.label_str(), self.top.label_str(), len(self.elements))

    def id_of(self, el: Element) -> int:
        try:
            return self.index[el]
        except KeyError:
            raise ValueError("%r is not in %r" % (el, self))

    def leq(self, i: int, j: int) -> bool:
        """Bruhat comparison by interval ids."""
        return bool((self.above[i] >> j) & 1)

    def atoms_of(self, el: Element) -> tuple[Element, ...]:
        return tuple(self.elements[j] for j in self.hasse_up[self.id_of(el)])

    def coatoms_of(self, el: Element) -> tuple[Element, ...]:
        return tuple(self.elements[j] for j in self.hasse_down[self.id_of(el)])

    def member_ids(self, lo: int, hi: int) -> list[int]:
        """Ids of elements z with lo <= z <= hi."""
        mask = self.above[lo] & self.below[hi]
        out = []
        while mask:
            low = mask & -mask
            out.append(low.bit_length() - 1)
            mask ^= low
        return out

    def subinterval(self, lo: int, hi: int):
        """The interval [lo, hi] as its own Interval plus the id map
        (sub id -> parent id).  Bruhat intervals are convex, so covers are
        inherited by restriction."""
        ids = self.member_ids(lo, hi)
        pos = {p: i for i, p in enumerate(ids)}
        hasse_down = [
            [pos[a] for a in self.hasse_down[p] if a in pos] for p in ids
        ]
        sub = Interval(self.system, self.elements[lo], self.elements[hi],
                       [self.elements[p] for p in ids], hasse_down)
        return sub, tuple(ids)


@dataclass(frozen=True)
class MarkedInterval:
    """An interval with each element flagged by membership in the
    parabolic quotient W^H (no right descent inside H)."""

    interval: Interval
    H: int
    marks: tuple[bool, ...]

    def marked_ids(self) -> tuple[int, ...]:
        return tuple(i for i, m in enumerate(self.marks) if m)


def build_lower_interval(sys: CoxeterSystem, w: Element) -> Interval:
    """The interval [e, w], cached per system."""
    if w.system is not sys:
        raise ValueError("element belongs to a different system")
    cached = sys._lower_intervals.get(w)
    if cached is not None:
        return cached
    members = {w}
    frontier = [w]
    while frontier:
        nxt = []
        for u in frontier:
            for c in _coatoms(sys, u):
                if c not in members:
                    members.add(c)
                    nxt.append(c)
        frontier = nxt
    elements = sorted(members)
    index = {el: i for i, el in enumerate(elements)}
    hasse_down = [[index[c] for c in _coatoms(sys, el)] for el in elements]
    interval = Interval(sys, sys.identity, w, elements, hasse_down)
    return sys._lower_intervals.setdefault(w, interval)


def build_interval(sys: CoxeterSystem, u: Element, v: Element) -> Interval:
    """The general interval [u, v] (u must be <= v)."""
    if not sys.bruhat_leq(u, v):
        raise ValueError("%r is not below %r" % (u, v))
    lower = build_lower_interval(sys, v)
    sub, _ = lower.subinterval(lower.id_of(u), lower.id_of(v))
    return sub


def mark_interval(interval: Interval, H: int) -> MarkedInterval:
    marks = tuple((el.rdesc & H) == 0 for el in interval.elements)
    return MarkedInterval(interval, H, marks)


def is_dihedral_interval(interval: Interval) -> bool:
    """True iff the interval looks like a lower interval of a rank-2
    system: one element at the extreme ranks, exactly two at every rank in
    between, and all covers present between consecutive ranks."""
    top_rank = interval.rank_of[-1]
    for r, level in enumerate(interval.by_rank):
        want = 1 if r in (0, top_rank) else 2
        if len(level) != want:
            return False
    for r in range(top_rank):
        uppers = interval.by_rank[r + 1]
        for a in interval.by_rank[r]:
            if not all(b in interval.hasse_up[a] for b in uppers):
                return False
    return True


# ---------------------------------------------------------------------------
# isomorphism search


def _refine_colors(nodes, rank, mark, up, down):
    """Iterated neighborhood refinement; returns a stable coloring."""
    color = {v: (rank[v], mark[v], len(up[v]), len(down[v])) for v in nodes}
    ncls = len(set(color.values()))
    while True:
        sig = {
            v: (color[v],
                tuple(sorted(color[x] for x in up[v])),
                tuple(sorted(color[x] for x in down[v])))
            for v in nodes
        }
        palette: dict = {}
        new = {}
        for v in nodes:  # fixed iteration order keeps colors deterministic
            new[v] = palette.setdefault(sig[v], len(palette))
        if len(palette) == ncls:
            return new
        ncls = len(palette)
        color = new


def find_marked_isomorphism(a: MarkedInterval,
                            b: MarkedInterval) -> Optional[tuple[int, ...]]:
    """A rank- and mark-preserving poset isomorphism from a to b, as a
    tuple mapping a-ids to b-ids, or None.  Deterministic: the backtracking
    explores candidates in id order."""
    ia, ib = a.interval, b.interval
    n = len(ia.elements)
    if n != len(ib.elements):
        return None
    nodes = [(0, i) for i in range(n)] + [(1, i) for i in range(n)]
    rank = {}
    mark = {}
    up = {}
    down = {}
    for side, iv, mk in ((0, ia, a.marks), (1, ib, b.marks)):
        for i in range(len(iv.elements)):
            v = (side, i)
            rank[v] = iv.rank_of[i]
            mark[v] = mk[i]
            up[v] = [(side, j) for j in iv.hasse_up[i]]
            down[v] = [(side, j) for j in iv.hasse_down[i]]
    color = _refine_colors(nodes, rank, mark, up, down)
    hist_a = sorted(color[(0, i)] for i in range(n))
    hist_b = sorted(color[(1, i)] for i in range(n))
    if hist_a != hist_b:
        return None
    candidates: dict[int, list[int]] = {}
    for i in range(n):
        candidates.setdefault(color[(1, i)], []).append(i)
    mapping = [-1] * n
    used = [False] * n

    def extend(i: int) -> bool:
        if i == n:
            return True
        want_down = {mapping[d] for d in ia.hasse_down[i]}
        for y in candidates.get(color[(0, i)], ()):
            if used[y]:
                continue
            if set(ib.hasse_down[y]) != want_down:
                continue
            mapping[i] = y
            used[y] = True
            if extend(i + 1):
                return True
            mapping[i] = -1
            used[y] = False
        return False

    # ids are sorted by rank, so down-neighbors are always mapped first
    if extend(0):
        return tuple(mapping)
    return None


def find_isomorphism(a: Interval, b: Interval) -> Optional[tuple[int, ...]]:
    """Plain (unmarked) graded poset isomorphism."""
    return find_marked_isomorphism(mark_interval(a, 0), mark_interval(b, 0))


def find_order_isomorphism(rel_a: Sequence[int],
                           rel_b: Sequence[int]) -> Optional[tuple[int, ...]]:
    """Isomorphism between two arbitrary finite posets given as order
    relations (rel[i] is a bitmask of j with i <= j), or None.  Intended
    for the small sub-posets cut out of intervals by quotient membership."""
    n = len(rel_a)
    if n != len(rel_b):
        return None

    def profile(rel):
        ups = [bin(r).count("1") for r in rel]
        downs = [sum((rel[j] >> i) & 1 for j in range(n)) for i in range(n)]
        return ups, downs

    ups_a, downs_a = profile(rel_a)
    ups_b, downs_b = profile(rel_b)
    if sorted(zip(ups_a, downs_a)) != sorted(zip(ups_b, downs_b)):
        return None
    mapping = [-1] * n
    used = [False] * n

    def ok(i: int, y: int) -> bool:
        if (ups_a[i], downs_a[i]) != (ups_b[y], downs_b[y]):
            return False
        for j in range(i):
            if ((rel_a[i] >> j) & 1) != ((rel_b[y] >> mapping[j]) & 1):
                return False
            if ((rel_a[j] >> i) & 1) != ((rel_b[mapping[j]] >> y) & 1):
                return False
        return True

    def extend(i: int) -> bool:
        if i == n:
            return True
        for y in range(n):
            if not used[y] and ok(i, y):
                mapping[i] = y
                used[y] = True
                if extend(i + 1):
                    return True
                mapping[i] = -1
                used[y] = False
        return False

    if extend(0):
        return tuple(mapping)
    return None


def interval_to_json(interval: Interval,
                     marked: Optional[MarkedInterval] = None) -> dict:
    """JSON-friendly dict: canonical words, ranks, Hasse edges, marks."""
    edges = sorted(
        (a, b)
        for b in range(len(interval.elements))
        for a in interval.hasse_down[b]
    )
    out = {
        "group": interval.system.spec,
        "bottom": interval.bottom.label_str(),
        "top": interval.top.label_str(),
        "elements": [
            {"id": i, "word": el.label_str(), "rank": interval.rank_of[i]}
            for i, el in enumerate(interval.elements)
        ],
        "hasse": [list(e) for e in edges],
    }
    if marked is not None:
        names = interval.system.generator_names
        out["H"] = [names[i] for i in genset_indices(marked.H)]
        for rec, mk in zip(out["elements"], marked.marks):
            rec["marked"] = bool(mk)
    return out
