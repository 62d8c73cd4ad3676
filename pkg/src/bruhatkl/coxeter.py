"""Exact arithmetic for Coxeter systems of doubly laced and dihedral type.

Systems of rank >= 3 must have all bond orders m(s,s') in {2, 3, 4}
("doubly laced").  They act faithfully on an integer root lattice through
a generalized Cartan matrix, so lengths, descents and reduced words come
from root signs with no floating point.  Rank <= 2 systems use direct
alternating-word arithmetic instead, which handles any finite bond order
m >= 2.

Elements are interned per system in ShortLex-least reduced-word form:
element equality is object identity, and products by generators are
cached, so group arithmetic amortizes to dictionary lookups.  Infinite
systems (e.g. a rank-3 system with bond orders 4,3,3) are supported for
all bounded-length operations; only whole-group enumeration requires the
group to be finite.

Generator subsets (descent sets, parabolic subsets) are plain integer
bitmasks over generator indices; see :func:`genset` and friends.
"""

from __future__ import annotations

import json
import re
from typing import Iterable, Iterator, Optional, Sequence

__all__ = [
    "CoxeterSystem",
    "Element",
    "QuotientMembershipError",
    "genset",
    "genset_indices",
    "parse_genset",
    "format_genset",
]


class QuotientMembershipError(ValueError):
    """Raised when an element is required to be a minimal coset
    representative (no right descent inside H) but is not."""

    def __init__(self, element: "Element", H: int, offending: int):
        self.element = element
        self.H = H
        self.offending = offending
        sys = element.system
        super().__init__(
            "element %s is not minimal in its coset: right descent %s lies in "
            "H=%s" % (element, sys.generator_names[offending],
                      format_genset(sys, H))
        )


# ---------------------------------------------------------------------------
# generator-subset bitmask helpers


def genset(indices: Iterable[int]) -> int:
    """Pack generator indices into a bitmask."""
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


def genset_indices(mask: int) -> tuple[int, ...]:
    """Unpack a bitmask into a sorted tuple of generator indices."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)


def _low_bit(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


def parse_genset(system: "CoxeterSystem", text: str) -> int:
    """Parse a comma/space separated list of generator labels ("s1,s3"),
    with or without the braces that format_genset adds."""
    text = text.strip()
    if text.startswith("{") and text.endswith("}"):
        text = text[1:-1].strip()
    if not text:
        return 0
    mask = 0
    for tok in re.split(r"[,\s]+", text):
        if tok:
            mask |= 1 << system.generator_index(tok)
    return mask


def format_genset(system: "CoxeterSystem", mask: int) -> str:
    names = [system.generator_names[i] for i in genset_indices(mask)]
    return "{" + ",".join(names) + "}"


# ---------------------------------------------------------------------------
# small exact integer matrices (tuples of row tuples)


def _identity_matrix(n: int) -> tuple:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def _mat_mul(a: tuple, b: tuple) -> tuple:
    n = len(a)
    rng = range(n)
    return tuple(
        tuple(sum(arow[k] * b[k][j] for k in rng) for j in rng) for arow in a
    )


def _cartan_from_coxeter(matrix: Sequence[Sequence[int]]) -> tuple:
    """Integer generalized Cartan matrix realizing the Coxeter matrix.

    Bond order 2 gives the pair (0, 0), order 3 gives (-1, -1), order 4
    gives the asymmetric pair (-1, -2); the orientation of the 4-bonds does
    not change the abstract Coxeter system.
    """
    n = len(matrix)
    cartan = [[2] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            m = matrix[i][j]
            if m == 2:
                cartan[i][j] = 0
            elif m == 3:
                cartan[i][j] = -1
            elif m == 4:
                cartan[i][j] = -1 if i < j else -2
            else:
                raise ValueError(
                    "root-lattice backend requires bond orders in {2,3,4}; "
                    "got m=%r" % (m,)
                )
    return tuple(tuple(row) for row in cartan)


def _gen_matrix(cartan: tuple, i: int) -> tuple:
    """Matrix of the simple reflection s_i on the root lattice,
    s_i(alpha_j) = alpha_j - a_ij alpha_i, in the basis of simple roots."""
    n = len(cartan)
    rows = []
    for r in range(n):
        if r != i:
            rows.append(tuple(1 if c == r else 0 for c in range(n)))
        else:
            rows.append(tuple(-1 if c == i else -cartan[i][c]
                              for c in range(n)))
    return tuple(rows)


def _column_is_negative(mat: tuple, col: int) -> bool:
    # Images of simple roots are real roots: coordinates all >= 0 or all <= 0.
    return any(row[col] < 0 for row in mat)


# ---------------------------------------------------------------------------
# elements


class Element:
    """A group element, interned per system in canonical form.

    Attributes:
        system:  owning :class:`CoxeterSystem`
        word:    ShortLex-least reduced word, as a tuple of generator indices
        length:  Coxeter length (== len(word))
        ldesc:   bitmask of left descents  {s : l(s w) < l(w)}
        rdesc:   bitmask of right descents {s : l(w s) < l(w)}
        support: bitmask of generators occurring in reduced words of w
    """

    __slots__ = ("system", "word", "length", "ldesc", "rdesc", "support",
                 "_state", "_rmul", "_lmul", "_coatoms")

    def __init__(self, system, word, ldesc, rdesc, state):
        self.system = system
        self.word = word
        self.length = len(word)
        self.ldesc = ldesc
        self.rdesc = rdesc
        self.support = genset(word)
        self._state = state
        self._rmul = [None] * system.rank
        self._lmul = [None] * system.rank
        self._coatoms = None

    @property
    def left_descents(self) -> frozenset:
        return frozenset(genset_indices(self.ldesc))

    @property
    def right_descents(self) -> frozenset:
        return frozenset(genset_indices(self.rdesc))

    def label_str(self) -> str:
        """Render as concatenated generator labels, or "e" for the identity."""
        if not self.word:
            return "e"
        names = self.system.generator_names
        return "".join(names[i] for i in self.word)

    def inverse(self) -> "Element":
        return self.system.element_from_word(tuple(reversed(self.word)))

    def __lt__(self, other: "Element") -> bool:
        return (self.length, self.word) < (other.length, other.word)

    def __repr__(self) -> str:
        return "<%s>" % self.label_str()


# ---------------------------------------------------------------------------
# the system


_NAMED_RE = re.compile(r"^([ABDF])(\d+)$|^I2\((\d+)\)$")


class CoxeterSystem:
    """A Coxeter system (W, S) given by its Coxeter matrix.

    The backend is chosen automatically: "dihedral-word" for rank 2 (any
    finite bond order), "crystallographic-root" otherwise (bond orders
    restricted to {2, 3, 4}).
    """

    def __init__(self, matrix: Sequence[Sequence[int]],
                 generator_names: Optional[Sequence[str]] = None,
                 name: Optional[str] = None):
        matrix = tuple(tuple(row) for row in matrix)
        self._validate_matrix(matrix)
        self.matrix = matrix
        self.rank = len(matrix)
        self.name = name
        if generator_names is None:
            generator_names = tuple("s%d" % (i + 1) for i in range(self.rank))
        else:
            generator_names = tuple(generator_names)
            if len(generator_names) != self.rank:
                raise ValueError("need one label per generator")
        self.generator_names = generator_names
        self._name_to_index = {nm: i for i, nm in enumerate(generator_names)}

        if self.rank == 2:
            self.backend = "dihedral-word"
            self._m = matrix[0][1]
            self._cartan = None
            self._gens = None
            id_state = (0, 0)
        else:
            self.backend = "crystallographic-root"
            self._m = None
            self._cartan = _cartan_from_coxeter(matrix)
            self._gens = tuple(_gen_matrix(self._cartan, i)
                               for i in range(self.rank))
            ident = _identity_matrix(self.rank)
            id_state = (ident, ident)

        self._intern_table: dict = {}
        self.identity = self._intern(id_state)
        self._levels = [[self.identity]]
        self._levels_complete = False
        self._bruhat: dict = {}
        self._lower_intervals: dict = {}
        self._kl_contexts: dict = {}
        self._parabolic_groups: dict = {}

    # -- construction helpers ------------------------------------------------

    @staticmethod
    def _validate_matrix(matrix) -> None:
        n = len(matrix)
        if n < 1:
            raise ValueError("rank must be at least 1")
        for i, row in enumerate(matrix):
            if len(row) != n:
                raise ValueError("Coxeter matrix must be square")
            for j, m in enumerate(row):
                if not isinstance(m, int):
                    raise ValueError(
                        "bond orders must be finite integers; got %r" % (m,))
                if i == j:
                    if m != 1:
                        raise ValueError("diagonal entries must be 1")
                elif m < 2:
                    raise ValueError("off-diagonal entries must be >= 2")
                elif matrix[j][i] != m:
                    raise ValueError("Coxeter matrix must be symmetric")
                elif n >= 3 and m > 4:
                    raise ValueError(
                        "rank >= 3 systems must be doubly laced "
                        "(all bond orders <= 4); got m=%d" % m)

    @classmethod
    def A(cls, n: int) -> "CoxeterSystem":
        if n < 1:
            raise ValueError("A_n needs n >= 1")
        m = [[1 if i == j else (3 if abs(i - j) == 1 else 2)
              for j in range(n)] for i in range(n)]
        return cls(m, name="A%d" % n)

    @classmethod
    def B(cls, n: int) -> "CoxeterSystem":
        if n < 2:
            raise ValueError("B_n needs n >= 2")
        m = [[1 if i == j else (3 if abs(i - j) == 1 else 2)
              for j in range(n)] for i in range(n)]
        m[n - 2][n - 1] = m[n - 1][n - 2] = 4
        return cls(m, name="B%d" % n)

    @classmethod
    def D(cls, n: int) -> "CoxeterSystem":
        if n < 4:
            raise ValueError("D_n needs n >= 4")
        m = [[1 if i == j else 2 for j in range(n)] for i in range(n)]
        for i in range(n - 2):
            m[i][i + 1] = m[i + 1][i] = 3
        m[n - 3][n - 1] = m[n - 1][n - 3] = 3
        return cls(m, name="D%d" % n)

    @classmethod
    def F4(cls) -> "CoxeterSystem":
        m = [[1, 3, 2, 2],
             [3, 1, 4, 2],
             [2, 4, 1, 3],
             [2, 2, 3, 1]]
        return cls(m, name="F4")

    @classmethod
    def I2(cls, m: int) -> "CoxeterSystem":
        if m < 2:
            raise ValueError("I2(m) needs m >= 2")
        return cls([[1, m], [m, 1]], name="I2(%d)" % m)

    @classmethod
    def from_name(cls, name: str) -> "CoxeterSystem":
        name = name.strip()
        mt = _NAMED_RE.match(name)
        if not mt:
            raise ValueError("unknown group name %r" % name)
        if mt.group(3) is not None:
            return cls.I2(int(mt.group(3)))
        family, n = mt.group(1), int(mt.group(2))
        if family == "A":
            return cls.A(n)
        if family == "B":
            return cls.B(n)
        if family == "D":
            return cls.D(n)
        if family == "F":
            if n != 4:
                raise ValueError("only F4 exists")
            return cls.F4()
        raise ValueError("unknown group name %r" % name)

    @classmethod
    def from_spec(cls, spec: dict) -> "CoxeterSystem":
        """Build from a JSON-style descriptor.

        {"type": "named", "name": "F4"} or
        {"type": "matrix", "m": [[1,3],[3,1]], "labels": ["s","t"]}
        """
        kind = spec.get("type")
        if kind == "named":
            return cls.from_name(spec["name"])
        if kind == "matrix":
            return cls(spec["m"], generator_names=spec.get("labels"))
        raise ValueError("group spec type must be 'named' or 'matrix'")

    @classmethod
    def load(cls, path: str) -> "CoxeterSystem":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_spec(json.load(fh))

    @property
    def spec(self) -> dict:
        if self.name is not None:
            return {"type": "named", "name": self.name}
        return {"type": "matrix", "m": [list(r) for r in self.matrix],
                "labels": list(self.generator_names)}

    def __repr__(self) -> str:
        if self.name:
            return "CoxeterSystem(%s)" % self.name
        return "CoxeterSystem(rank %d)" % self.rank

    def generator_index(self, label: str) -> int:
        try:
            return self._name_to_index[label]
        except KeyError:
            raise ValueError("unknown generator label %r (have %s)"
                             % (label, ", ".join(self.generator_names)))

    def generator(self, i: int) -> Element:
        return self.multiply_by_generator(self.identity, i)

    def full_genset(self) -> int:
        return (1 << self.rank) - 1

    # -- backend state arithmetic --------------------------------------------

    def _state_key(self, state):
        if self.backend == "dihedral-word":
            return state
        return state[0]

    def _state_mult(self, state, s: int, side: str):
        if self.backend == "dihedral-word":
            m = self._m
            f, k = state
            if side == "right":
                if k == 0:
                    return (s, 1)
                if k == m:
                    # the longest element; use its word ending with s
                    return ((s if m % 2 == 1 else 1 - s), m - 1)
                last = f if k % 2 == 1 else 1 - f
                if s == last:
                    return (f, k - 1) if k > 1 else (0, 0)
                return (0, m) if k + 1 == m else (f, k + 1)
            else:
                if k == 0:
                    return (s, 1)
                if k == m:
                    # strip s from the word of the longest element starting s
                    return (1 - s, m - 1)
                if s == f:
                    return ((1 - f), k - 1) if k > 1 else (0, 0)
                return (0, m) if k + 1 == m else (s, k + 1)
        else:
            mat, inv = state
            g = self._gens[s]
            if side == "right":
                return (_mat_mul(mat, g), _mat_mul(g, inv))
            return (_mat_mul(g, mat), _mat_mul(inv, g))

    def _state_descents(self, state) -> tuple[int, int]:
        """Return (ldesc, rdesc) bitmasks for a backend state."""
        if self.backend == "dihedral-word":
            f, k = state
            if k == 0:
                return 0, 0
            if k == self._m:
                return 0b11, 0b11
            last = f if k % 2 == 1 else 1 - f
            return 1 << f, 1 << last
        mat, inv = state
        ld = rd = 0
        for s in range(self.rank):
            if _column_is_negative(inv, s):
                ld |= 1 << s
            if _column_is_negative(mat, s):
                rd |= 1 << s
        return ld, rd

    def _state_word(self, state) -> tuple[int, ...]:
        """ShortLex-least reduced word: repeatedly strip the smallest left
        descent."""
        if self.backend == "dihedral-word":
            f, k = state
            if k == self._m:
                f = 0
            return tuple((f + i) % 2 for i in range(k))
        mat, inv = state
        ident = _identity_matrix(self.rank)
        word = []
        while mat != ident:
            for s in range(self.rank):
                if _column_is_negative(inv, s):
                    break
            else:
                raise AssertionError("non-identity element with no descent")
            word.append(s)
            g = self._gens[s]
            mat = _mat_mul(g, mat)
            inv = _mat_mul(inv, g)
        return tuple(word)

    def _intern(self, state) -> Element:
        key = self._state_key(state)
        el = self._intern_table.get(key)
        if el is not None:
            return el
        word = self._state_word(state)
        ldesc, rdesc = self._state_descents(state)
        el = Element(self, word, ldesc, rdesc, state)
        return self._intern_table.setdefault(key, el)

    # -- element arithmetic ----------------------------------------------------

    def _check_owned(self, *els: Element) -> None:
        for el in els:
            if el.system is not self:
                raise ValueError("element %r belongs to a different system"
                                 % (el,))

    def element_from_word(self, word: Iterable[int]) -> Element:
        w = self.identity
        for s in word:
            w = self.multiply_by_generator(w, s)
        return w

    def element_from_labels(self, text: str) -> Element:
        """Parse "s3s1s2", "s3 s1 s2", "s3,s1,s2" or "e"."""
        text = text.strip()
        if text in ("", "e"):
            return self.identity
        names = sorted(self.generator_names, key=len, reverse=True)
        pat = re.compile("|".join(re.escape(n) for n in names) + r"|[,\s]+|.")
        word = []
        for mt in pat.finditer(text):
            tok = mt.group(0)
            if re.fullmatch(r"[,\s]+", tok):
                continue
            if tok not in self._name_to_index:
                raise ValueError("cannot parse %r at %r" % (text, tok))
            word.append(self._name_to_index[tok])
        return self.element_from_word(word)

    def multiply_by_generator(self, w: Element, s: int,
                              side: str = "right") -> Element:
        if not 0 <= s < self.rank:
            raise ValueError("generator index %r out of range" % (s,))
        if side not in ("right", "left"):
            raise ValueError("side must be 'right' or 'left'")
        self._check_owned(w)
        cache = w._rmul if side == "right" else w._lmul
        el = cache[s]
        if el is None:
            el = self._intern(self._state_mult(w._state, s, side))
            cache[s] = el
        return el

    def multiply(self, u: Element, v: Element) -> Element:
        self._check_owned(u, v)
        w = u
        for s in v.word:
            w = self.multiply_by_generator(w, s)
        return w

    def inverse(self, w: Element) -> Element:
        self._check_owned(w)
        return self.element_from_word(tuple(reversed(w.word)))

    # -- Bruhat order ----------------------------------------------------------

    def bruhat_leq(self, u: Element, v: Element) -> bool:
        """Bruhat order, by the standard left-descent recursion: for
        s a left descent of v,  u <= v  iff  (su <= sv if s is a left
        descent of u, else u <= sv)."""
        self._check_owned(u, v)
        if u is v:
            return True
        if u.length >= v.length:
            return False
        if u.length == 0:
            return True
        key = (u, v)
        memo = self._bruhat
        res = memo.get(key)
        if res is None:
            s = _low_bit(v.ldesc)
            sv = self.multiply_by_generator(v, s, "left")
            if (u.ldesc >> s) & 1:
                res = self.bruhat_leq(
                    self.multiply_by_generator(u, s, "left"), sv)
            else:
                res = self.bruhat_leq(u, sv)
            memo[key] = res
        return res

    # -- parabolic quotients and subgroups --------------------------------------

    def is_min_coset_rep(self, u: Element, H: int) -> bool:
        """True iff u has no right descent inside H, i.e. u is the shortest
        element of the coset u W_H."""
        self._check_owned(u)
        return (u.rdesc & H) == 0

    def check_min_coset_rep(self, u: Element, H: int) -> None:
        if u.rdesc & H:
            raise QuotientMembershipError(u, H, _low_bit(u.rdesc & H))

    def coset_decompose_right(self, u: Element, J: int):
        """Unique decomposition u = a * b with b in W_J, a with no right
        descent in J, and l(u) = l(a) + l(b).  Returns (a, b)."""
        self._check_owned(u)
        parts = []
        cur = u
        while cur.rdesc & J:
            s = _low_bit(cur.rdesc & J)
            cur = self.multiply_by_generator(cur, s, "right")
            parts.append(s)
        return cur, self.element_from_word(reversed(parts))

    def coset_decompose_left(self, u: Element, J: int):
        """Unique decomposition u = b * a with b in W_J, a with no left
        descent in J, and l(u) = l(b) + l(a).  Returns (b, a)."""
        self._check_owned(u)
        parts = []
        cur = u
        while cur.ldesc & J:
            s = _low_bit(cur.ldesc & J)
            cur = self.multiply_by_generator(cur, s, "left")
            parts.append(s)
        return self.element_from_word(parts), cur

    def max_parabolic_below(self, w: Element, J: int) -> Element:
        """The maximum of W_J intersected with [e, w] (it has a unique
        maximum).  Enumerates the intersection by ascending BFS; every such
        element is reachable through its own reduced-word prefixes."""
        self._check_owned(w)
        seen = {self.identity}
        frontier = [self.identity]
        best = self.identity
        while frontier:
            nxt = []
            for z in frontier:
                for s in genset_indices(J):
                    if (z.rdesc >> s) & 1:
                        continue
                    zs = self.multiply_by_generator(z, s)
                    if zs not in seen and self.bruhat_leq(zs, w):
                        seen.add(zs)
                        nxt.append(zs)
            frontier = nxt
            for z in frontier:
                if z.length > best.length:
                    best = z
        for z in seen:
            if not self.bruhat_leq(z, best):
                raise AssertionError(
                    "W_J cap [e,w] has no unique maximum; got %r vs %r"
                    % (z, best))
        return best

    def parabolic_group(self, H: int, cap: int = 200000) -> tuple:
        """All elements of the standard parabolic subgroup W_H, sorted by
        (length, word).  Raises if |W_H| exceeds cap."""
        cached = self._parabolic_groups.get(H)
        if cached is not None:
            return cached
        seen = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for z in frontier:
                for s in genset_indices(H):
                    if (z.rdesc >> s) & 1:
                        continue
                    zs = self.multiply_by_generator(z, s)
                    if zs not in seen:
                        seen.add(zs)
                        nxt.append(zs)
            if len(seen) > cap:
                raise ValueError("parabolic subgroup exceeds %d elements" % cap)
            frontier = nxt
        out = tuple(sorted(seen))
        return self._parabolic_groups.setdefault(H, out)

    def longest_element_of_parabolic(self, H: int) -> Element:
        """The longest element of W_H (W_H must be finite)."""
        return self.parabolic_group(H)[-1]

    # -- enumeration -------------------------------------------------------------

    def _extend_levels(self, upto: int) -> None:
        while len(self._levels) <= upto and not self._levels_complete:
            nxt = set()
            for w in self._levels[-1]:
                for s in range(self.rank):
                    if not (w.rdesc >> s) & 1:
                        nxt.add(self.multiply_by_generator(w, s))
            if not nxt:
                self._levels_complete = True
            else:
                self._levels.append(sorted(nxt))

    def elements_up_to_length(self, max_length: int) -> list[Element]:
        """All elements of length <= max_length, sorted by (length, word)."""
        self._extend_levels(max_length)
        out: list[Element] = []
        for lvl in self._levels[:max_length + 1]:
            out.extend(lvl)
        return out

    def group_elements(self, cap: int = 1000000) -> list[Element]:
        """All elements of a finite group, sorted by (length, word)."""
        bound = 0
        while not self._levels_complete:
            bound += 64
            self._extend_levels(bound)
            if sum(len(l) for l in self._levels) > cap:
                raise ValueError("group exceeds %d elements; is it finite?"
                                 % cap)
        return self.elements_up_to_length(len(self._levels) - 1)

    def longest_length(self) -> int:
        """Length of the longest element (finite groups only)."""
        self.group_elements()
        return len(self._levels) - 1
