"""Exhaustive verification campaigns.

Three kinds of campaign, all exact:

- ``sweep_calculating``: for every quotient element w up to a length
  bound and every generator subset H in a given family, enumerate the
  special matchings of [e, w], keep the H-special ones, and check that
  each reproduces the reference R-polynomials through the three-branch
  matching recurrence.  Failures are collected as self-contained
  counterexample records, never raised.
- ``invariance_scan``: for pairs of marked lower intervals, search for a
  rank- and mark-preserving poset isomorphism and, when one exists,
  check that corresponding quotient elements carry identical parabolic
  R- and P-polynomials for both x variants.
- ``mongelli_reproduction``: the known rank-4 counterexample showing
  that two *quotient* intervals can be isomorphic as posets while their
  parabolic P-polynomials differ (so no analogue of combinatorial
  invariance holds for quotients in general).

Sweeps are embarrassingly parallel across (w, H) units: every unit owns
a private memo table and the merge is deterministic by (w, H) sort key,
so reports are byte-identical regardless of thread count.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

from .coxeter import (
    CoxeterSystem,
    Element,
    format_genset,
    genset,
    parse_genset,
)
from .klpoly import (
    KLContext,
    QPolynomial,
    XParam,
    R_step_via_matching,
    get_context,
    verify_calculating,
)
from .matchings import enumerate_special_matchings, is_H_special, \
    matching_from_json
from .poset import (
    build_interval,
    build_lower_interval,
    find_isomorphism,
    find_marked_isomorphism,
    find_order_isomorphism,
    mark_interval,
)


# ---------------------------------------------------------------------------
# main-theorem sweeps


@dataclass
class VerificationReport:
    """Outcome of one calculating-matchings sweep.

    ``counterexamples`` holds JSON-ready records (see
    ``reverify_counterexample``); timing is kept out of ``to_json`` by
    default so that identical campaigns serialize identically.
    """

    campaign: str
    group: dict
    x: str
    max_length: int
    H_set: list[str]
    intervals_scanned: int
    matchings_enumerated: int
    h_special_count: int
    calculating_count: int
    counterexamples: list[dict]
    wall_time: float

    @property
    def ok(self) -> bool:
        return not self.counterexamples

    def to_json(self, include_timing: bool = False) -> dict:
        out = {
            "campaign": self.campaign,
            "group": self.group,
            "x": self.x,
            "max_length": self.max_length,
            "H_set": self.H_set,
            "totals": {
                "intervals_scanned": self.intervals_scanned,
                "matchings_enumerated": self.matchings_enumerated,
                "h_special": self.h_special_count,
                "calculating": self.calculating_count,
            },
            "counterexamples": self.counterexamples,
            "ok": self.ok,
        }
        if include_timing:
            out["wall_time_s"] = self.wall_time
        return out


def default_max_length(sys: CoxeterSystem, cap: int = 400) -> int:
    """The default sweep bound: the full group when it has at most
    ``cap`` elements, length 9 otherwise (large or infinite groups)."""
    length = 0
    while True:
        els = sys.elements_up_to_length(length + 1)
        if len(els) > cap:
            return 9
        if els[-1].length <= length:
            return els[-1].length
        length += 1


def _record_json(sys: CoxeterSystem, rec: dict) -> dict:
    """Serialize a counterexample record from verify_calculating so that
    it is self-contained: re-evaluation needs nothing but the system."""
    return {
        "w": rec["w"].label_str(),
        "u": rec["u"].label_str(),
        "H": format_genset(sys, rec["H"]),
        "x": rec["x"],
        "matching": rec["matching"].to_json(),
        "via_matching": rec["via_matching"].to_json(),
        "reference": rec["reference"].to_json(),
    }


def _sweep_unit(sys: CoxeterSystem, w: Element, H: int,
                x: XParam) -> tuple[int, int, int, list[dict]]:
    """One (w, H) work unit with private memo tables.  Returns
    (matchings, h-special, calculating, counterexample records)."""
    interval = build_lower_interval(sys, w)
    marked = mark_interval(interval, H)
    table = KLContext(sys, H, x)
    all_special = enumerate_special_matchings(interval)
    h_special = [M for M in all_special if is_H_special(marked, M)]
    records = []
    calculating = 0
    for M in h_special:
        ok, rec = verify_calculating(marked, x, M, table)
        if ok:
            calculating += 1
        else:
            records.append(_record_json(sys, rec))
    return len(all_special), len(h_special), calculating, records


def sweep_calculating(sys: CoxeterSystem, max_length: Optional[int] = None,
                      H_set: Optional[Sequence[int]] = None,
                      x=XParam.MINUS_ONE,
                      threads: int = 1) -> VerificationReport:
    """Check that every H-special matching of every lower interval
    [e, w] with w in W^H and len(w) <= max_length reproduces the
    reference R-polynomials.  Counterexamples are reported, not raised.

    H_set defaults to all subsets of the generators; max_length to
    ``default_max_length``.  Totals are per (w, H) unit, so an interval
    scanned under several H contributes its matchings once per H.
    """
    x = XParam.parse(x)
    if max_length is None:
        max_length = default_max_length(sys)
    if H_set is None:
        H_set = range(1 << sys.rank)
    H_set = sorted(set(H_set))
    for H in H_set:
        if not 0 <= H < (1 << sys.rank):
            raise ValueError("H is not a subset of the generators")

    # enumerate candidates up front: deterministic unit order, and all
    # shared element-level caches are primed before threads start
    units = [(w, H)
             for w in sys.elements_up_to_length(max_length)
             for H in H_set
             if (w.rdesc & H) == 0]

    started = time.perf_counter()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(
                lambda unit: _sweep_unit(sys, unit[0], unit[1], x), units))
    else:
        results = [_sweep_unit(sys, w, H, x) for w, H in units]

    matchings = sum(r[0] for r in results)
    h_special = sum(r[1] for r in results)
    calculating = sum(r[2] for r in results)
    counterexamples = [rec for r in results for rec in r[3]]
    group_id = sys.name or ("rank%d" % sys.rank)
    report = VerificationReport(
        campaign="calculating:%s:x=%s:len<=%d" % (group_id, x.value,
                                                  max_length),
        group=sys.spec,
        x=x.value,
        max_length=max_length,
        H_set=[format_genset(sys, H) for H in H_set],
        intervals_scanned=len(units),
        matchings_enumerated=matchings,
        h_special_count=h_special,
        calculating_count=calculating,
        counterexamples=counterexamples,
        wall_time=time.perf_counter() - started,
    )
    assert (report.calculating_count == report.h_special_count) \
        == report.ok
    return report


def recompute_record_sides(sys: CoxeterSystem,
                           record: dict) -> tuple[QPolynomial, QPolynomial]:
    """Re-evaluate a serialized counterexample record from scratch:
    the matching-recurrence value and the reference value at its (u, w)."""
    w = sys.element_from_labels(record["w"])
    u = sys.element_from_labels(record["u"])
    H = parse_genset(sys, record["H"])
    x = XParam.parse(record["x"])
    interval = build_lower_interval(sys, w)
    marked = mark_interval(interval, H)
    M = matching_from_json(interval, record["matching"])
    table = KLContext(sys, H, x)
    via = R_step_via_matching(marked, x, M, u, table)
    reference = table.R(u, w)
    return via, reference


def reverify_counterexample(sys: CoxeterSystem, record: dict) -> bool:
    """True iff the record's stored discrepancy reproduces exactly:
    fresh evaluation returns the stored values and they really differ."""
    via, reference = recompute_record_sides(sys, record)
    return (via == QPolynomial.from_json(record["via_matching"])
            and reference == QPolynomial.from_json(record["reference"])
            and via != reference)


# ---------------------------------------------------------------------------
# combinatorial-invariance scans


@dataclass
class ScanRecord:
    """One pair of marked lower intervals from an invariance scan."""

    first: dict
    second: dict
    isomorphic: bool
    polynomials_equal: Optional[bool]
    pairs_checked: int = 0

    def to_json(self) -> dict:
        return {
            "first": self.first,
            "second": self.second,
            "isomorphic": self.isomorphic,
            "polynomials_equal": self.polynomials_equal,
            "pairs_checked": self.pairs_checked,
        }


def _scan_entry(sys: CoxeterSystem, H: int, w: Element):
    sys.check_min_coset_rep(w, H)
    marked = mark_interval(build_lower_interval(sys, w), H)
    descriptor = {
        "group": sys.spec,
        "H": format_genset(sys, H),
        "w": w.label_str(),
    }
    return sys, H, w, marked, descriptor


def _scan_pair(a, b, xs) -> ScanRecord:
    sys_a, H_a, w_a, marked_a, desc_a = a
    sys_b, H_b, w_b, marked_b, desc_b = b
    psi = find_marked_isomorphism(marked_a, marked_b)
    if psi is None:
        return ScanRecord(desc_a, desc_b, False, None)
    iv_a, iv_b = marked_a.interval, marked_b.interval
    equal = True
    checked = 0
    for x in xs:
        ctx_a = get_context(sys_a, H_a, x)
        ctx_b = get_context(sys_b, H_b, x)
        for ua_id in marked_a.marked_ids():
            ua = iv_a.elements[ua_id]
            ub = iv_b.elements[psi[ua_id]]
            checked += 1
            if ctx_a.R(ua, w_a) != ctx_b.R(ub, w_b) \
                    or ctx_a.P(ua, w_a) != ctx_b.P(ub, w_b):
                equal = False
    return ScanRecord(desc_a, desc_b, True, equal, checked)


def invariance_scan(pairs: Sequence[tuple[CoxeterSystem, int, Element]],
                    xs: Sequence = (XParam.MINUS_ONE, XParam.Q)
                    ) -> list[ScanRecord]:
    """For every unordered pair from ``pairs`` (each entry also paired
    with itself), look for a marked isomorphism of the lower intervals
    [e, w] and, when found, compare the parabolic R- and P-polynomials
    at corresponding quotient elements for every x in ``xs``."""
    xs = tuple(XParam.parse(x) for x in xs)
    entries = [_scan_entry(sys, H, w) for sys, H, w in pairs]
    out = []
    for i in range(len(entries)):
        for j in range(i, len(entries)):
            out.append(_scan_pair(entries[i], entries[j], xs))
    return out


# ---------------------------------------------------------------------------
# the rank-4 quotient counterexample


@dataclass
class MongelliReport:
    """The two quotient intervals that witness failure of combinatorial
    invariance for quotients: isomorphic as posets, different P."""

    group: dict
    H: str
    first: tuple[str, str]
    second: tuple[str, str]
    in_quotient: bool
    quotient_isomorphic: bool
    full_intervals_isomorphic: bool
    p_values: dict
    reproduced: bool
    wall_time: float

    def to_json(self, include_timing: bool = False) -> dict:
        out = {
            "group": self.group,
            "H": self.H,
            "first": list(self.first),
            "second": list(self.second),
            "in_quotient": self.in_quotient,
            "quotient_isomorphic": self.quotient_isomorphic,
            "full_intervals_isomorphic": self.full_intervals_isomorphic,
            "p_values": {
                x: [p.to_json() for p in ps]
                for x, ps in sorted(self.p_values.items())
            },
            "reproduced": self.reproduced,
        }
        if include_timing:
            out["wall_time_s"] = self.wall_time
        return out


def _quotient_relation(sys: CoxeterSystem, H: int, u: Element,
                       v: Element) -> list[int]:
    """The subposet of [u, v] cut out by quotient membership, as an
    order relation (rel[i] = bitmask of j with i <= j)."""
    interval = build_interval(sys, u, v)
    ids = [i for i, el in enumerate(interval.elements)
           if (el.rdesc & H) == 0]
    rel = []
    for i in ids:
        mask = 0
        for jj, j in enumerate(ids):
            if interval.leq(i, j):
                mask |= 1 << jj
        rel.append(mask)
    return rel


def mongelli_reproduction(sys: Optional[CoxeterSystem] = None
                          ) -> MongelliReport:
    """Reproduce the rank-4 counterexample: in the group with bonds
    3-4-3 and H = {s1,s2,s3}, the quotient intervals [u,v]^H and
    [x,y]^H below are isomorphic posets, the full Bruhat intervals
    [u,v] and [x,y] are not, and the parabolic P-polynomials differ
    for both x variants (q vs 0, and q+1 vs 1)."""
    started = time.perf_counter()
    if sys is None:
        sys = CoxeterSystem.F4()
    H = genset((0, 1, 2))
    u1 = sys.element_from_labels("s3s1s2s3s4")
    v1 = sys.element_from_labels("s3s4s2s3s1s2s3s4")
    u2 = sys.element_from_labels("s2s3s4")
    v2 = sys.element_from_labels("s4s3s1s2s3s4")

    in_quotient = all(sys.is_min_coset_rep(z, H) for z in (u1, v1, u2, v2))
    quotient_iso = find_order_isomorphism(
        _quotient_relation(sys, H, u1, v1),
        _quotient_relation(sys, H, u2, v2)) is not None
    full_iso = find_isomorphism(build_interval(sys, u1, v1),
                                build_interval(sys, u2, v2)) is not None
    p_values = {
        x.value: [get_context(sys, H, x).P(u1, v1),
                  get_context(sys, H, x).P(u2, v2)]
        for x in (XParam.Q, XParam.MINUS_ONE)
    }
    reproduced = (
        in_quotient
        and quotient_iso
        and not full_iso
        and p_values["q"] == [QPolynomial((0, 1)), QPolynomial()]
        and p_values["-1"] == [QPolynomial((1, 1)), QPolynomial((1,))]
    )
    return MongelliReport(
        group=sys.spec,
        H=format_genset(sys, H),
        first=(u1.label_str(), v1.label_str()),
        second=(u2.label_str(), v2.label_str()),
        in_quotient=in_quotient,
        quotient_isomorphic=quotient_iso,
        full_intervals_isomorphic=full_iso,
        p_values=p_values,
        reproduced=reproduced,
        wall_time=time.perf_counter() - started,
    )
