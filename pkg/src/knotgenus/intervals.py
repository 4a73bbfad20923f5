"""Orbit counting for pseudogroups of integer-interval isometries.

A *pairing* is a bijective isometry between two equal-width subintervals
of ``[1, N]``, either a translation (orientation preserving) or a
reflection (orientation reversing).  A finite set of pairings generates a
pseudogroup whose orbits partition ``[1, N]``.  ``count_orbits`` computes
the exact number of orbits in time polynomial in ``k * log N`` (``k`` =
number of pairings) by repeatedly simplifying the system with six
orbit-preserving moves: identity deletion, contraction of static
intervals, trimming, periodic merger, transmission and truncation.

All arithmetic is exact; endpoints and counts may be arbitrary-precision
integers.  ``count_orbits_oracle`` is an independent brute-force check
(union-find over explicitly materialized points) used throughout the test
suite; it is capped because it is linear in ``N``, not ``log N``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

from .errors import (
    DomainError,
    EmptySystemError,
    InternalInvariantError,
    InputError,
    MergeConditionError,
    OracleCapacityError,
    TransmissionError,
)

ORACLE_CAP = 10**6

# Internal pairing representation: (a, b, c, d, rev) with domain [a, b],
# range [c, d], a <= c, equal widths.  rev is True for reflections.
RawPairing = Tuple[int, int, int, int, bool]


@dataclass(frozen=True)
class Interval:
    """Connected set of integers [lo, hi], lo <= hi."""

    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise InputError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def width(self) -> int:
        return self.hi - self.lo + 1

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi

    def as_tuple(self) -> Tuple[int, int]:
        return (self.lo, self.hi)


@dataclass(frozen=True)
class Pairing:
    """Isometry between two equal-width integer intervals.

    Canonical form: the domain is the interval with the smaller left
    endpoint.  Width-one pairings are stored as orientation preserving
    (the two maps coincide).  A preserving pairing with domain == range is
    the identity; such pairings may exist transiently but are deleted by
    the first step of the counting algorithm.
    """

    domain: Interval
    range: Interval
    reversing: bool = False

    def __post_init__(self):
        if self.domain.width != self.range.width:
            raise InputError("domain and range widths differ")
        if self.domain.lo > self.range.lo:
            raise InputError("not canonical: domain.lo > range.lo (swap ends)")
        if self.width == 1 and self.reversing:
            raise InputError("width-1 pairings are stored as preserving")

    @property
    def width(self) -> int:
        return self.domain.width

    @property
    def translation(self) -> int:
        """Translation distance c - a (meaningful for preserving pairings)."""
        return self.range.lo - self.domain.lo

    def is_identity(self) -> bool:
        return not self.reversing and self.domain == self.range

    @staticmethod
    def make(domain: Tuple[int, int], range_: Tuple[int, int],
             reversing: bool = False) -> "Pairing":
        """Build a pairing in canonical form from raw endpoint pairs."""
        raw = _canonical(domain[0], domain[1], range_[0], range_[1], reversing)
        a, b, c, d, rev = raw
        return Pairing(Interval(a, b), Interval(c, d), rev)

    def _raw(self) -> RawPairing:
        return (self.domain.lo, self.domain.hi, self.range.lo, self.range.hi,
                self.reversing)


def _canonical(a: int, b: int, c: int, d: int, rev: bool) -> RawPairing:
    if b - a != d - c:
        raise InputError("domain and range widths differ")
    if a > b:
        raise InputError("empty interval")
    if c < a or (c == a and d < b):
        a, b, c, d = c, d, a, b
    if a == b:
        rev = False
    return (a, b, c, d, rev)


@dataclass
class PairingSystem:
    """Width-n interval together with a list of pairings inside [1, n]."""

    n: int
    pairings: List[Pairing] = field(default_factory=list)
    orbit_counter: int = 0
    trace: Optional[List[tuple]] = None

    def __post_init__(self):
        if self.n < 0:
            raise InputError("interval width must be nonnegative")
        for p in self.pairings:
            if p.domain.lo < 1 or p.range.hi > self.n:
                raise InputError(
                    f"pairing {p} does not fit inside [1, {self.n}]")

    @property
    def k(self) -> int:
        return len(self.pairings)

    def copy(self) -> "PairingSystem":
        return PairingSystem(self.n, list(self.pairings), self.orbit_counter)


# ---------------------------------------------------------------------------
# Elementary operations on pairings
# ---------------------------------------------------------------------------

def apply(p: Pairing, x: int) -> int:
    """Evaluate the bijection at x (forward from the domain, else inverse)."""
    a, b, c, d, rev = p._raw()
    if rev:
        if a <= x <= b or c <= x <= d:
            return a + d - x
        raise DomainError(f"{x} outside domain and range of {p}")
    if a <= x <= b:
        return x + (c - a)
    if c <= x <= d:
        return x - (c - a)
    raise DomainError(f"{x} outside domain and range of {p}")


def is_periodic(p: Pairing) -> bool:
    """True when p is preserving and its domain and range abut or overlap.

    Such a pairing acts on the combined interval [a, d] as a shift of
    period t = c - a, and has exactly t orbits there.
    """
    return (not p.reversing) and p.range.lo <= p.domain.hi + 1


def periodic_interval(p: Pairing) -> Interval:
    if not is_periodic(p):
        raise InputError("pairing is not periodic")
    return Interval(p.domain.lo, p.range.hi)


def trim(p: Pairing) -> Pairing:
    """Shrink a reversing pairing with overlapping ends to disjoint ones.

    The reflection x -> a + d - x is restricted to [a, m-1] -> [m+1, d]
    around the midpoint m of [a, d]; when a + d is even the integer
    midpoint is a fixed point and is left unpaired.  Orbits of any system
    containing p are unchanged.  Non-overlapping or preserving pairings
    are returned untouched.
    """
    a, b, c, d, rev = p._raw()
    if not rev or b < c:
        return p
    s = a + d
    new_b = -((-s) // 2) - 1        # ceil(s/2) - 1
    new_c = s // 2 + 1              # floor(s/2) + 1
    return Pairing.make((a, new_b), (new_c, d), True)


def merge_periodic(p1: Pairing, p2: Pairing) -> Pairing:
    """Replace two overlapping periodic pairings by one with gcd period.

    Requires both pairings periodic with positive periods t1, t2 and
    periodic intervals R1, R2 overlapping in at least t1 + t2 points.
    The result acts on R1 union R2 with period gcd(t1, t2) and has the
    same orbits there as the pair it replaces.
    """
    for p in (p1, p2):
        if not is_periodic(p) or p.translation < 1:
            raise MergeConditionError(f"{p} is not periodic with period >= 1")
    r1, r2 = periodic_interval(p1), periodic_interval(p2)
    t1, t2 = p1.translation, p2.translation
    overlap = min(r1.hi, r2.hi) - max(r1.lo, r2.lo) + 1
    if overlap < t1 + t2:
        raise MergeConditionError(
            f"periodic intervals overlap in {overlap} < t1 + t2 = {t1 + t2}")
    g = gcd(t1, t2)
    lo, hi = min(r1.lo, r2.lo), max(r1.hi, r2.hi)
    return Pairing.make((lo, hi - g), (lo + g, hi), False)


def _transmit_raw(mover: RawPairing, by: RawPairing) -> RawPairing:
    """Compose the mover with inverse powers of `by` (closed form).

    `by` must already be trimmed when reversing.  The mover's range must
    lie inside the range of `by`.  Exponents are computed by integer
    division on endpoints, never by iterated application.
    """
    a2, b2, c2, d2, rev2 = mover
    a1, b1, c1, d1, rev1 = by
    if not (c1 <= c2 and d2 <= d1):
        raise TransmissionError("mover's range not inside transmitter's range")
    dom_inside = c1 <= a2 and b2 <= d1
    if rev1:
        s = a1 + d1
        nc, nd = s - d2, s - c2
        if dom_inside:
            na, nb = s - b2, s - a2
            nrev = rev2
        else:
            na, nb = a2, b2
            nrev = not rev2
    else:
        t1 = c1 - a1
        if t1 <= 0:
            raise TransmissionError("transmitter is an identity pairing")
        r = (c2 - c1) // t1 + 1
        nc, nd = c2 - r * t1, d2 - r * t1
        if dom_inside:
            s_exp = (a2 - c1) // t1 + 1
            na, nb = a2 - s_exp * t1, b2 - s_exp * t1
        else:
            na, nb = a2, b2
        nrev = rev2
    return _canonical(na, nb, nc, nd, nrev)


def transmit(mover: Pairing, by: Pairing) -> Pairing:
    """Shift mover's range (and domain, when inside) down through `by`.

    Orbit-preserving.  The result may be an identity pairing; the
    counting algorithm deletes those at the start of the next cycle.
    """
    return Pairing.make(*_pairing_from_raw(_transmit_raw(mover._raw(),
                                                         trim(by)._raw())))


def _pairing_from_raw(raw: RawPairing):
    a, b, c, d, rev = raw
    return (a, b), (c, d), rev


def complexity_x(sys: PairingSystem) -> int:
    """X = 4^k * product of pairing widths (1 for the empty system)."""
    x = 1
    for p in sys.pairings:
        x *= 4 * p.width
    return x


def maximal_pairing(sys: PairingSystem) -> int:
    """Index of the maximum pairing under (d, -c, -a, preserving-first).

    Ties between identical tuples are broken by the smallest list index so
    runs are reproducible.
    """
    if not sys.pairings:
        raise EmptySystemError("system has no pairings")
    best, best_key = 0, None
    for i, p in enumerate(sys.pairings):
        key = (p.range.hi, -p.range.lo, -p.domain.lo, not p.reversing)
        if best_key is None or key > best_key:
            best, best_key = i, key
    return best


# ---------------------------------------------------------------------------
# The counting algorithm (pure-integer engine)
# ---------------------------------------------------------------------------

_STEP_IDENTITY = "identity"
_STEP_CONTRACT = "contract"
_STEP_TRIM = "trim"
_STEP_MERGE = "merge"
_STEP_TRANSMIT = "transmit"
_STEP_TRUNCATE = "truncate"


def _static_gaps(n: int, raws: Sequence[RawPairing]) -> List[Tuple[int, int]]:
    """Maximal subintervals of [1, n] meeting no domain and no range."""
    if n == 0:
        return []
    ivs = []
    for a, b, c, d, _ in raws:
        ivs.append((a, b))
        ivs.append((c, d))
    ivs.sort()
    gaps = []
    cur = 1
    for lo, hi in ivs:
        if lo > cur:
            gaps.append((cur, lo - 1))
        if hi >= cur:
            cur = hi + 1
    if cur <= n:
        gaps.append((cur, n))
    return gaps


def _shift_down(raws: List[RawPairing], gaps: Sequence[Tuple[int, int]]):
    """Renumber endpoints after removing the given static intervals."""
    starts = [g[0] for g in gaps]
    widths = []
    acc = 0
    for lo, hi in gaps:
        acc += hi - lo + 1
        widths.append(acc)
    from bisect import bisect_left

    def sh(x: int) -> int:
        i = bisect_left(starts, x)
        return x - (widths[i - 1] if i else 0)

    for i, (a, b, c, d, rev) in enumerate(raws):
        raws[i] = (sh(a), sh(b), sh(c), sh(d), rev)


class _MergeFound(Exception):
    pass


def _merge_pass(raws: List[RawPairing]) -> bool:
    """Merge one eligible pair of periodic pairings; True if merged."""
    per = [(i, r) for i, r in enumerate(raws)
           if not r[4] and r[2] <= r[1] + 1 and r[2] > r[0]]
    m = len(per)
    for u in range(m):
        i, (a1, b1, c1, d1, _) = per[u]
        t1 = c1 - a1
        for v in range(u + 1, m):
            j, (a2, b2, c2, d2, _) = per[v]
            t2 = c2 - a2
            overlap = min(d1, d2) - max(a1, a2) + 1
            if overlap >= t1 + t2:
                g = gcd(t1, t2)
                lo, hi = min(a1, a2), max(d1, d2)
                raws[i] = (lo, hi - g, lo + g, hi, False)
                del raws[j]
                return True
    return False


def count_orbits(sys: PairingSystem,
                 *,
                 keep_trace: bool = False,
                 on_cycle: Optional[Callable[[int, int, list, int], None]] = None,
                 tracker=None,
                 engine: str = "auto") -> int:
    """Exact number of orbits of the pairings acting on [1, n].

    ``keep_trace`` stores per-step instrumentation rows
    ``(cycle, step, n, k, X)`` on ``sys.trace``.  ``on_cycle(cycle, n,
    raw_pairings, counter)`` is invoked at every cycle boundary (used by
    conservation tests).  ``tracker`` is the weight-tracking hook used by
    the weighted variant.  ``engine`` selects "pure", "fast" (vectorized,
    machine-word endpoints) or "auto".
    """
    if engine not in ("auto", "pure", "fast"):
        raise InputError(f"unknown engine {engine!r}")
    use_fast = False
    if engine == "fast":
        use_fast = True
    elif engine == "auto" and sys.k >= 48 and on_cycle is None:
        use_fast = sys.n < (1 << 62)
    if use_fast:
        from ._engine_fast import count_orbits_fast
        return count_orbits_fast(sys, keep_trace=keep_trace, tracker=tracker)

    n = sys.n
    raws: List[RawPairing] = [p._raw() for p in sys.pairings]
    counter = 0
    trace: List[tuple] = []
    x = 1
    for a, b, _c, _d, _rev in raws:
        x *= 4 * (b - a + 1)

    def record(cycle: int, step: str):
        if keep_trace:
            trace.append((cycle, step, n, len(raws), x))

    cycle = 0
    while True:
        cycle += 1
        if on_cycle is not None:
            on_cycle(cycle, n, list(raws), counter)
        n_at_cycle_start = n

        # (1) delete identity restrictions
        kept = []
        for r in raws:
            if not r[4] and r[0] == r[2]:
                x //= 4 * (r[1] - r[0] + 1)
            else:
                kept.append(r)
        raws = kept
        record(cycle, _STEP_IDENTITY)

        # (2) contract static intervals
        gaps = _static_gaps(n, raws)
        if gaps:
            removed = sum(hi - lo + 1 for lo, hi in gaps)
            if tracker is not None:
                tracker.contract(gaps)
            counter += removed
            _shift_down(raws, gaps)
            n -= removed
        record(cycle, _STEP_CONTRACT)
        if not raws:
            if n != 0:
                raise InternalInvariantError("points left with no pairings")
            if keep_trace:
                sys.trace = trace
            return counter

        # (3) trim overlapping reversing pairings
        for i, (a, b, c, d, rev) in enumerate(raws):
            if rev and b >= c:
                s = a + d
                raws[i] = _canonical(a, -((-s) // 2) - 1, s // 2 + 1, d, True)
                x = x // (b - a + 1) * (raws[i][1] - raws[i][0] + 1)
        record(cycle, _STEP_TRIM)

        # (4) merge periodic pairings until stable
        while True:
            before = [(r[1] - r[0] + 1) for r in raws]
            if not _merge_pass(raws):
                break
            after = [(r[1] - r[0] + 1) for r in raws]
            num = 1
            for w in after:
                num *= 4 * w
            den = 1
            for w in before:
                den *= 4 * w
            x = x * num // den
        record(cycle, _STEP_MERGE)

        # (5) transmit everything inside the maximal pairing's range
        mi = 0
        mkey = None
        for i, (a, b, c, d, rev) in enumerate(raws):
            key = (d, -c, -a, not rev)
            if mkey is None or key > mkey:
                mi, mkey = i, key
        a1, b1, c1, d1, rev1 = raws[mi]
        if d1 != n:
            raise InternalInvariantError("maximal pairing misses the top")
        for j, r in enumerate(raws):
            if j != mi and c1 <= r[2] and r[3] <= n:
                raws[j] = _transmit_raw(r, raws[mi])
        record(cycle, _STEP_TRANSMIT)

        # (6) truncate the unique pairing reaching the top
        second = 0
        for j, r in enumerate(raws):
            if j != mi and r[3] > second:
                second = r[3]
        if second >= n:
            raise InternalInvariantError("top pairing not unique at step 6")
        new_n = max(second, c1 - 1)
        if tracker is not None:
            tracker.transfer(raws[mi], n)
        cut = n - new_n
        w_old = b1 - a1 + 1
        w_new = new_n - c1 + 1
        if w_new <= 0:
            del raws[mi]
            x //= 4 * w_old
        else:
            if rev1:
                raws[mi] = _canonical(a1 + cut, b1, c1, new_n, True)
            else:
                raws[mi] = _canonical(a1, b1 - cut, c1, new_n, False)
            x = x // w_old * w_new
        n = new_n
        record(cycle, _STEP_TRUNCATE)

        if n >= n_at_cycle_start:
            raise InternalInvariantError("interval width failed to decrease")


# ---------------------------------------------------------------------------
# Functional wrappers for the individual algorithm steps
# ---------------------------------------------------------------------------

def contract(sys: PairingSystem) -> Tuple[PairingSystem, int]:
    """Remove all static intervals; returns (new system, points removed).

    Each removed point was alone in its orbit, so the orbit counter grows
    by the removed width.
    """
    raws = [p._raw() for p in sys.pairings]
    gaps = _static_gaps(sys.n, raws)
    removed = sum(hi - lo + 1 for lo, hi in gaps)
    if removed:
        _shift_down(raws, gaps)
    out = PairingSystem(sys.n - removed,
                        [Pairing.make(*_pairing_from_raw(r)) for r in raws],
                        sys.orbit_counter + removed)
    return out, removed


def truncate(sys: PairingSystem) -> PairingSystem:
    """Apply one truncation at the top of the interval.

    Requires a unique pairing whose range reaches n (guaranteed after a
    transmission step); peels the largest top interval that meets no
    other pairing, shortening or eliminating that pairing.
    """
    if not sys.pairings:
        raise EmptySystemError("nothing to truncate")
    raws = [p._raw() for p in sys.pairings]
    tops = [i for i, r in enumerate(raws) if r[3] == sys.n]
    if len(tops) != 1:
        raise InternalInvariantError(
            f"{len(tops)} pairings reach the top; need exactly one")
    mi = tops[0]
    a1, b1, c1, d1, rev1 = raws[mi]
    if rev1 and b1 >= c1:
        raise InternalInvariantError("reversing pairing must be trimmed first")
    second = max((r[3] for j, r in enumerate(raws) if j != mi), default=0)
    new_n = max(second, c1 - 1)
    cut = sys.n - new_n
    w_new = new_n - c1 + 1
    if w_new <= 0:
        del raws[mi]
    elif rev1:
        raws[mi] = (a1 + cut, b1, c1, new_n, True)
    else:
        raws[mi] = _canonical(a1, b1 - cut, c1, new_n, False)
    return PairingSystem(new_n,
                         [Pairing.make(*_pairing_from_raw(r)) for r in raws],
                         sys.orbit_counter)


# ---------------------------------------------------------------------------
# Brute-force oracle
# ---------------------------------------------------------------------------

class UnionFind:
    __slots__ = ("parent", "rank")

    def __init__(self, size: int):
        self.parent = list(range(size))
        self.rank = [0] * size

    def find(self, x: int) -> int:
        p = self.parent
        root = x
        while p[root] != root:
            root = p[root]
        while p[x] != root:
            p[x], x = root, p[x]
        return root

    def union(self, x: int, y: int):
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return
        if self.rank[rx] < self.rank[ry]:
            rx, ry = ry, rx
        self.parent[ry] = rx
        if self.rank[rx] == self.rank[ry]:
            self.rank[rx] += 1


def _oracle_uf(sys: PairingSystem, cap: int) -> UnionFind:
    if sys.n > cap:
        raise OracleCapacityError(
            f"n = {sys.n} exceeds the oracle cap {cap}")
    n = int(sys.n)
    uf = UnionFind(n + 1)
    for p in sys.pairings:
        a, b, c, d, rev = p._raw()
        if rev:
            s = a + d
            for point in range(a, b + 1):
                uf.union(point, s - point)
        else:
            t = c - a
            for point in range(a, b + 1):
                uf.union(point, point + t)
    return uf


def count_orbits_oracle(sys: PairingSystem, cap: int = ORACLE_CAP) -> int:
    """Orbit count by materializing every point (linear in n; capped)."""
    if sys.n == 0:
        return 0
    uf = _oracle_uf(sys, cap)
    return len({uf.find(point) for point in range(1, int(sys.n) + 1)})


def orbit_partition(sys: PairingSystem, cap: int = ORACLE_CAP) -> List[List[int]]:
    """The actual orbits as sorted lists (oracle-side helper for tests)."""
    if sys.n == 0:
        return []
    uf = _oracle_uf(sys, cap)
    groups = {}
    for point in range(1, int(sys.n) + 1):
        groups.setdefault(uf.find(point), []).append(point)
    return sorted(groups.values())
