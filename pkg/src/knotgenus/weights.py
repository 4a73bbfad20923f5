"""Orbit counting with per-point integer weight vectors.

Each point of ``[1, n]`` carries a nonnegative vector in Z^d, stored as a
sorted list of constant-weight intervals (absent intervals mean the zero
vector).  ``weighted_count`` runs the same simplification cycle as the
unweighted engine while conserving, for every orbit, the sum of the
weights over the orbit.  Weights are moved off an interval about to be
truncated by the *transfer* operation, which pushes them onto smaller
orbit representatives through the truncated pairing.

Weight vectors may be dense tuples of ints or :class:`SparseVec` (used
when d is huge, e.g. one coordinate per elementary disk type of a large
triangulation).
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .errors import InputError, OracleCapacityError
from .intervals import (
    ORACLE_CAP,
    Interval,
    Pairing,
    PairingSystem,
    RawPairing,
    _oracle_uf,
    count_orbits,
    trim,
)


class SparseVec:
    """Immutable sparse integer vector (only nonzero coordinates stored)."""

    __slots__ = ("data",)

    def __init__(self, data: Optional[Dict[int, int]] = None):
        if data:
            self.data = {i: v for i, v in data.items() if v}
        else:
            self.data = {}

    def __add__(self, other: "SparseVec") -> "SparseVec":
        if not isinstance(other, SparseVec):
            return NotImplemented
        out = dict(self.data)
        for i, v in other.data.items():
            w = out.get(i, 0) + v
            if w:
                out[i] = w
            else:
                del out[i]
        res = SparseVec.__new__(SparseVec)
        res.data = out
        return res

    def scaled(self, s: int) -> "SparseVec":
        res = SparseVec.__new__(SparseVec)
        res.data = {i: v * s for i, v in self.data.items()} if s else {}
        return res

    def __eq__(self, other) -> bool:
        return isinstance(other, SparseVec) and self.data == other.data

    def __hash__(self):
        return hash(frozenset(self.data.items()))

    def __bool__(self) -> bool:
        return bool(self.data)

    def __repr__(self):
        return f"SparseVec({self.data!r})"


Vec = Union[Tuple[int, ...], SparseVec]


def _vadd(u: Vec, v: Vec) -> Vec:
    if isinstance(u, SparseVec):
        return u + v
    return tuple(x + y for x, y in zip(u, v))


def _vscale(u: Vec, s: int) -> Vec:
    if isinstance(u, SparseVec):
        return u.scaled(s)
    return tuple(x * s for x in u)


def _vzero_like(u: Vec) -> Vec:
    if isinstance(u, SparseVec):
        return SparseVec()
    return (0,) * len(u)


def _is_zero(u: Vec) -> bool:
    if isinstance(u, SparseVec):
        return not u
    return not any(u)


class _Weights:
    """Mutable sorted list of disjoint (lo, hi, vec) with nonzero vec."""

    __slots__ = ("segs", "zero")

    def __init__(self, segs: List[List], zero: Vec):
        self.segs = segs          # each [lo, hi, vec]
        self.zero = zero

    def copy(self) -> "_Weights":
        return _Weights([list(s) for s in self.segs], self.zero)

    def _los(self):
        return [s[0] for s in self.segs]

    def _split_at(self, x: int):
        """Ensure no segment straddles the boundary between x-1 and x."""
        i = bisect_right(self._los(), x) - 1
        if i >= 0:
            lo, hi, vec = self.segs[i]
            if lo < x <= hi:
                self.segs[i] = [lo, x - 1, vec]
                self.segs.insert(i + 1, [x, hi, vec])

    def pieces(self, lo: int, hi: int, include_zero: bool = False):
        """Constant-weight pieces covering [lo, hi] (clipped)."""
        out = []
        cur = lo
        los = self._los()
        i = bisect_right(los, lo) - 1
        if i < 0:
            i = 0
        while i < len(self.segs) and self.segs[i][0] <= hi:
            slo, shi, vec = self.segs[i]
            if shi < lo:
                i += 1
                continue
            plo, phi = max(slo, lo), min(shi, hi)
            if include_zero and plo > cur:
                out.append((cur, plo - 1, self.zero))
            out.append((plo, phi, vec))
            cur = phi + 1
            i += 1
        if include_zero and cur <= hi:
            out.append((cur, hi, self.zero))
        return out

    def zero_range(self, lo: int, hi: int):
        self._split_at(lo)
        self._split_at(hi + 1)
        los = self._los()
        i = bisect_left(los, lo)
        j = bisect_left(los, hi + 1)
        del self.segs[i:j]

    def add_range(self, lo: int, hi: int, vec: Vec):
        if _is_zero(vec):
            return
        self._split_at(lo)
        self._split_at(hi + 1)
        los = self._los()
        i = bisect_left(los, lo)
        cur = lo
        inserts = []
        while cur <= hi:
            if i < len(self.segs) and self.segs[i][0] == cur:
                s = self.segs[i]
                s[2] = _vadd(s[2], vec)
                cur = s[1] + 1
                i += 1
            else:
                nxt = self.segs[i][0] - 1 if i < len(self.segs) else hi
                nxt = min(nxt, hi)
                inserts.append((i, [cur, nxt, vec]))
                cur = nxt + 1
        for off, (pos, seg) in enumerate(inserts):
            self.segs.insert(pos + off, seg)
        # drop entries that became zero
        self.segs = [s for s in self.segs
                     if not (lo <= s[0] <= hi and _is_zero(s[2]))]

    def remove_and_shift(self, gaps: Sequence[Tuple[int, int]]):
        """Delete the gap intervals and renumber everything above them."""
        for lo, hi in gaps:
            self.zero_range(lo, hi)
        starts = [g[0] for g in gaps]
        acc, cum = 0, []
        for lo, hi in gaps:
            acc += hi - lo + 1
            cum.append(acc)

        def sh(x):
            i = bisect_left(starts, x)
            return x - (cum[i - 1] if i else 0)

        for s in self.segs:
            s[0], s[1] = sh(s[0]), sh(s[1])

    def coalesce(self):
        out = []
        for s in self.segs:
            if out and out[-1][1] + 1 == s[0] and out[-1][2] == s[2]:
                out[-1][1] = s[1]
            else:
                out.append(s)
        self.segs = out

    def segment_count(self, n: int) -> int:
        """Number of maximal constant-weight intervals covering [1, n]."""
        if n == 0:
            return 0
        self.coalesce()
        count, cur = 0, 1
        for lo, hi, _ in self.segs:
            if lo > cur:
                count += 1
            count += 1
            cur = hi + 1
        if cur <= n:
            count += 1
        return count

    def total(self) -> Vec:
        tot = self.zero
        for lo, hi, vec in self.segs:
            tot = _vadd(tot, _vscale(vec, hi - lo + 1))
        return tot


@dataclass(frozen=True)
class WeightList:
    """Sorted disjoint constant-weight intervals; gaps mean zero weight."""

    d: Optional[int]
    entries: Tuple[Tuple[Interval, Vec], ...]

    @staticmethod
    def make(entries: Sequence[Tuple[Tuple[int, int], Vec]],
             d: Optional[int] = None) -> "WeightList":
        dims = {len(v) for _, v in entries if not isinstance(v, SparseVec)}
        if len(dims) > 1:
            raise InputError(f"mixed weight dimensions {sorted(dims)}")
        if d is None and dims:
            d = dims.pop()
        elif dims and d not in dims:
            raise InputError(f"weight dimension {dims.pop()} != d = {d}")
        segs = sorted(((lo, hi, v) for (lo, hi), v in entries
                       if not _is_zero(v)))
        prev_hi = 0
        merged: List[List] = []
        for lo, hi, v in segs:
            if lo > hi:
                raise InputError(f"empty weight interval [{lo}, {hi}]")
            if lo <= prev_hi:
                raise InputError("weight intervals overlap")
            prev_hi = hi
            if merged and merged[-1][1] + 1 == lo and merged[-1][2] == v:
                merged[-1][1] = hi
            else:
                merged.append([lo, hi, v])
        return WeightList(d, tuple((Interval(lo, hi), v)
                                   for lo, hi, v in merged))

    def zero_vec(self) -> Vec:
        if self.d is None:
            return SparseVec()
        return (0,) * self.d

    def _mutable(self) -> _Weights:
        return _Weights([[iv.lo, iv.hi, v] for iv, v in self.entries],
                        self.zero_vec())

    def total(self) -> Vec:
        return self._mutable().total()

    def segment_count(self, n: int) -> int:
        return self._mutable().segment_count(n)


@dataclass(frozen=True)
class OrbitWeightReport:
    """Orbit totals: each entry stands for `width` orbits of equal weight."""

    entries: Tuple[Tuple[Interval, Vec], ...]

    @property
    def orbit_count(self) -> int:
        return sum(iv.width for iv, _ in self.entries)

    def weight_multiset(self) -> List[Vec]:
        out = []
        for iv, v in self.entries:
            out.extend([v] * iv.width)
        return sorted(out, key=_vec_sort_key)


def _vec_sort_key(v: Vec):
    if isinstance(v, SparseVec):
        return tuple(sorted(v.data.items()))
    return v


def _transfer_into(w: _Weights, raw: RawPairing):
    """Move the weights on the pairing's range onto smaller representatives."""
    a, b, c, d, rev = raw
    if not rev and a == c:
        return  # identity pairing: weights are already on their preimages
    pieces = w.pieces(c, d)
    w.zero_range(c, d)
    if rev:
        # reflection preimage (pairing assumed trimmed: b < c)
        s = a + d
        for rj, sj, vj in pieces:
            w.add_range(s - sj, s - rj, vj)
    elif b < c:
        t = c - a
        for rj, sj, vj in pieces:
            w.add_range(rj - t, sj - t, vj)
    else:
        # periodic: fold weights onto the representatives [a, c-1]
        t = c - a
        for rj, sj, vj in pieces:
            wj = sj - rj + 1
            base = wj // t
            if base:
                w.add_range(a, c - 1, _vscale(vj, base))
            rem = wj - base * t
            if rem:
                wlo = rj + base * t
                off = (wlo - a) % t
                first = min(rem, t - off)
                w.add_range(a + off, a + off + first - 1, vj)
                if rem > first:
                    w.add_range(a, a + rem - first - 1, vj)


def transfer(p: Pairing, L: WeightList) -> WeightList:
    """Zero the weights on p's range, preserving every orbit's total.

    A reversing pairing with overlapping ends is trimmed first, exactly as
    the counting algorithm does; the zeroed interval is then the trimmed
    range.  The number of distinct constant-weight intervals grows by at
    most four.
    """
    p = trim(p)
    w = L._mutable()
    _transfer_into(w, p._raw())
    w.coalesce()
    return WeightList.make([((lo, hi), v) for lo, hi, v in w.segs], L.d)


class _WeightTracker:
    """Engine hooks maintaining (L, L') during a weighted counting run."""

    def __init__(self, L: WeightList):
        self.w = L._mutable()
        self.zero = L.zero_vec()
        self.out: List[Tuple[int, Vec]] = []
        self.transfer_growth: List[Tuple[int, int]] = []

    def contract(self, gaps: Sequence[Tuple[int, int]]):
        for lo, hi in gaps:
            for plo, phi, vec in self.w.pieces(lo, hi, include_zero=True):
                self.out.append((phi - plo + 1, vec))
        self.w.remove_and_shift(gaps)

    def transfer(self, raw: RawPairing, n: int):
        before = self.w.segment_count(n)
        _transfer_into(self.w, raw)
        after = self.w.segment_count(n)
        self.transfer_growth.append((before, after))


def weighted_count(sys: PairingSystem, L: WeightList, *,
                   keep_trace: bool = False,
                   engine: str = "auto",
                   growth_log: Optional[list] = None) -> OrbitWeightReport:
    """Count orbits and report the exact weight total of every orbit.

    The report lists intervals of equal-weight orbits in the order their
    points were retired by the algorithm; entries are never coalesced.
    """
    for iv, _ in L.entries:
        if iv.lo < 1 or iv.hi > sys.n:
            raise InputError(f"weight interval {iv} outside [1, {sys.n}]")
    tracker = _WeightTracker(L)
    count_orbits(sys, keep_trace=keep_trace, tracker=tracker, engine=engine)
    if growth_log is not None:
        growth_log.extend(tracker.transfer_growth)
    entries = []
    label = 1
    for width, vec in tracker.out:
        entries.append((Interval(label, label + width - 1), vec))
        label += width
    return OrbitWeightReport(tuple(entries))


def weighted_count_oracle(sys: PairingSystem, L: WeightList,
                          cap: int = ORACLE_CAP) -> OrbitWeightReport:
    """Per-orbit weights by materializing every point (capped)."""
    if sys.n > cap:
        raise OracleCapacityError(f"n = {sys.n} exceeds the oracle cap {cap}")
    if sys.n == 0:
        return OrbitWeightReport(())
    uf = _oracle_uf(sys, cap)
    zero = L.zero_vec()
    acc: Dict[int, Vec] = {}
    order: List[int] = []
    for point in range(1, int(sys.n) + 1):
        root = uf.find(point)
        if root not in acc:
            acc[root] = zero
            order.append(root)
    w = L._mutable()
    for lo, hi, vec in w.segs:
        for point in range(lo, hi + 1):
            root = uf.find(point)
            acc[root] = _vadd(acc[root], vec)
    entries = []
    for i, root in enumerate(order, start=1):
        entries.append((Interval(i, i), acc[root]))
    return OrbitWeightReport(tuple(entries))
