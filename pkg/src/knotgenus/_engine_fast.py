"""Vectorized variant of the orbit counting engine.

Runs the same six-step cycle as :func:`knotgenus.intervals.count_orbits`
on numpy int64 arrays, for systems whose endpoints fit machine words and
whose pairing count makes per-cycle Python scans expensive.  Step
semantics, traces and tracker hooks match the pure engine exactly; the
test suite cross-checks the two on randomized systems.
"""

from __future__ import annotations

from math import gcd, prod

import numpy as np

from .errors import InternalInvariantError

_STEPS = ("identity", "contract", "trim", "merge", "transmit", "truncate")


def count_orbits_fast(sys, *, keep_trace: bool = False, tracker=None) -> int:
    n = int(sys.n)
    k0 = len(sys.pairings)
    a = np.empty(k0, dtype=np.int64)
    b = np.empty(k0, dtype=np.int64)
    c = np.empty(k0, dtype=np.int64)
    d = np.empty(k0, dtype=np.int64)
    rev = np.empty(k0, dtype=bool)
    for i, p in enumerate(sys.pairings):
        a[i], b[i], c[i], d[i], rev[i] = p._raw()

    counter = 0
    trace = []
    x = prod(4 * (int(bb) - int(aa) + 1) for aa, bb in zip(a, b)) if k0 else 1

    def record(cycle, step):
        if keep_trace:
            trace.append((cycle, step, n, a.size, x))

    cycle = 0
    while True:
        cycle += 1
        n_start = n

        # (1) delete identity restrictions
        ident = (~rev) & (a == c)
        if ident.any():
            for w in (b[ident] - a[ident] + 1).tolist():
                x //= 4 * w
            keep = ~ident
            a, b, c, d, rev = a[keep], b[keep], c[keep], d[keep], rev[keep]
        record(cycle, "identity")

        # (2) contract static intervals
        gaps = _static_gaps_np(n, a, b, c, d)
        if gaps:
            removed = sum(hi - lo + 1 for lo, hi in gaps)
            if tracker is not None:
                tracker.contract(gaps)
            counter += removed
            starts = np.fromiter((g[0] for g in gaps), dtype=np.int64)
            cum = np.cumsum(
                np.fromiter((g[1] - g[0] + 1 for g in gaps), dtype=np.int64))
            for arr in (a, b, c, d):
                idx = np.searchsorted(starts, arr, side="left")
                np.subtract(arr, np.where(idx > 0, cum[idx - 1], 0), out=arr)
            n -= removed
        record(cycle, "contract")
        if a.size == 0:
            if n != 0:
                raise InternalInvariantError("points left with no pairings")
            if keep_trace:
                sys.trace = trace
            return counter

        # (3) trim overlapping reversing pairings
        tmask = rev & (b >= c)
        if tmask.any():
            old_w = (b[tmask] - a[tmask] + 1).tolist()
            s = a[tmask] + d[tmask]
            b[tmask] = (s + 1) // 2 - 1
            c[tmask] = s // 2 + 1
            rev[tmask & (b == a)] = False
            new_w = (b[tmask] - a[tmask] + 1).tolist()
            for ow, nw in zip(old_w, new_w):
                x = x // ow * nw
        record(cycle, "trim")

        # (4) merge periodic pairings until stable
        pmask = (~rev) & (c <= b + 1) & (c > a)
        if np.count_nonzero(pmask) >= 2:
            idxs = np.flatnonzero(pmask)
            per = [(int(a[i]), int(b[i]), int(c[i]), int(d[i])) for i in idxs]
            merged_rows, dead = _merge_all(per)
            if dead:
                deadset = set(dead)
                before = prod(4 * (r[1] - r[0] + 1) for r in per)
                after = 1
                for i, row in enumerate(merged_rows):
                    if i in deadset:
                        continue
                    r = row if row is not None else per[i]
                    after *= 4 * (r[1] - r[0] + 1)
                x = x // before * after
                for i, row in enumerate(merged_rows):
                    if row is not None and i not in deadset:
                        j = idxs[i]
                        a[j], b[j], c[j], d[j] = row
                keep = np.ones(a.size, dtype=bool)
                for i in dead:
                    keep[idxs[i]] = False
                a, b, c, d, rev = a[keep], b[keep], c[keep], d[keep], rev[keep]
        record(cycle, "merge")

        # (5) transmit everything inside the maximal pairing's range
        dmax = int(d.max())
        if dmax != n:
            raise InternalInvariantError("maximal pairing misses the top")
        cand = np.flatnonzero(d == dmax)
        if cand.size > 1:
            cand = cand[c[cand] == c[cand].min()]
        if cand.size > 1:
            cand = cand[a[cand] == a[cand].min()]
        if cand.size > 1:
            pres = cand[~rev[cand]]
            if pres.size:
                cand = pres
        mi = int(cand[0])
        a1, b1, c1, d1 = int(a[mi]), int(b[mi]), int(c[mi]), int(d[mi])
        rev1 = bool(rev[mi])
        tmask = c >= c1
        tmask[mi] = False
        if tmask.any():
            dom_in = tmask & (a >= c1) & (b <= d1)
            rng_only = tmask & ~dom_in
            if rev1:
                s = a1 + d1
                nc, nd = s - d[tmask], s - c[tmask]
                c[tmask], d[tmask] = nc, nd
                na, nb = s - b[dom_in], s - a[dom_in]
                a[dom_in], b[dom_in] = na, nb
                rev[rng_only] = ~rev[rng_only]
            else:
                t1 = c1 - a1
                r = (c[tmask] - c1) // t1 + 1
                c[tmask] = c[tmask] - r * t1
                d[tmask] = d[tmask] - r * t1
                s_exp = (a[dom_in] - c1) // t1 + 1
                a[dom_in] = a[dom_in] - s_exp * t1
                b[dom_in] = b[dom_in] - s_exp * t1
            # canonicalize: domain is the interval with the smaller left end
            swap = tmask & ((c < a) | ((c == a) & (d < b)))
            if swap.any():
                ta, tb = a[swap].copy(), b[swap].copy()
                a[swap], b[swap] = c[swap], d[swap]
                c[swap], d[swap] = ta, tb
            rev[tmask & (a == b)] = False
        record(cycle, "transmit")

        # (6) truncate the unique pairing reaching the top
        dm = d[mi]
        d[mi] = -1
        second = int(d.max()) if d.size > 1 else 0
        d[mi] = dm
        if second >= n:
            raise InternalInvariantError("top pairing not unique at step 6")
        new_n = max(second, c1 - 1, 0)
        if tracker is not None:
            tracker.transfer((a1, b1, c1, d1, rev1), n)
        cut = n - new_n
        w_old = b1 - a1 + 1
        w_new = new_n - c1 + 1
        if w_new <= 0:
            keep = np.ones(a.size, dtype=bool)
            keep[mi] = False
            a, b, c, d, rev = a[keep], b[keep], c[keep], d[keep], rev[keep]
            x //= 4 * w_old
        else:
            if rev1:
                a[mi] = a1 + cut
                d[mi] = new_n
            else:
                b[mi] = b1 - cut
                d[mi] = new_n
            if w_new == 1:
                rev[mi] = False
            x = x // w_old * w_new
        n = new_n
        record(cycle, "truncate")

        if n >= n_start:
            raise InternalInvariantError("interval width failed to decrease")


def _static_gaps_np(n, a, b, c, d):
    los = np.concatenate([a, c])
    his = np.concatenate([b, d])
    order = np.argsort(los, kind="stable")
    slos, shis = los[order], his[order]
    run = np.maximum.accumulate(shis)
    gaps = []
    first = int(slos[0]) if slos.size else n + 1
    if first > 1:
        gaps.append((1, first - 1))
    if slos.size:
        starts = slos[1:]
        prev = run[:-1]
        hole = starts > prev + 1
        for lo, hi in zip((prev[hole] + 1).tolist(), (starts[hole] - 1).tolist()):
            gaps.append((lo, hi))
        tail = int(run[-1])
        if tail < n:
            gaps.append((tail + 1, n))
    return gaps


def _merge_all(per):
    """Merge periodic rows (a, b, c, d) until stable.

    Returns (rows, dead): rows[i] is the final row or None when unchanged;
    dead lists indices eliminated by merging into another row.
    """
    rows = list(per)
    alive = list(range(len(rows)))
    dead = []
    changed_idx = set()
    progress = True
    while progress:
        progress = False
        m = len(alive)
        for u in range(m):
            i = alive[u]
            a1, b1, c1, d1 = rows[i]
            t1 = c1 - a1
            for v in range(u + 1, m):
                j = alive[v]
                a2, b2, c2, d2 = rows[j]
                t2 = c2 - a2
                if min(d1, d2) - max(a1, a2) + 1 >= t1 + t2:
                    g = gcd(t1, t2)
                    lo, hi = min(a1, a2), max(d1, d2)
                    rows[i] = (lo, hi - g, lo + g, hi)
                    changed_idx.add(i)
                    dead.append(j)
                    alive.remove(j)
                    progress = True
                    break
            if progress:
                break
    out = [rows[i] if i in changed_idx else None for i in range(len(rows))]
    return out, dead
