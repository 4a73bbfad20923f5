"""Exact integer linear algebra for chain-complex computations.

Provides membership testing ``b in image(A)`` over the integers (used to
decide whether a knot class is null-homologous) and a dense Smith normal
form for small matrices (used as the fallback for the sparse elimination
and as an independent oracle in tests).

The sparse path repeatedly pivots on +-1 entries chosen by a Markowitz
fill score.  Clearing a pivot column needs only row operations, and once
the column is a unit vector the pivot row can be dropped outright, so the
residual system shrinks monotonically; boundary matrices of the complexes
built here almost always eliminate completely this way.
"""

from __future__ import annotations

import heapq
from typing import Dict, List, Sequence, Tuple


def smith_normal_form(mat: List[List[int]]) -> List[int]:
    """Diagonal invariant factors of an integer matrix (dense, in place)."""
    a = [row[:] for row in mat]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    divisors = []
    r = c = 0
    while r < rows and c < cols:
        # find a pivot with minimal absolute value
        best = None
        for i in range(r, rows):
            for j in range(c, cols):
                v = a[i][j]
                if v and (best is None or abs(v) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        i0, j0 = best
        a[r], a[i0] = a[i0], a[r]
        for row in a:
            row[c], row[j0] = row[j0], row[c]
        while True:
            piv = a[r][c]
            done = True
            for i in range(r + 1, rows):
                if a[i][c]:
                    q = a[i][c] // piv
                    for j in range(c, cols):
                        a[i][j] -= q * a[r][j]
                    if a[i][c]:
                        a[r], a[i] = a[i], a[r]
                        done = False
                        break
            if not done:
                continue
            for j in range(c + 1, cols):
                if a[r][j]:
                    q = a[r][j] // piv
                    for i in range(r, rows):
                        a[i][j] -= q * a[i][c]
                    if a[r][j]:
                        for row in a:
                            row[c], row[j] = row[j], row[c]
                        done = False
                        break
            if done:
                break
        # ensure the pivot divides every remaining entry
        piv = a[r][c]
        fixed = True
        for i in range(r + 1, rows):
            for j in range(c + 1, cols):
                if a[i][j] % piv:
                    for jj in range(c, cols):
                        a[r][jj] += a[i][jj]
                    fixed = False
                    break
            if not fixed:
                break
        if not fixed:
            continue
        divisors.append(abs(piv))
        r += 1
        c += 1
    return divisors


def solve_membership(rows: Sequence[Dict[int, int]], b: Dict[int, int],
                     ncols: int) -> bool:
    """Whether the sparse integer system A x = b has an integer solution.

    ``rows[i]`` maps column index to the entry A[i, j]; ``b`` maps row
    index to its right-hand side.
    """
    A: Dict[int, Dict[int, int]] = {
        i: dict(r) for i, r in enumerate(rows) if r}
    rhs: Dict[int, int] = {i: v for i, v in b.items() if v}
    cols: Dict[int, set] = {}
    for i, r in A.items():
        for j in r:
            cols.setdefault(j, set()).add(i)

    heap: List[Tuple[int, int, int]] = []
    for i, r in A.items():
        for j, v in r.items():
            if abs(v) == 1:
                score = (len(r) - 1) * (len(cols[j]) - 1)
                heapq.heappush(heap, (score, i, j))

    def push_units(i):
        r = A.get(i)
        if not r:
            return
        for j, v in r.items():
            if abs(v) == 1:
                heapq.heappush(
                    heap, ((len(r) - 1) * (len(cols[j]) - 1), i, j))

    while heap:
        _, i0, j0 = heapq.heappop(heap)
        row0 = A.get(i0)
        if row0 is None or abs(row0.get(j0, 0)) != 1:
            continue
        if row0[j0] == -1:
            A[i0] = row0 = {j: -v for j, v in row0.items()}
            if i0 in rhs:
                rhs[i0] = -rhs[i0]
        for i in list(cols[j0]):
            if i == i0:
                continue
            r = A[i]
            f = r.get(j0)
            if not f:
                continue
            for j, v in row0.items():
                w = r.get(j, 0) - f * v
                if w:
                    r[j] = w
                    cols.setdefault(j, set()).add(i)
                else:
                    r.pop(j, None)
                    cols[j].discard(i)
            nb = rhs.get(i, 0) - f * rhs.get(i0, 0)
            if nb:
                rhs[i] = nb
            else:
                rhs.pop(i, None)
            push_units(i)
        # row i0 now owns the only entry in column j0; dropping it just
        # fixes the variable x_{j0}, which is always possible
        for j in row0:
            cols[j].discard(i0)
        del A[i0]
        rhs.pop(i0, None)

    # residual: no +-1 entries remain
    live = {i for i, r in A.items() if r}
    for i in list(rhs):
        if i not in live and rhs[i]:
            return False
    if not live:
        return True
    live_rows = sorted(live)
    live_cols = sorted({j for i in live_rows for j in A[i]})
    cmap = {j: k for k, j in enumerate(live_cols)}
    dense = [[0] * (len(live_cols) + 1) for _ in live_rows]
    dense_a = [[0] * len(live_cols) for _ in live_rows]
    for k, i in enumerate(live_rows):
        for j, v in A[i].items():
            dense_a[k][cmap[j]] = v
            dense[k][cmap[j]] = v
        dense[k][-1] = rhs.get(i, 0)
    return smith_normal_form(dense_a) == smith_normal_form(dense)


def homology_ranks(d1: Sequence[Dict[int, int]], n1: int,
                   d2: Sequence[Dict[int, int]], n2: int) -> Tuple[int, List[int]]:
    """(free rank, torsion divisors) of ker(d1)/im(d2), dense computation.

    ``d1`` has one row per 0-cell (columns: 1-cells, count n1); ``d2`` one
    row per 1-cell (columns: 2-cells, count n2).  Intended for small
    fixtures and oracle checks only.
    """
    m0 = len(d1)
    a1 = [[0] * n1 for _ in range(m0)]
    for i, r in enumerate(d1):
        for j, v in r.items():
            a1[i][j] = v
    a2 = [[0] * n2 for _ in range(len(d2))]
    for i, r in enumerate(d2):
        for j, v in r.items():
            a2[i][j] = v
    s1 = smith_normal_form(a1) if m0 and n1 else []
    rank1 = len([x for x in s1 if x])
    s2 = smith_normal_form(a2) if d2 and n2 else []
    rank2 = len([x for x in s2 if x])
    torsion = [x for x in s2 if x > 1]
    free = n1 - rank1 - rank2
    return free, torsion
