"""Normal surfaces in coordinate form, and their exact analysis.

A normal surface meets each tetrahedron in triangles (one type per
vertex) and quadrilaterals (one type per separating vertex pair); its
isotopy class is the vector of the 7 counts per tetrahedron.  Coordinate
layout: index ``7 * tet + j`` with ``j = 0..3`` the triangle cutting off
vertex ``j`` and ``j = 4, 5, 6`` the quadrilateral separating the vertex
pair ``{0,1} | {0,2} | {0,3}`` from the rest.

The analyzer converts a vector into a pairing system on its intersection
points with the edges (three interval pairings per face), counts surface
components with the orbit engine, splits coordinates per component with
the weighted engine, and reads off Euler characteristic, orientability,
boundary curves and genus.  Everything is exact; coordinates may be far
beyond machine range.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    InputError,
    NoBoundaryError,
    UnsupportedCaseError,
)
from .intervals import Pairing, PairingSystem, count_orbits
from .triangulation import (
    FACE_CORNERS,
    S4_ARR,
    Surface2D,
    Triangulation,
)
from .weights import SparseVec, WeightList, weighted_count

# quadrilateral coordinate index (4..6) separating the pair {a, b}
QUAD_PAIR = np.zeros((4, 4), dtype=np.int64)
for _a in range(4):
    for _b in range(4):
        if _a != _b:
            pair = {_a, _b} if 0 in (_a, _b) else {0, 1, 2, 3} - {_a, _b}
            QUAD_PAIR[_a, _b] = 3 + max(pair)

# coordinate indices crossing edge (a, b): both triangles, both quads
# that separate a from b
EDGE_COORDS: Dict[Tuple[int, int], Tuple[int, ...]] = {}
for _a in range(4):
    for _b in range(4):
        if _a != _b:
            quads = [q for q in (4, 5, 6) if q != QUAD_PAIR[_a, _b]]
            EDGE_COORDS[(_a, _b)] = (_a, _b, quads[0], quads[1])


class NormalVector:
    """Vector of elementary disk counts, dense or sparse, any size."""

    __slots__ = ("t", "_map")

    def __init__(self, t: int, mapping: Dict[int, int]):
        self.t = t
        self._map = mapping

    @staticmethod
    def dense(t: int, coords: Sequence[int]) -> "NormalVector":
        if len(coords) != 7 * t:
            raise InputError(f"need {7 * t} coordinates, got {len(coords)}")
        m = {i: int(v) for i, v in enumerate(coords) if v}
        return NormalVector(t, m)

    @staticmethod
    def sparse(t: int, support: Dict[int, int]) -> "NormalVector":
        for i, v in support.items():
            if not 0 <= i < 7 * t:
                raise InputError(f"coordinate index {i} out of range")
        return NormalVector(t, {int(i): int(v) for i, v in support.items()
                                if v})

    def get(self, i: int) -> int:
        return self._map.get(i, 0)

    def coords(self) -> List[int]:
        out = [0] * (7 * self.t)
        for i, v in self._map.items():
            out[i] = v
        return out

    def support(self) -> List[Tuple[int, int]]:
        return sorted(self._map.items())

    def support_tets(self) -> List[int]:
        return sorted({i // 7 for i in self._map})

    def scaled(self, k: int) -> "NormalVector":
        return NormalVector(self.t, {i: k * v for i, v in self._map.items()}
                            if k else {})

    def __add__(self, other: "NormalVector") -> "NormalVector":
        if self.t != other.t:
            raise InputError("mismatched triangulation sizes")
        m = dict(self._map)
        for i, v in other._map.items():
            w = m.get(i, 0) + v
            if w:
                m[i] = w
            else:
                del m[i]
        return NormalVector(self.t, m)

    def __eq__(self, other):
        return (isinstance(other, NormalVector) and self.t == other.t
                and self._map == other._map)

    def __hash__(self):
        return hash((self.t, frozenset(self._map.items())))

    def is_zero(self) -> bool:
        return not self._map

    def has_negative(self) -> bool:
        return any(v < 0 for v in self._map.values())

    def __repr__(self):
        return f"NormalVector(t={self.t}, nnz={len(self._map)})"


@dataclass(frozen=True)
class MatchingSystem:
    """Linear matching conditions v_i1 + v_i2 = v_i3 + v_i4, 3 per face."""

    equations: Tuple[Tuple[Tuple[int, int], Tuple[int, int]], ...]

    def __len__(self):
        return len(self.equations)


@dataclass
class Admissibility:
    ok: bool
    reason: Optional[str] = None

    def __bool__(self):
        return self.ok


@dataclass
class ComponentInfo:
    vector: NormalVector
    weight: int
    euler_characteristic: int
    orientable: bool
    boundary_components: int
    genus: Optional[int]


@dataclass
class ComponentReport:
    components: List[ComponentInfo]

    def __len__(self):
        return len(self.components)


@dataclass
class EdgeIndexing:
    """Global labels for surface-edge intersection points.

    Edge class ``e`` carries the labels ``offsets[e] + 1 ..
    offsets[e + 1]``, ordered along the class orientation.
    """

    edge_count: int
    weights: List[int]
    offsets: List[int]      # len edge_count + 1, offsets[0] == 0

    @property
    def total(self) -> int:
        return self.offsets[-1]


# ---------------------------------------------------------------------------
# admissibility
# ---------------------------------------------------------------------------

def matching_system(tri: Triangulation) -> MatchingSystem:
    """Three arc-count equations per interior face class."""
    eqs = []
    slots = tri._interior_one_side()
    for s in slots.tolist():
        t1, f1 = s // 4, s % 4
        t2 = int(tri.glue_tet[s])
        f2 = int(tri.glue_face[s])
        perm = S4_ARR[tri.glue_perm[s]]
        for x in FACE_CORNERS[f1]:
            sx = int(perm[x])
            eqs.append(((7 * t1 + x, 7 * t1 + int(QUAD_PAIR[x, f1])),
                        (7 * t2 + sx, 7 * t2 + int(QUAD_PAIR[sx, f2]))))
    return MatchingSystem(tuple(eqs))


def _arc_count(v: NormalVector, tet: int, face: int, corner: int) -> int:
    return (v.get(7 * tet + corner)
            + v.get(7 * tet + int(QUAD_PAIR[corner, face])))


def check_admissible(tri: Triangulation, v: NormalVector) -> Admissibility:
    """Matching, positivity and one-quad-type-per-tetrahedron conditions."""
    if v.t != tri.tets:
        raise InputError(
            f"vector is for {v.t} tetrahedra, triangulation has {tri.tets}")
    for i, val in v.support():
        if val < 0:
            return Admissibility(False,
                                 f"coordinate {i} is negative ({val})")
    for tet in v.support_tets():
        quads = [q for q in (4, 5, 6) if v.get(7 * tet + q) > 0]
        if len(quads) > 1:
            return Admissibility(
                False, f"tet {tet}: quadrilateral types "
                       f"{quads[0] - 3} and {quads[1] - 3} both positive")
    # matching conditions: only faces touching the support can fail
    seen = set()
    for tet in v.support_tets():
        for f in range(4):
            s = 4 * tet + f
            t2 = int(tri.glue_tet[s])
            if t2 < 0:
                continue
            key = min(s, 4 * t2 + int(tri.glue_face[s]))
            if key in seen:
                continue
            seen.add(key)
            f2 = int(tri.glue_face[s])
            perm = S4_ARR[tri.glue_perm[s]]
            for x in FACE_CORNERS[f]:
                lhs = _arc_count(v, tet, f, x)
                rhs = _arc_count(v, t2, f2, int(perm[x]))
                if lhs != rhs:
                    return Admissibility(
                        False,
                        f"face (tet {tet}, face {f}) corner {x}: "
                        f"arc counts {lhs} != {rhs}")
    return Admissibility(True)


def weight(tri: Triangulation, v: NormalVector) -> int:
    """Total number of intersection points with the 1-skeleton."""
    return sum(_edge_weights(tri, v).values())


def _edge_rep_slots(tri: Triangulation) -> Dict[int, Tuple[int, int, int]]:
    """Edge class -> (tet, tail, head) of its least oriented representative."""
    if "ereps" in tri._cache:
        return tri._cache["ereps"]
    tri._edge_data()
    ec = tri.edge_classes
    sign = tri.edge_signs
    reps: Dict[int, Tuple[int, int, int]] = {}
    pos = np.flatnonzero(sign > 0)
    order = pos[np.argsort(ec[pos], kind="stable")]
    pairs = _dir_pairs()
    seen = set()
    for s in order.tolist():
        k = int(ec[s])
        if k not in seen:
            seen.add(k)
            a, b = pairs[s % 12]
            reps[k] = (s // 12, a, b)
    tri._cache["ereps"] = reps
    return reps


def _dir_pairs() -> List[Tuple[int, int]]:
    out = []
    for a in range(4):
        for b in range(4):
            if a != b:
                out.append((a, b))
    return out


def _edge_weights(tri: Triangulation, v: NormalVector) -> Dict[int, int]:
    """Nonzero edge-class weights (intersection counts per edge class)."""
    tri._edge_data()
    ec = tri.edge_classes
    out: Dict[int, int] = {}
    from .triangulation import DIR12
    seen = set()
    for tet in v.support_tets():
        for (a, b), coords in EDGE_COORDS.items():
            if a > b:
                continue
            k = int(ec[12 * tet + DIR12[a * 4 + b]])
            if k in seen:
                continue
            seen.add(k)
            w = sum(v.get(7 * tet + j) for j in coords)
            if w:
                out[k] = w
    return out


# ---------------------------------------------------------------------------
# pairing extraction
# ---------------------------------------------------------------------------

def _edge_indexing(tri: Triangulation, v: NormalVector) -> EdgeIndexing:
    ew = _edge_weights(tri, v)
    ne = tri.edge_class_count
    weights = [0] * ne
    for k, w in ew.items():
        weights[k] = w
    offsets = [0] * (ne + 1)
    for k in range(ne):
        offsets[k + 1] = offsets[k] + weights[k]
    return EdgeIndexing(ne, weights, offsets)


def _point_label(idx: EdgeIndexing, klass: int, width: int, sign: int,
                 pos: int) -> int:
    """Global label of the point at `pos` (1-based from the slot's tail)."""
    if sign > 0:
        return idx.offsets[klass] + pos
    return idx.offsets[klass] + width - pos + 1


def _face_arc_pairings(tri, v, idx, tet, f, out):
    """Append the up-to-3 pairings of one face, seen from (tet, f).

    The r arcs cutting off corner x are nested around it; the k-th arc
    ends at the k-th intersection point from x on both adjacent edges,
    so the family is an interval isometry between the two label blocks.
    It preserves orientation exactly when the two edge orientations give
    the blocks the same direction of travel away from the corner.
    """
    from .triangulation import DIR12
    ec, sign = tri.edge_classes, tri.edge_signs
    corners = FACE_CORNERS[f]
    for x in corners:
        r = _arc_count(v, tet, f, x)
        if r == 0:
            continue
        y, z = [c for c in corners if c != x]
        ends = []
        for other in (y, z):
            s = 12 * tet + DIR12[x * 4 + other]
            k = int(ec[s])
            w = idx.weights[k]
            sgn = int(sign[s])
            first = _point_label(idx, k, w, sgn, 1)
            last = _point_label(idx, k, w, sgn, r)
            ends.append((first, last))
        (a1, ar), (b1, br) = ends
        ia = (min(a1, ar), max(a1, ar))
        ib = (min(b1, br), max(b1, br))
        reversing = (a1 <= ar) != (b1 <= br) and r > 1
        if ia == ib and not reversing:
            continue  # arcs join each point to itself: no identification
        out.append(Pairing.make(ia, ib, reversing))


def build_pairings(tri: Triangulation,
                   v: NormalVector) -> Tuple[PairingSystem, EdgeIndexing]:
    """Interval pairings joining intersection points across every face.

    Two labels are paired when a normal arc of the surface connects the
    corresponding points inside a face (boundary faces included: their
    arcs also join points of the surface).  At most three pairings per
    face class, hence at most 12t in total.
    """
    adm = check_admissible(tri, v)
    if not adm:
        raise InputError(f"vector is not admissible: {adm.reason}")
    idx = _edge_indexing(tri, v)
    pairings: List[Pairing] = []
    seen = set()
    for tet in v.support_tets():
        for f in range(4):
            s = 4 * tet + f
            t2 = int(tri.glue_tet[s])
            if t2 >= 0:
                key = min(s, 4 * t2 + int(tri.glue_face[s]))
            else:
                key = s
            if key in seen:
                continue
            seen.add(key)
            _face_arc_pairings(tri, v, idx, key // 4, key % 4, pairings)
    return PairingSystem(idx.total, pairings), idx


def count_components(tri: Triangulation, v: NormalVector) -> int:
    """Number of connected components of the normal surface."""
    if v.is_zero():
        return 0
    sys_, _ = build_pairings(tri, v)
    return count_orbits(sys_)


def euler_characteristic(tri: Triangulation, v: NormalVector) -> int:
    """V - E + F of the surface's cell structure.

    Vertices are the edge intersections, edges the normal arcs in the
    faces (counted once per face class), faces the elementary disks.
    """
    adm = check_admissible(tri, v)
    if not adm:
        raise InputError(f"vector is not admissible: {adm.reason}")
    pts = weight(tri, v)
    disks = sum(val for _, val in v.support())
    arcs = 0
    seen = set()
    for tet in v.support_tets():
        for f in range(4):
            s = 4 * tet + f
            t2 = int(tri.glue_tet[s])
            key = min(s, 4 * t2 + int(tri.glue_face[s])) if t2 >= 0 else s
            if key in seen:
                continue
            seen.add(key)
            arcs += sum(_arc_count(v, key // 4, key % 4, x)
                        for x in FACE_CORNERS[key % 4])
    return pts - arcs + disks


def check_orientable(tri: Triangulation, v: NormalVector) -> bool:
    """Whether a connected surface is orientable (doubling test).

    Doubling every coordinate yields the boundary of a thickening: two
    components exactly when the surface is two-sided, i.e. orientable in
    an orientable ambient manifold.
    """
    if not tri.is_orientable():
        raise UnsupportedCaseError(
            "ambient triangulation is not orientable")
    if count_components(tri, v) != 1:
        raise UnsupportedCaseError("surface is not connected; split first")
    return count_components(tri, v.scaled(2)) == 2


def genus(chi: int, boundary_count: int, orientable: bool) -> int:
    """Genus of a connected orientable surface from its characteristic."""
    if not orientable:
        raise UnsupportedCaseError("genus formula needs an orientable surface")
    if boundary_count == 0:
        g2 = 2 - chi
    elif boundary_count == 1:
        g2 = 1 - chi
    else:
        raise UnsupportedCaseError(
            f"{boundary_count} boundary components not supported")
    if g2 < 0 or g2 % 2:
        raise InputError(f"impossible Euler characteristic {chi}")
    return g2 // 2


# ---------------------------------------------------------------------------
# boundary curves
# ---------------------------------------------------------------------------

class NormalCurveVector:
    """Arc counts on a 2d triangulation: 3 per triangle, by corner."""

    __slots__ = ("tris", "_map")

    def __init__(self, tris: int, mapping: Dict[int, int]):
        self.tris = tris
        self._map = {int(i): int(v) for i, v in mapping.items() if v}

    @staticmethod
    def dense(tris: int, coords: Sequence[int]) -> "NormalCurveVector":
        if len(coords) != 3 * tris:
            raise InputError(f"need {3 * tris} coordinates")
        return NormalCurveVector(
            tris, {i: v for i, v in enumerate(coords) if v})

    def get(self, i: int) -> int:
        return self._map.get(i, 0)

    def coords(self) -> List[int]:
        out = [0] * (3 * self.tris)
        for i, v in self._map.items():
            out[i] = v
        return out

    def is_zero(self) -> bool:
        return not self._map


def boundary_curve(tri: Triangulation, v: NormalVector) \
        -> Tuple[Surface2D, NormalCurveVector]:
    """Restrict an admissible vector to the boundary triangulation."""
    if tri.is_closed():
        raise NoBoundaryError("triangulation is closed")
    surf = tri.boundary_surface()
    slots = surf.parent_slots
    mapping: Dict[int, int] = {}
    support = set(v.support_tets())
    for i, s in enumerate(slots.tolist()):
        tet, f = s // 4, s % 4
        if tet not in support:
            continue
        for j, x in enumerate(FACE_CORNERS[f]):
            r = _arc_count(v, tet, f, x)
            if r:
                mapping[3 * i + j] = r
    return surf, NormalCurveVector(surf.tris, mapping)


def curve_pairings(surf: Surface2D,
                   cv: NormalCurveVector) -> Tuple[PairingSystem, EdgeIndexing]:
    """Pairings of a normal curve's edge intersections (3 per triangle)."""
    klass, ne, sign = surf.edge_slot_classes()
    weights = [0] * ne
    for t in range(surf.tris):
        rs = [cv.get(3 * t + j) for j in range(3)]
        for e in range(3):
            p, q = [c for c in range(3) if c != e]
            w = rs[p] + rs[q]
            k = klass[3 * t + e]
            if weights[k] == 0:
                weights[k] = w
            elif weights[k] != w:
                raise InputError(
                    f"curve arc counts mismatch on edge class {k}")
    offsets = [0] * (ne + 1)
    for k in range(ne):
        offsets[k + 1] = offsets[k] + weights[k]
    idx = EdgeIndexing(ne, weights, offsets)
    pairings = []
    for t in range(surf.tris):
        rs = [cv.get(3 * t + j) for j in range(3)]
        for corner in range(3):
            r = rs[corner]
            if r == 0:
                continue
            ends = []
            for e in range(3):  # edges at the corner: those not opposite it
                if e == corner:
                    continue
                k = klass[3 * t + e]
                w = idx.weights[k]
                lo_c = min(c for c in range(3) if c != e)
                from_lo = corner == lo_c
                sgn = sign[3 * t + e]

                def lab(pi, k=k, w=w, from_lo=from_lo, sgn=sgn):
                    pos = pi if from_lo else w - pi + 1
                    return (idx.offsets[k] + pos if sgn > 0
                            else idx.offsets[k] + w - pos + 1)

                ends.append((lab(1), lab(r)))
            (a1, ar), (b1, br) = ends
            ia = (min(a1, ar), max(a1, ar))
            ib = (min(b1, br), max(b1, br))
            reversing = (a1 <= ar) != (b1 <= br) and r > 1
            if ia == ib and not reversing:
                continue
            pairings.append(Pairing.make(ia, ib, reversing))
    return PairingSystem(idx.total, pairings), idx


def count_curve_components(surf: Surface2D, cv: NormalCurveVector) -> int:
    if cv.is_zero():
        return 0
    sys_, _ = curve_pairings(surf, cv)
    return count_orbits(sys_)


def boundary_components(tri: Triangulation, v: NormalVector) -> int:
    """Number of circles in the surface's boundary curve."""
    surf, cv = boundary_curve(tri, v)
    return count_curve_components(surf, cv)


# ---------------------------------------------------------------------------
# per-component analysis
# ---------------------------------------------------------------------------

def _disk_edge_blocks(tri: Triangulation, v: NormalVector, tet: int):
    """(coord index j, edge class, sign, block lo..hi positions) per type.

    The block gives the positions (1-based from the slot's tail vertex)
    occupied by the type's parallel copies on its lexicographically least
    incident edge class.
    """
    from .triangulation import DIR12
    ec, sign = tri.edge_classes, tri.edge_signs
    out = []
    tcounts = [v.get(7 * tet + j) for j in range(7)]
    quad = next((j for j in (4, 5, 6) if tcounts[j] > 0), None)
    for j in range(7):
        cnt = tcounts[j]
        if cnt == 0:
            continue
        if j < 4:
            edges = [(j, o) for o in range(4) if o != j]
        else:
            pair0 = {0, j - 3}
            pair1 = {0, 1, 2, 3} - pair0
            edges = [(a, b) for a in pair0 for b in pair1]
        best = None
        for (a, b) in edges:
            s = 12 * tet + DIR12[a * 4 + b]
            k = int(ec[s])
            cand = (k, s)
            if best is None or cand < best:
                best = cand
                ba, bb = a, b
        k, s = best
        # block along edge (ba, bb), positions measured from ba:
        # triangles at ba first, then the quad family, then triangles at bb
        if j < 4:
            lo = 1  # triangle edges are listed with the corner first
        else:
            lo = tcounts[ba] + 1
        hi = lo + cnt - 1
        out.append((j, k, int(sign[s]), lo, hi, ba, bb))
    return out


def analyze_components(tri: Triangulation, v: NormalVector) -> ComponentReport:
    """Split a surface into components and report each one's topology.

    Puts one indicator weight per occurring disk type on a fixed edge, so
    each orbit's weight vector is exactly the component's coordinate
    vector; then derives weight, Euler characteristic, orientability,
    boundary circles and (when defined) genus per component.
    """
    adm = check_admissible(tri, v)
    if not adm:
        raise InputError(f"vector is not admissible: {adm.reason}")
    if v.is_zero():
        return ComponentReport([])
    sys_, idx = build_pairings(tri, v)
    from .weights import _Weights
    acc = _Weights([], SparseVec())
    for tet in v.support_tets():
        for (j, k, sgn, lo, hi, ba, bb) in _disk_edge_blocks(tri, v, tet):
            w = idx.weights[k]
            if sgn > 0:
                glo, ghi = idx.offsets[k] + lo, idx.offsets[k] + hi
            else:
                glo = idx.offsets[k] + w - hi + 1
                ghi = idx.offsets[k] + w - lo + 1
            acc.add_range(glo, ghi, SparseVec({7 * tet + j: 1}))
    acc.coalesce()
    L = WeightList.make([((lo, hi), vec) for lo, hi, vec in acc.segs], d=None)
    report = weighted_count(sys_, L)
    comps: List[ComponentInfo] = []
    has_boundary = not tri.is_closed()
    for iv, vec in report.entries:
        for _ in range(iv.width):
            cv = NormalVector.sparse(tri.tets, dict(vec.data))
            cw = weight(tri, cv)
            chi = euler_characteristic(tri, cv)
            orientable = check_orientable(tri, cv)
            bd = boundary_components(tri, cv) if has_boundary else 0
            g = None
            if orientable and bd <= 1:
                g = genus(chi, bd, True)
            comps.append(ComponentInfo(cv, cw, chi, orientable, bd, g))
    return ComponentReport(comps)
