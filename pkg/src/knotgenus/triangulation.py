"""Triangulated compact 3-manifolds as face-glued tetrahedra.

A :class:`Triangulation` is a list of abstract tetrahedra (vertices
labeled 0..3, face ``f`` is the one opposite vertex ``f``) plus a gluing
table: each (tetrahedron, face) is either boundary or glued to another
(tetrahedron, face) by a permutation of the four vertex labels sending
the face index to the partner face index.  Loops and multi-edges are
allowed (a Delta-complex, not a simplicial complex), which is essential
for the small templates used elsewhere in the package.

Derived data (vertex, edge and face identification classes, boundary
surface, orientability) is computed lazily with vectorized union-find via
``scipy.sparse.csgraph`` so that complexes with millions of tetrahedra
remain workable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import InputError, InternalInvariantError, StructureError
from .homology import homology_ranks, smith_normal_form, solve_membership

# all 24 permutations of (0,1,2,3), index-stable
S4: Tuple[Tuple[int, int, int, int], ...] = tuple(
    (a, b, c, d)
    for a in range(4) for b in range(4) for c in range(4) for d in range(4)
    if len({a, b, c, d}) == 4)
S4_INDEX: Dict[Tuple[int, int, int, int], int] = {p: i for i, p in enumerate(S4)}
S4_ARR = np.array(S4, dtype=np.int8)
S4_INV = np.array([S4_INDEX[tuple(int(np.argmax(S4_ARR[i] == v))
                                  for v in range(4))] for i in range(24)],
                  dtype=np.int8)
S4_SIGN = np.array([1 if sum(1 for i in range(4) for j in range(i + 1, 4)
                             if p[i] > p[j]) % 2 == 0 else -1
                    for p in S4], dtype=np.int8)

TET_EDGES: Tuple[Tuple[int, int], ...] = (
    (0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
EDGE_INDEX = {e: i for i, e in enumerate(TET_EDGES)}
for (u, v), i in list(EDGE_INDEX.items()):
    EDGE_INDEX[(v, u)] = i
# ordered vertex pairs -> 0..11
DIR12 = -np.ones(16, dtype=np.int64)
_k = 0
for _a in range(4):
    for _b in range(4):
        if _a != _b:
            DIR12[_a * 4 + _b] = _k
            _k += 1
FACE_CORNERS: Tuple[Tuple[int, int, int], ...] = tuple(
    tuple(v for v in range(4) if v != f) for f in range(4))
# unordered vertex pairs -> 0..5 (diagonal entries unused)
UND6 = -np.ones(16, dtype=np.int64)
for _i, (_a, _b) in enumerate(TET_EDGES):
    UND6[_a * 4 + _b] = _i
    UND6[_b * 4 + _a] = _i

GluingEntry = Optional[Tuple[int, int, Tuple[int, int, int, int]]]


def _components(n_nodes: int, pairs_a: np.ndarray, pairs_b: np.ndarray):
    """Connected-component labels for an undirected graph on n nodes."""
    if pairs_a.size == 0:
        return np.arange(n_nodes, dtype=np.int64), n_nodes
    data = np.ones(pairs_a.size, dtype=np.int8)
    g = coo_matrix((data, (pairs_a, pairs_b)), shape=(n_nodes, n_nodes))
    ncomp, labels = connected_components(g, directed=False)
    return labels.astype(np.int64), ncomp


class Triangulation:
    """Compact 3-manifold triangulation with lazily derived cell classes."""

    def __init__(self, tets: int, gluings: Sequence[Sequence[GluingEntry]]):
        if tets < 0 or len(gluings) != tets:
            raise InputError("gluing table size does not match tets")
        self.tets = tets
        glue_tet = np.full(4 * tets, -1, dtype=np.int64)
        glue_face = np.zeros(4 * tets, dtype=np.int8)
        glue_perm = np.zeros(4 * tets, dtype=np.int8)
        for t, row in enumerate(gluings):
            if len(row) != 4:
                raise InputError(f"tet {t} needs 4 gluing entries")
            for f, entry in enumerate(row):
                if entry is None:
                    continue
                t2, f2, perm = entry
                perm = tuple(perm)
                if sorted(perm) != [0, 1, 2, 3]:
                    raise StructureError(f"bad permutation {perm}")
                if not (0 <= t2 < tets):
                    raise StructureError(f"gluing target {t2} out of range")
                if perm[f] != f2:
                    raise StructureError(
                        f"perm {perm} does not send face {f} to {f2}")
                s = 4 * t + f
                glue_tet[s] = t2
                glue_face[s] = f2
                glue_perm[s] = S4_INDEX[perm]
        self.glue_tet = glue_tet
        self.glue_face = glue_face
        self.glue_perm = glue_perm
        self._check_involution()
        self._cache: Dict[str, object] = {}

    @classmethod
    def from_arrays(cls, glue_tet, glue_face, glue_perm):
        obj = cls.__new__(cls)
        obj.tets = glue_tet.size // 4
        obj.glue_tet = glue_tet.astype(np.int64)
        obj.glue_face = glue_face.astype(np.int8)
        obj.glue_perm = glue_perm.astype(np.int8)
        obj._check_involution()
        obj._cache = {}
        return obj

    def _check_involution(self):
        slots = np.flatnonzero(self.glue_tet >= 0)
        t2 = self.glue_tet[slots]
        f2 = self.glue_face[slots].astype(np.int64)
        back = 4 * t2 + f2
        ok = (self.glue_tet[back] == slots // 4) \
            & (self.glue_face[back] == (slots % 4).astype(np.int8)) \
            & (self.glue_perm[back] == S4_INV[self.glue_perm[slots]])
        if not bool(np.all(ok)):
            bad = slots[~ok][:1]
            raise StructureError(
                f"gluing involution broken at tet {int(bad[0]) // 4} "
                f"face {int(bad[0]) % 4}")

    # -- basic queries ------------------------------------------------------

    def gluing(self, tet: int, face: int) -> GluingEntry:
        s = 4 * tet + face
        if self.glue_tet[s] < 0:
            return None
        return (int(self.glue_tet[s]), int(self.glue_face[s]),
                tuple(int(x) for x in S4_ARR[self.glue_perm[s]]))

    @property
    def boundary_slots(self) -> np.ndarray:
        return np.flatnonzero(self.glue_tet < 0)

    def is_closed(self) -> bool:
        return self.boundary_slots.size == 0

    # -- interior face identifications, vectorized --------------------------

    def _interior_one_side(self) -> np.ndarray:
        """One slot per interior face class (the lower slot id)."""
        slots = np.flatnonzero(self.glue_tet >= 0)
        partner = 4 * self.glue_tet[slots] + self.glue_face[slots]
        return slots[slots <= partner]

    # -- vertex classes ------------------------------------------------------

    @property
    def vertex_classes(self) -> np.ndarray:
        """Array (4t) mapping corner slot tet*4+v to vertex class id."""
        if "vc" not in self._cache:
            slots = self._interior_one_side()
            t1 = slots // 4
            perm = S4_ARR[self.glue_perm[slots]].astype(np.int64)
            t2 = self.glue_tet[slots]
            pa, pb = [], []
            for v in range(4):
                keep = (slots % 4) != v
                pa.append(4 * t1[keep] + v)
                pb.append(4 * t2[keep] + perm[keep, v])
            labels, ncomp = _components(
                4 * self.tets,
                np.concatenate(pa) if pa else np.empty(0, np.int64),
                np.concatenate(pb) if pb else np.empty(0, np.int64))
            self._cache["vc"] = labels
            self._cache["nv"] = ncomp
        return self._cache["vc"]

    @property
    def vertex_count(self) -> int:
        self.vertex_classes
        return self._cache["nv"]

    # -- edge classes with orientations --------------------------------------

    def _edge_data(self):
        if "ec" in self._cache:
            return
        slots = self._interior_one_side()
        t1 = slots // 4
        f1 = slots % 4
        perm = S4_ARR[self.glue_perm[slots]].astype(np.int64)
        t2 = self.glue_tet[slots]
        pa, pb = [], []
        for a in range(4):
            for b in range(4):
                if a == b:
                    continue
                keep = (f1 != a) & (f1 != b)
                ia = DIR12[a * 4 + b]
                jb = DIR12[perm[keep, a] * 4 + perm[keep, b]]
                pa.append(12 * t1[keep] + ia)
                pb.append(12 * t2[keep] + jb)
        labels, _ = _components(
            12 * self.tets,
            np.concatenate(pa) if pa else np.empty(0, np.int64),
            np.concatenate(pb) if pb else np.empty(0, np.int64))
        # pair each directed component with its reverse
        rev_of = np.empty(12, dtype=np.int64)
        for a in range(4):
            for b in range(4):
                if a != b:
                    rev_of[DIR12[a * 4 + b]] = DIR12[b * 4 + a]
        rev_slot = (12 * (np.arange(12 * self.tets) // 12)
                    + rev_of[np.arange(12 * self.tets) % 12])
        fwd = labels
        bwd = labels[rev_slot]
        self._cache["edge_reversed_ok"] = bool(np.all(fwd != bwd))
        lo = np.minimum(fwd, bwd)
        uniq, klass = np.unique(lo, return_inverse=True)
        self._cache["ec"] = klass          # directed slot -> edge class
        self._cache["ne"] = uniq.size
        self._cache["esign"] = np.where(fwd == lo, 1, -1).astype(np.int8)

    @property
    def edge_class_count(self) -> int:
        self._edge_data()
        return self._cache["ne"]

    def edge_class_of(self, tet: int, u: int, v: int) -> int:
        """Edge class of the (u, v) edge of a tetrahedron."""
        self._edge_data()
        return int(self._cache["ec"][12 * tet + DIR12[u * 4 + v]])

    def edge_sign_of(self, tet: int, u: int, v: int) -> int:
        """+1 when u->v agrees with the class orientation, else -1."""
        self._edge_data()
        return int(self._cache["esign"][12 * tet + DIR12[u * 4 + v]])

    @property
    def edge_classes(self) -> np.ndarray:
        """Array (12t): directed slot tet*12 + dir -> edge class id."""
        self._edge_data()
        return self._cache["ec"]

    @property
    def edge_signs(self) -> np.ndarray:
        self._edge_data()
        return self._cache["esign"]

    def edge_class_table(self) -> np.ndarray:
        """(t, 6) array: undirected per-tet edge index -> edge class."""
        self._edge_data()
        ec = self._cache["ec"]
        out = np.empty((self.tets, 6), dtype=np.int64)
        base = np.arange(self.tets) * 12
        for i, (u, v) in enumerate(TET_EDGES):
            out[:, i] = ec[base + DIR12[u * 4 + v]]
        return out

    # -- face classes ---------------------------------------------------------

    @property
    def face_classes(self) -> np.ndarray:
        """Array (4t): face slot -> face class id (boundary faces too)."""
        if "fc" not in self._cache:
            nslots = 4 * self.tets
            partner = np.arange(nslots, dtype=np.int64)
            glued = self.glue_tet >= 0
            partner[glued] = 4 * self.glue_tet[glued] + self.glue_face[glued]
            lo = np.minimum(np.arange(nslots), partner)
            uniq, klass = np.unique(lo, return_inverse=True)
            self._cache["fc"] = klass
            self._cache["nf"] = uniq.size
        return self._cache["fc"]

    @property
    def face_class_count(self) -> int:
        self.face_classes
        return self._cache["nf"]

    def euler_characteristic(self) -> int:
        return (self.vertex_count - self.edge_class_count
                + self.face_class_count - self.tets)

    # -- orientability ---------------------------------------------------------

    def orientation_signs(self) -> Optional[np.ndarray]:
        """Per-tet signs making all gluings orientation-coherent, or None."""
        if "orient" in self._cache:
            return self._cache["orient"]
        sign = np.zeros(self.tets, dtype=np.int8)
        ok = True
        for start in range(self.tets):
            if sign[start] or not ok:
                continue
            sign[start] = 1
            stack = [start]
            while stack and ok:
                t = stack.pop()
                for f in range(4):
                    s = 4 * t + f
                    t2 = int(self.glue_tet[s])
                    if t2 < 0:
                        continue
                    f2 = int(self.glue_face[s])
                    perm = S4_ARR[self.glue_perm[s]]
                    corners = FACE_CORNERS[f]
                    img = [int(perm[v]) for v in corners]
                    sgn3 = 1
                    for i in range(3):
                        for j in range(i + 1, 3):
                            if img[i] > img[j]:
                                sgn3 = -sgn3
                    want = -sign[t] * sgn3 * (-1 if (f + f2) % 2 else 1)
                    if sign[t2] == 0:
                        sign[t2] = want
                        stack.append(t2)
                    elif sign[t2] != want:
                        ok = False
                        break
        result = sign if ok else None
        self._cache["orient"] = result
        return result

    def is_orientable(self) -> bool:
        return self.orientation_signs() is not None

    # -- boundary surface -------------------------------------------------------

    def boundary_surface(self) -> "Surface2D":
        """The boundary as a 2-dimensional triangulation.

        Triangle i of the result is ``self.boundary_slots[i]``; its corner
        j is the j-th smallest vertex of that face.
        """
        if "bsurf" in self._cache:
            return self._cache["bsurf"]
        slots = self.boundary_slots
        index_of = {int(s): i for i, s in enumerate(slots)}
        tris = len(slots)
        gluings: List[List[Optional[Tuple[int, int, Tuple[int, ...]]]]] = [
            [None] * 3 for _ in range(tris)]
        for i, s in enumerate(slots.tolist()):
            t, f = s // 4, s % 4
            corners = FACE_CORNERS[f]
            for e in range(3):  # edge opposite corner e of the face
                if gluings[i][e] is not None:
                    continue
                u, v = [corners[x] for x in range(3) if x != e]
                z = corners[e]
                # walk around edge {u, v} starting through face z
                ct, cu, cv, cz = t, u, v, z
                for _guard in range(12 * self.tets + 1):
                    s2 = 4 * ct + cz
                    t2 = int(self.glue_tet[s2])
                    if t2 < 0:
                        break
                    perm = S4_ARR[self.glue_perm[s2]]
                    nu, nv = int(perm[cu]), int(perm[cv])
                    nf = int(perm[cz])  # face we arrive through
                    ct, cu, cv = t2, nu, nv
                    cz = 6 - nf - nu - nv  # the remaining vertex index
                else:
                    raise InternalInvariantError(
                        "edge fan walk failed to terminate")
                j = index_of[4 * ct + cz]
                corners2 = FACE_CORNERS[cz]
                pos2 = {vv: idx for idx, vv in enumerate(corners2)}
                e2 = pos2[6 - cz - cu - cv]
                # corner correspondence: u->cu, v->cv, z-> off-edge corner
                posa = {vv: idx for idx, vv in enumerate(corners)}
                perm3 = [0, 0, 0]
                perm3[posa[u]] = pos2[cu]
                perm3[posa[v]] = pos2[cv]
                perm3[e] = e2
                gluings[i][e] = (j, e2, tuple(perm3))
                inv3 = [0, 0, 0]
                for x in range(3):
                    inv3[perm3[x]] = x
                gluings[j][e2] = (i, e, tuple(inv3))
        surf = Surface2D(tris, gluings)
        surf.parent_slots = slots
        self._cache["bsurf"] = surf
        return surf


# ---------------------------------------------------------------------------
# 2-dimensional triangulations (used for boundaries and surface templates)
# ---------------------------------------------------------------------------

class Surface2D:
    """Triangles glued along edges; edge e of a triangle is opposite corner e."""

    def __init__(self, tris: int,
                 gluings: Sequence[Sequence[Optional[Tuple[int, int, Tuple[int, ...]]]]]):
        self.tris = tris
        self.gluings = [list(row) for row in gluings]
        for t, row in enumerate(self.gluings):
            if len(row) != 3:
                raise InputError(f"triangle {t} needs 3 gluing entries")
            for e, entry in enumerate(row):
                if entry is None:
                    continue
                t2, e2, perm = entry
                if sorted(perm) != [0, 1, 2]:
                    raise StructureError(f"bad 2d permutation {perm}")
                if perm[e] != e2:
                    raise StructureError("2d perm does not match edge")
                back = self.gluings[t2][e2]
                if back is None or back[0] != t or back[1] != e:
                    raise StructureError("2d gluing not involutive")
        self._cache: Dict[str, object] = {}
        self.parent_slots: Optional[np.ndarray] = None

    def boundary_edge_slots(self) -> List[Tuple[int, int]]:
        return [(t, e) for t in range(self.tris) for e in range(3)
                if self.gluings[t][e] is None]

    def edge_class_count(self) -> int:
        interior = sum(1 for t in range(self.tris) for e in range(3)
                       if self.gluings[t][e] is not None)
        return interior // 2 + (3 * self.tris - interior)

    def vertex_classes(self) -> List[List[int]]:
        """Corner slot 3t+c -> vertex class id, plus the class count."""
        if "vc" not in self._cache:
            parent = list(range(3 * self.tris))

            def find(x):
                while parent[x] != x:
                    parent[x] = parent[parent[x]]
                    x = parent[x]
                return x

            def union(x, y):
                rx, ry = find(x), find(y)
                if rx != ry:
                    parent[max(rx, ry)] = min(rx, ry)

            for t in range(self.tris):
                for e in range(3):
                    g = self.gluings[t][e]
                    if g is None:
                        continue
                    t2, e2, perm = g
                    for c in range(3):
                        if c != e:
                            union(3 * t + c, 3 * t2 + perm[c])
            roots = sorted({find(x) for x in range(3 * self.tris)})
            rank = {r: i for i, r in enumerate(roots)}
            self._cache["vc"] = [rank[find(x)] for x in range(3 * self.tris)]
            self._cache["nv"] = len(roots)
        return self._cache["vc"]

    def vertex_count(self) -> int:
        self.vertex_classes()
        return self._cache["nv"]

    def euler_characteristic(self) -> int:
        return self.vertex_count() - self.edge_class_count() + self.tris

    def component_count(self) -> int:
        if self.tris == 0:
            return 0
        pa, pb = [], []
        for t in range(self.tris):
            for e in range(3):
                g = self.gluings[t][e]
                if g is not None:
                    pa.append(t)
                    pb.append(g[0])
        labels, ncomp = _components(
            self.tris, np.array(pa, dtype=np.int64),
            np.array(pb, dtype=np.int64))
        return ncomp

    def component_labels(self) -> np.ndarray:
        pa, pb = [], []
        for t in range(self.tris):
            for e in range(3):
                g = self.gluings[t][e]
                if g is not None:
                    pa.append(t)
                    pb.append(g[0])
        labels, _ = _components(
            self.tris, np.array(pa, dtype=np.int64),
            np.array(pb, dtype=np.int64))
        return labels

    def is_closed(self) -> bool:
        return not self.boundary_edge_slots()

    def edge_slot_classes(self):
        """(edge slot 3t+e -> class id, class count, directed sign array).

        The sign is +1 when the edge's corner pair in increasing position
        order agrees with the class orientation (taken from the class's
        smallest directed slot).
        """
        if "ec" in self._cache:
            return (self._cache["ec"], self._cache["ne"], self._cache["es"])
        nslots = 3 * self.tris
        klass = [-1] * nslots
        sign = [1] * nslots
        nxt = 0
        for t in range(self.tris):
            for e in range(3):
                s = 3 * t + e
                if klass[s] >= 0:
                    continue
                klass[s] = nxt
                sign[s] = 1
                g = self.gluings[t][e]
                if g is not None:
                    t2, e2, perm = g
                    s2 = 3 * t2 + e2
                    klass[s2] = nxt
                    lo, hi = [c for c in range(3) if c != e]
                    lo2, hi2 = [c for c in range(3) if c != e2]
                    # orientation matches when lo maps to the lower corner
                    sign[s2] = 1 if perm[lo] == lo2 else -1
                nxt += 1
        self._cache["ec"] = klass
        self._cache["ne"] = nxt
        self._cache["es"] = sign
        return klass, nxt, sign


# ---------------------------------------------------------------------------
# validity
# ---------------------------------------------------------------------------

@dataclass
class ValidityReport:
    valid: bool
    failures: List[str] = field(default_factory=list)
    is_closed: bool = True
    orientable: Optional[bool] = None
    vertex_count: int = 0
    edge_count: int = 0
    face_count: int = 0

    def __bool__(self):
        return self.valid


def validate_manifold(tri: Triangulation) -> ValidityReport:
    """Check vertex links (spheres or disks) and edge links (connected).

    A structurally malformed gluing table raises
    :class:`~knotgenus.errors.StructureError` when the triangulation is
    constructed; this function reports *validity* failures.
    """
    failures: List[str] = []
    t = tri.tets
    if t == 0:
        return ValidityReport(True, [], True, True, 0, 0, 0)

    tri._edge_data()
    if not tri._cache["edge_reversed_ok"]:
        failures.append("an edge class is identified with itself reversed")
        return ValidityReport(False, failures, tri.is_closed(), None,
                              tri.vertex_count, tri.edge_class_count,
                              tri.face_class_count)

    vc = tri.vertex_classes
    nv = tri.vertex_count
    slots = tri._interior_one_side()
    t1 = slots // 4
    f1 = slots % 4
    perm = S4_ARR[tri.glue_perm[slots]].astype(np.int64)
    t2 = tri.glue_tet[slots]

    # link faces per vertex class: one per corner
    f_link = np.bincount(vc, minlength=nv)

    # arc slots (tet, v, f), v != f: interior ones pair up across gluings
    boundary_face = tri.glue_tet < 0
    arc_total = np.zeros(nv, dtype=np.int64)
    arc_boundary = np.zeros(nv, dtype=np.int64)
    for v in range(4):
        for f in range(4):
            if v == f:
                continue
            tets = np.arange(t)
            cls = vc[4 * tets + v]
            np.add.at(arc_total, cls, 1)
            bmask = boundary_face[4 * tets + f]
            np.add.at(arc_boundary, cls[bmask], 1)
    e_link = (arc_total - arc_boundary) // 2 + arc_boundary

    # link vertices: classes of edge ends (tet, v, u)
    pa, pb = [], []
    for a in range(4):
        for b in range(4):
            if a == b:
                continue
            keep = (f1 != a) & (f1 != b)
            pa.append(12 * t1[keep] + DIR12[a * 4 + b])
            pb.append(12 * t2[keep]
                      + DIR12[perm[keep, a] * 4 + perm[keep, b]])
    end_labels, _ = _components(
        12 * t, np.concatenate(pa) if pa else np.empty(0, np.int64),
        np.concatenate(pb) if pb else np.empty(0, np.int64))
    v_link = np.zeros(nv, dtype=np.int64)
    seen_pairs = {}
    ends = np.full(12 * t, -1, dtype=np.int64)
    for a in range(4):
        for b in range(4):
            if a != b:
                idx = np.arange(t) * 12 + DIR12[a * 4 + b]
                ends[idx] = vc[np.arange(t) * 4 + a]
    uniq = {}
    for slot in range(12 * t):
        lab = int(end_labels[slot])
        if lab not in uniq:
            uniq[lab] = int(ends[slot])
    for lab, vcl in uniq.items():
        v_link[vcl] += 1
    chi_link = v_link - e_link + f_link

    has_boundary = arc_boundary > 0
    want = np.where(has_boundary, 1, 2)
    bad = np.flatnonzero(chi_link != want)
    for b in bad.tolist()[:5]:
        failures.append(
            f"vertex class {b}: link Euler characteristic {int(chi_link[b])}"
            f" != {int(want[b])}")

    # link connectivity: corners joined across interior faces
    pa, pb = [], []
    for v in range(4):
        keep = f1 != v
        pa.append(4 * t1[keep] + v)
        pb.append(4 * t2[keep] + perm[keep, v])
    corner_labels, ncc = _components(
        4 * t, np.concatenate(pa), np.concatenate(pb))
    # number of corner components per vertex class must be 1
    comp_to_class = {}
    comps_per_class = np.zeros(nv, dtype=np.int64)
    first = {}
    for slot in range(4 * t):
        lab = int(corner_labels[slot])
        if lab not in first:
            first[lab] = True
            comps_per_class[vc[slot]] += 1
    bad = np.flatnonzero(comps_per_class != 1)
    for b in bad.tolist()[:5]:
        failures.append(f"vertex class {b}: link has "
                        f"{int(comps_per_class[b])} components")

    # edge links connected: tet-edge incidences joined across shared faces
    pa, pb = [], []
    for ei, (ea, eb) in enumerate(TET_EDGES):
        keep = (f1 != ea) & (f1 != eb)
        ia = np.minimum(perm[keep, ea], perm[keep, eb])
        ib = np.maximum(perm[keep, ea], perm[keep, eb])
        pa.append(6 * t1[keep] + ei)
        pb.append(6 * t2[keep] + UND6[ia * 4 + ib])
    fan_labels, _ = _components(
        6 * t, np.concatenate(pa) if pa else np.empty(0, np.int64),
        np.concatenate(pb) if pb else np.empty(0, np.int64))
    ec = tri.edge_classes
    pairs = set()
    for tet in range(t):
        for ei, (ea, eb) in enumerate(TET_EDGES):
            pairs.add((int(ec[12 * tet + DIR12[ea * 4 + eb]]),
                       int(fan_labels[6 * tet + ei])))
    from collections import Counter
    cnt = Counter(k for k, _ in pairs)
    for k, count in cnt.items():
        if count != 1:
            failures.append(f"edge class {k}: link is disconnected")
            if len(failures) > 10:
                break

    is_closed = tri.is_closed()
    if is_closed and not failures:
        if tri.euler_characteristic() != 0:
            failures.append(
                f"closed complex has Euler characteristic "
                f"{tri.euler_characteristic()} != 0")

    orient = tri.is_orientable() if not failures else None
    return ValidityReport(not failures, failures, is_closed, orient,
                          tri.vertex_count, tri.edge_class_count,
                          tri.face_class_count)


# ---------------------------------------------------------------------------
# barycentric subdivision
# ---------------------------------------------------------------------------

# face 0,1,2 mates inside the same parent tet: swap flag entries
_SWAPS = []
for _i in range(3):
    _tbl = np.empty(24, dtype=np.int64)
    for _pi, _p in enumerate(S4):
        q = list(_p)
        q[_i], q[_i + 1] = q[_i + 1], q[_i]
        _tbl[_pi] = S4_INDEX[tuple(q)]
    _SWAPS.append(_tbl)

_IDENTITY_PERM = S4_INDEX[(0, 1, 2, 3)]


@dataclass
class CellMarks:
    """Boolean masks over the cell classes of a triangulation."""

    vertices: np.ndarray
    edges: np.ndarray
    faces: np.ndarray
    tets: np.ndarray


class BaryTriangulation(Triangulation):
    """Barycentric subdivision remembering its parent.

    Child tet ``24 * T + i`` is the flag ``S4[i]`` of parent tet ``T``:
    its vertex ``j`` is the barycenter of the parent cell spanned by the
    first ``j + 1`` entries of the flag.  Child vertex classes are
    parent cell classes, ordered: vertices, edges, faces, tets.
    """

    parent: Triangulation

    def subdivided_marks(self, marks: CellMarks) -> CellMarks:
        """Push subcomplex marks through the subdivision."""
        par = self.parent
        t = par.tets
        new_v = np.concatenate([marks.vertices, marks.edges, marks.faces,
                                marks.tets])
        flags = np.tile(np.arange(24), t)
        parents = np.repeat(np.arange(t), 24)
        p0 = S4_ARR[flags, 0].astype(np.int64)
        p1 = S4_ARR[flags, 1].astype(np.int64)
        p2 = S4_ARR[flags, 2].astype(np.int64)
        p3 = S4_ARR[flags, 3].astype(np.int64)
        # class id of the parent cell spanned by the first j+1 flag entries
        vcls = par.vertex_classes[4 * parents + p0]
        ecls = par.edge_classes[12 * parents + DIR12[p0 * 4 + p1]]
        fcls = par.face_classes[4 * parents + p3]
        span_marked = [
            marks.vertices[vcls],
            marks.edges[ecls],
            marks.faces[fcls],
            marks.tets[parents],
        ]
        # a child cell spanned by flag dims S lies inside the parent cell
        # of dimension max(S); mark child edge/face classes accordingly
        new_e = np.zeros(self.edge_class_count, dtype=bool)
        ec = self.edge_classes
        for i in range(4):
            for j in range(4):
                if i >= j:
                    continue
                slot = (np.arange(self.tets) * 12 + DIR12[i * 4 + j])
                np.logical_or.at(new_e, ec[slot], span_marked[j])
        new_f = np.zeros(self.face_class_count, dtype=bool)
        fc = self.face_classes
        for f in range(4):  # face opposite child vertex f spans dims != f
            top = 2 if f == 3 else 3
            slot = np.arange(self.tets) * 4 + f
            np.logical_or.at(new_f, fc[slot], span_marked[top])
        new_t = np.zeros(self.tets, dtype=bool)
        return CellMarks(new_v, new_e, new_f, new_t)


def barycentric_subdivide(tri: Triangulation) -> BaryTriangulation:
    """Replace every tetrahedron by its 24 flag tetrahedra.

    Internal gluings between flags use the identity vertex correspondence;
    across an old face the flags match through the old gluing permutation.
    Validity is preserved, and the child's vertex classes are exactly the
    parent's cells (vertex, edge, face and tetrahedron classes).
    """
    t = tri.tets
    nt = 24 * t
    glue_tet = np.empty(4 * nt, dtype=np.int64)
    glue_face = np.empty(4 * nt, dtype=np.int8)
    glue_perm = np.full(4 * nt, _IDENTITY_PERM, dtype=np.int8)

    flags = np.tile(np.arange(24), t)
    parents = np.repeat(np.arange(t), 24)
    child = np.arange(nt)
    # faces 0..2: internal mates via flag swaps
    for i in range(3):
        mate = 24 * parents + _SWAPS[i][flags]
        glue_tet[4 * child + i] = mate
        glue_face[4 * child + i] = i
    # face 3: across the parent face opposite the flag's last entry
    p3 = S4_ARR[flags, 3].astype(np.int64)
    old_slot = 4 * parents + p3
    old_t2 = tri.glue_tet[old_slot]
    interior = old_t2 >= 0
    sigma = S4_ARR[tri.glue_perm[old_slot]].astype(np.int64)
    img = np.empty((nt, 4), dtype=np.int64)
    for j in range(4):
        img[:, j] = np.take_along_axis(
            sigma, S4_ARR[flags, j].astype(np.int64)[:, None], axis=1)[:, 0]
    flag_img = _flag_index(img)
    mate3 = np.where(interior, 24 * old_t2 + flag_img, -1)
    glue_tet[4 * child + 3] = mate3
    glue_face[4 * child + 3] = 3

    out = BaryTriangulation.from_arrays(glue_tet, glue_face, glue_perm)
    out.__class__ = BaryTriangulation
    out.parent = tri
    # child vertex classes are parent cells, in (V, E, F, T) order
    tri._edge_data()
    nv, ne, nf = tri.vertex_count, tri.edge_class_count, tri.face_class_count
    p0 = S4_ARR[flags, 0].astype(np.int64)
    p1 = S4_ARR[flags, 1].astype(np.int64)
    vc = np.empty(4 * nt, dtype=np.int64)
    vc[4 * child + 0] = tri.vertex_classes[4 * parents + p0]
    vc[4 * child + 1] = nv + tri.edge_classes[12 * parents
                                              + DIR12[p0 * 4 + p1]]
    vc[4 * child + 2] = nv + ne + tri.face_classes[4 * parents + p3]
    vc[4 * child + 3] = nv + ne + nf + parents
    out._cache["vc"] = vc
    out._cache["nv"] = nv + ne + nf + t
    return out


_FLAG_LOOKUP = np.full((4, 4, 4), -1, dtype=np.int64)
for _pi, _p in enumerate(S4):
    _FLAG_LOOKUP[_p[0], _p[1], _p[2]] = _pi


def _flag_index(img: np.ndarray) -> np.ndarray:
    return _FLAG_LOOKUP[img[:, 0], img[:, 1], img[:, 2]]


# ---------------------------------------------------------------------------
# knots: cycles of edge classes
# ---------------------------------------------------------------------------

_DIR_PAIRS = [(a, b) for a in range(4) for b in range(4) if a != b]


def edge_endpoints(tri: Triangulation, edge_class: int) -> Tuple[int, int]:
    """(tail, head) vertex classes in the class orientation."""
    tri._edge_data()
    ec, sign = tri._cache["ec"], tri._cache["esign"]
    slots = np.flatnonzero((ec == edge_class) & (sign > 0))
    if slots.size == 0:
        raise InputError(f"no such edge class {edge_class}")
    s = int(slots[0])
    a, b = _DIR_PAIRS[s % 12]
    vc = tri.vertex_classes
    return int(vc[4 * (s // 12) + a]), int(vc[4 * (s // 12) + b])


def check_knot(tri: Triangulation, edges: Sequence[int]) -> Dict[int, int]:
    """Validate a simple closed edge cycle; return its oriented chain.

    The chain maps each edge class to +-1 so that the cycle is closed
    (boundary zero); loop edges are their own cycles.  Raises InputError
    when the edges do not form one simple closed curve.
    """
    edges = list(edges)
    if not edges or len(set(edges)) != len(edges):
        raise InputError("knot must be a nonempty set of distinct edges")
    ne = tri.edge_class_count
    for e in edges:
        if not 0 <= e < ne:
            raise InputError(f"edge id {e} out of range")
    ends = {e: edge_endpoints(tri, e) for e in edges}
    degree: Dict[int, List[Tuple[int, int]]] = {}
    for e, (ta, he) in ends.items():
        degree.setdefault(ta, []).append((e, +1))
        degree.setdefault(he, []).append((e, -1))
    for vcl, inc in degree.items():
        if len(inc) != 2:
            raise InputError(
                f"vertex class {vcl} meets {len(inc)} knot edge ends; "
                "the knot must be a simple closed curve")
    # walk the cycle assigning directions
    chain: Dict[int, int] = {}
    e0 = edges[0]
    chain[e0] = 1
    cur_v = ends[e0][1]
    cur_e = e0
    for _ in range(len(edges) - 1):
        nxt = [(e, s) for (e, s) in degree[cur_v] if e != cur_e]
        if not nxt:
            raise InputError("knot edges do not close up")
        e, s = nxt[0]
        # s == +1 means cur_v is the tail of e: traverse forward
        chain[e] = 1 if s == +1 else -1
        cur_e = e
        cur_v = ends[e][1] if chain[e] == 1 else ends[e][0]
    if cur_v != ends[e0][0] or len(chain) != len(edges):
        raise InputError("knot edges do not form a single closed cycle")
    return chain


def _face_boundary_rows(tri: Triangulation):
    """Sparse rows (per edge class) of the face boundary operator."""
    fc = tri.face_classes
    reps = {}
    for s in range(4 * tri.tets):
        k = int(fc[s])
        if k not in reps:
            reps[k] = s
    rows: List[Dict[int, int]] = [dict() for _ in range(tri.edge_class_count)]
    for k in sorted(reps):
        s = reps[k]
        t, f = s // 4, s % 4
        v0, v1, v2 = FACE_CORNERS[f]
        for coeff, (x, y) in ((1, (v1, v2)), (-1, (v0, v2)), (1, (v0, v1))):
            e = tri.edge_class_of(t, x, y)
            sgn = tri.edge_sign_of(t, x, y)
            val = rows[e].get(k, 0) + coeff * sgn
            if val:
                rows[e][k] = val
            else:
                rows[e].pop(k, None)
    return rows


def is_null_homologous(tri: Triangulation, edges: Sequence[int]) -> bool:
    """Whether the knot's cycle bounds over the integers.

    Solves the integer system (face boundaries) x = [K] with the sparse
    unit-pivot eliminator, falling back to Smith normal form on any
    residue.
    """
    chain = check_knot(tri, edges)
    rows = _face_boundary_rows(tri)
    b = {e: c for e, c in chain.items()}
    return solve_membership(rows, b, tri.face_class_count)


def h1_invariants(tri: Triangulation) -> Tuple[int, List[int]]:
    """(free rank, torsion) of first homology; dense, small inputs only."""
    d2 = _face_boundary_rows(tri)
    d1: List[Dict[int, int]] = [dict() for _ in range(tri.vertex_count)]
    for e in range(tri.edge_class_count):
        tail, head = edge_endpoints(tri, e)
        if tail != head:
            d1[head][e] = 1
            d1[tail][e] = -1
    return homology_ranks(d1, tri.edge_class_count, d2,
                          tri.face_class_count)


# ---------------------------------------------------------------------------
# knot complements
# ---------------------------------------------------------------------------

def knot_vertex_marks(tri: Triangulation, edges: Sequence[int]) -> np.ndarray:
    """Boolean mask over vertex classes lying on the knot."""
    marks = np.zeros(tri.vertex_count, dtype=bool)
    for e in edges:
        ta, he = edge_endpoints(tri, e)
        marks[ta] = True
        marks[he] = True
    return marks


def knot_cell_marks(tri: Triangulation, edges: Sequence[int]) -> CellMarks:
    emarks = np.zeros(tri.edge_class_count, dtype=bool)
    for e in edges:
        emarks[e] = True
    return CellMarks(knot_vertex_marks(tri, edges), emarks,
                     np.zeros(tri.face_class_count, dtype=bool),
                     np.zeros(tri.tets, dtype=bool))


def subdivide_knot(child: BaryTriangulation,
                   edges: Sequence[int]) -> List[int]:
    """Image of a knot's edge set in the barycentric subdivision."""
    par = child.parent
    par._edge_data()
    emarks = np.zeros(par.edge_class_count, dtype=bool)
    for e in edges:
        emarks[e] = True
    flags = np.tile(np.arange(24), par.tets)
    parents = np.repeat(np.arange(par.tets), 24)
    p0 = S4_ARR[flags, 0].astype(np.int64)
    p1 = S4_ARR[flags, 1].astype(np.int64)
    on_knot = emarks[par.edge_classes[12 * parents + DIR12[p0 * 4 + p1]]]
    child._edge_data()
    slot01 = np.arange(child.tets) * 12 + DIR12[0 * 4 + 1]
    classes = child.edge_classes[slot01[on_knot]]
    return sorted(set(int(k) for k in classes))


def remove_tets(tri: Triangulation, keep: np.ndarray) -> Tuple[Triangulation, np.ndarray]:
    """Sub-triangulation on the kept tets; cut gluings become boundary."""
    kept_ids = np.flatnonzero(keep)
    new_id = -np.ones(tri.tets, dtype=np.int64)
    new_id[kept_ids] = np.arange(kept_ids.size)
    slots = (4 * kept_ids[:, None] + np.arange(4)[None, :]).ravel()
    gt = tri.glue_tet[slots].copy()
    gf = tri.glue_face[slots].copy()
    gp = tri.glue_perm[slots].copy()
    cut = (gt >= 0) & ~keep[np.maximum(gt, 0)]
    gt[cut] = -1
    live = gt >= 0
    gt[live] = new_id[gt[live]]
    out = Triangulation.from_arrays(gt, gf, gp)
    return out, kept_ids


def knot_complement(tri: Triangulation,
                    edges: Sequence[int]) -> Tuple[Triangulation, np.ndarray]:
    """Remove every closed tetrahedron meeting the knot.

    Intended for second barycentric subdivisions, where the removed star
    is a regular neighborhood; verifies that the boundary is one torus.
    Returns the complement and the kept parent tet ids.
    """
    check_knot(tri, edges)
    vmarks = knot_vertex_marks(tri, edges)
    vc = tri.vertex_classes
    touched = vmarks[vc].reshape(tri.tets, 4).any(axis=1)
    if touched.all():
        raise InputError("knot star covers the whole triangulation")
    comp, kept = remove_tets(tri, ~touched)
    bs = comp.boundary_surface()
    ncomp = bs.component_count()
    chi = bs.euler_characteristic()
    if ncomp != 1 or chi != 0:
        raise InternalInvariantError(
            f"complement boundary is not a single torus "
            f"(components {ncomp}, chi {chi})")
    return comp, kept
