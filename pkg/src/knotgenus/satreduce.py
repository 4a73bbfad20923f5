"""Compiling exactly-one-in-three SAT into knot genus instances.

An instance with n variables and m clauses turns into a branching
surface: a planar piece with n + m + 1 boundary circles (one becomes the
knot) plus, per variable, two genus-one pieces (one for the positive
literal, one for the negative), glued along the variable and clause
circles.  Thickening every piece into prisms (the planar piece five
layers deep), doubling and stellar subdivision produce a closed
triangulation in which the knot bounds a genus m + n surface exactly
when the instance is satisfiable with one true literal per clause.

``assemble`` realizes the satisfying-assignment surface as a subcomplex
(flat literal sheets, a planar sheet bending between attachment levels
through vertical walls) and converts it into a certificate for the
verifier via the one-sided push-off.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np

from .certify import (
    Certificate,
    ComplementContext,
    build_certificate,
    complement_pipeline,
)
from .errors import InputError, InternalInvariantError, OracleCapacityError, WitnessError
from .surfaces import NormalVector
from .triangulation import Surface2D, Triangulation

Literal = Tuple[int, bool]          # (variable 1..n, negated)
Clause = Tuple[Literal, Literal, Literal]

ONE_IN_THREE_CAP = 24


@dataclass(frozen=True)
class CnfInstance:
    """Clauses of exactly three literals over variables 1..n."""

    n: int
    clauses: Tuple[Clause, ...]

    def __init__(self, n: int, clauses: Sequence[Sequence[Literal]]):
        if n < 1:
            raise InputError("need at least one variable")
        cls = []
        for cl in clauses:
            if len(cl) != 3:
                raise InputError(f"clause {cl} does not have 3 literals")
            for v, neg in cl:
                if not 1 <= v <= n:
                    raise InputError(f"variable {v} out of range 1..{n}")
            cls.append(tuple((int(v), bool(neg)) for v, neg in cl))
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "clauses", tuple(cls))

    @property
    def m(self) -> int:
        return len(self.clauses)

    def literal_occurrences(self, var: int, negated: bool) \
            -> List[Tuple[int, int]]:
        """(clause index, slot index) pairs where the literal occurs."""
        out = []
        for ci, cl in enumerate(self.clauses):
            for slot, (v, neg) in enumerate(cl):
                if v == var and neg == negated:
                    out.append((ci, slot))
        return out


def one_in_three_oracle(inst: CnfInstance) -> List[Tuple[bool, ...]]:
    """All assignments giving each clause exactly one true literal."""
    if inst.n > ONE_IN_THREE_CAP:
        raise OracleCapacityError(
            f"exhaustive search capped at {ONE_IN_THREE_CAP} variables")
    out = []
    for bits in range(1 << inst.n):
        a = tuple(bool(bits >> i & 1) for i in range(inst.n))
        if is_one_in_three(inst, a):
            out.append(a)
    return out


def is_one_in_three(inst: CnfInstance, assignment: Sequence[bool]) -> bool:
    if len(assignment) != inst.n:
        raise InputError("assignment length mismatch")
    for cl in inst.clauses:
        if sum(1 for v, neg in cl if assignment[v - 1] != neg) != 1:
            return False
    return True


# ---------------------------------------------------------------------------
# surface piece templates
# ---------------------------------------------------------------------------

class _SurfBuilder:
    """Triangle-by-triangle assembly with explicit corner correspondences."""

    def __init__(self):
        self.tris: List[Tuple[object, object, object]] = []
        self.glue: Dict[Tuple[int, int], Tuple[int, int, Tuple[int, ...]]] = {}

    def add(self, c0, c1, c2) -> int:
        self.tris.append((c0, c1, c2))
        return len(self.tris) - 1

    def join(self, t1: int, e1: int, t2: int, e2: int,
             corner_map: Dict[int, int]):
        """Glue edge e1 of t1 to e2 of t2; corner_map sends positions."""
        perm = tuple(corner_map[i] for i in range(3))
        if perm[e1] != e2:
            raise InternalInvariantError("corner map breaks the edge")
        inv = [0, 0, 0]
        for i in range(3):
            inv[perm[i]] = i
        self.glue[(t1, e1)] = (t2, e2, perm)
        self.glue[(t2, e2)] = (t1, e1, tuple(inv))

    def surface(self) -> Surface2D:
        rows = []
        for t in range(len(self.tris)):
            rows.append([self.glue.get((t, e)) for e in range(3)])
        return Surface2D(len(self.tris), rows)


@dataclass
class PieceTemplate:
    """Triangulated genus-g surface with c one-edge boundary circles.

    ``boundary`` lists, per circle, the (triangle, edge, forward) slot of
    its single boundary edge; ``forward`` gives the corner positions
    (tail, head) of the circle's chosen direction.
    """

    genus: int
    circles: int
    surface: Surface2D
    boundary: List[Tuple[int, int, Tuple[int, int]]]


def piece_template(g: int, c: int) -> PieceTemplate:
    """One-vertex-per-boundary template with exactly 4g + 5c - 4 triangles.

    Built from a one-relator polygon (commutators, then the first
    boundary circle, then tail-conjugated circles) coned to a center;
    the cone triangle over every circle past the first is stellarly
    subdivided, which brings the triangle count to exactly 4g + 5c - 4.
    """
    if c < 1 or g < 0 or (g, c) == (0, 1):
        raise InputError(f"no template for genus {g} with {c} circles")
    sides: List[Tuple[str, int]] = []
    for i in range(g):
        sides += [("a", i), ("b", i), ("A", i), ("B", i)]
    sides.append(("d", 0))
    for j in range(1, c):
        sides += [("t", j), ("d", j), ("T", j)]
    ns = len(sides)
    b = _SurfBuilder()
    # cone triangle of side s: corners (corner_s, corner_{s+1}, center),
    # edge 2 the polygon side, edge 1 the spoke at corner_s, edge 0 the
    # spoke at corner_{s+1}
    tri_of_side = [b.add(("corner", s), ("corner", (s + 1) % ns), ("w",))
                   for s in range(ns)]
    for s in range(ns):
        b.join(tri_of_side[s], 0, tri_of_side[(s + 1) % ns], 1,
               {0: 1, 1: 0, 2: 2})
    by_label: Dict[Tuple[str, int], List[int]] = {}
    for s, (label, idx) in enumerate(sides):
        by_label.setdefault((label.lower(), idx), []).append(s)
    boundary_sides: Dict[int, int] = {}
    for (label, idx), occ in by_label.items():
        if label == "d":
            boundary_sides[idx] = occ[0]
        else:
            s1, s2 = occ
            # reversed identification: corner_s1 meets corner_{s2+1}
            b.join(tri_of_side[s1], 2, tri_of_side[s2], 2, {0: 1, 1: 0, 2: 2})
    boundary: List[Tuple[int, int, Tuple[int, int]]] = []
    dead: List[int] = []
    for j in range(c):
        s = boundary_sides[j]
        t = tri_of_side[s]
        if j == 0:
            boundary.append((t, 2, (0, 1)))
            continue
        ta = b.add(("corner", s), ("corner", (s + 1) % ns), ("u", j))
        tb = b.add(("corner", (s + 1) % ns), ("w",), ("u", j))
        tc = b.add(("w",), ("corner", s), ("u", j))
        b.join(ta, 0, tb, 1, {0: 1, 1: 0, 2: 2})
        b.join(tb, 0, tc, 1, {0: 1, 1: 0, 2: 2})
        b.join(tc, 0, ta, 1, {0: 1, 1: 0, 2: 2})
        # move t's spoke gluings onto tb (old edge 0) and tc (old edge 1)
        _reroute(b, t, 1, tc, {0: 1, 1: 2, 2: 0})
        _reroute(b, t, 0, tb, {0: 2, 1: 0, 2: 1})
        boundary.append((ta, 2, (0, 1)))
        dead.append(t)
    surf, boundary = _compact(b, dead, boundary)
    assert surf.tris == 4 * g + 5 * c - 4
    return PieceTemplate(g, c, surf, boundary)


def _reroute(b: _SurfBuilder, old: int, old_edge: int, new: int,
             old_to_new: Dict[int, int]):
    """Point the partner of (old, old_edge) at the new triangle instead.

    ``old_to_new`` is the corner-position correspondence from the old
    triangle to its replacement.
    """
    t1, e1, _perm_old_to_t1 = b.glue.pop((old, old_edge))
    back = b.glue.pop((t1, e1))
    if back[:2] != (old, old_edge):
        raise InternalInvariantError("inconsistent builder gluing")
    perm_t1_to_old = back[2]
    # compose: t1 -> old -> new
    perm = tuple(old_to_new[perm_t1_to_old[i]] for i in range(3))
    inv = [0, 0, 0]
    for i in range(3):
        inv[perm[i]] = i
    b.glue[(t1, e1)] = (new, perm[e1], perm)
    b.glue[(new, perm[e1])] = (t1, e1, tuple(inv))


def _compact(b: _SurfBuilder, dead: List[int], boundary):
    """Drop dead triangles and renumber the survivors."""
    deadset = set(dead)
    alive = [t for t in range(len(b.tris)) if t not in deadset]
    newid = {t: i for i, t in enumerate(alive)}
    rows = []
    for t in alive:
        row = []
        for e in range(3):
            entry = b.glue.get((t, e))
            if entry is None:
                row.append(None)
            else:
                t2, e2, perm = entry
                row.append((newid[t2], e2, perm))
        rows.append(row)
    surf = Surface2D(len(alive), rows)
    fixed = [(newid[t], e, fwd) for (t, e, fwd) in boundary]
    return surf, fixed


# ---------------------------------------------------------------------------
# the branching surface
# ---------------------------------------------------------------------------

@dataclass
class Attachment:
    """One circle of a literal piece glued onto a circle of the planar
    piece, entering the five-layer stack at the given layer."""

    piece: Tuple[str, int]          # ("pos", i) or ("neg", i)
    piece_circle: int               # index into the piece's boundary list
    base_circle: int                # index into the planar piece's list
    layer: int                      # 0 (top), 2 (middle) or 4 (bottom)


@dataclass
class BranchingSurface:
    """Pieces plus the circle identifications encoding the instance.

    The planar piece's circles are ordered: 0 is the knot, 1..n the
    variable circles, n+1..n+m the clause circles.
    """

    instance: CnfInstance
    base: PieceTemplate
    pieces: Dict[Tuple[str, int], PieceTemplate]
    attachments: List[Attachment]

    def piece_triangles(self) -> int:
        return self.base.surface.tris + sum(
            p.surface.tris for p in self.pieces.values())


def build_branching_surface(inst: CnfInstance) -> BranchingSurface:
    """Assemble the templates and the attachment plan for an instance.

    Three piece boundaries meet each variable circle and four meet each
    clause circle; occurrence circles are assigned in clause order and
    enter the stack at layers 0/2/4 by their slot in the clause.
    """
    n, m = inst.n, inst.m
    base = piece_template(0, n + m + 1)
    pieces: Dict[Tuple[str, int], PieceTemplate] = {}
    attachments: List[Attachment] = []
    for i in range(1, n + 1):
        for sign, negated, layer in (("pos", False, 0), ("neg", True, 4)):
            occ = inst.literal_occurrences(i, negated)
            tp = piece_template(1, len(occ) + 1)
            pieces[(sign, i)] = tp
            attachments.append(Attachment((sign, i), 0, i, layer))
            for oi, (cj, slot) in enumerate(occ):
                attachments.append(Attachment((sign, i), 1 + oi,
                                              n + 1 + cj, (0, 2, 4)[slot]))
    return BranchingSurface(inst, base, pieces, attachments)


# ---------------------------------------------------------------------------
# prisms and stellar subdivision
# ---------------------------------------------------------------------------

# wall e of a prism over triangle (0,1,2) spans the edge opposite corner e;
# its corner cycle runs bottom-low, bottom-high, top-high, top-low
_WALL_CYCLE = []
for _e in range(3):
    _p, _q = [c for c in range(3) if c != _e]
    _WALL_CYCLE.append((_p, _q, _q + 3, _p + 3))


def _prism_tet_tags(k: int):
    """Symbolic vertex tags of tetrahedron k of the 14-tet prism split."""
    if k == 0:
        return [("c", 0), ("c", 1), ("c", 2), ("q",)]
    if k == 1:
        return [("c", 3), ("c", 4), ("c", 5), ("q",)]
    e, j = divmod(k - 2, 4)
    cyc = _WALL_CYCLE[e]
    return [("c", cyc[j]), ("c", cyc[(j + 1) % 4]), ("r", e), ("q",)]


def _internal_pattern():
    """Face gluings among the 14 tets of one prism (precomputed once)."""
    tags = [_prism_tet_tags(k) for k in range(14)]
    out = []
    seen = set()
    for k1 in range(14):
        for f1 in range(4):
            face1 = [tags[k1][i] for i in range(4) if i != f1]
            key1 = frozenset(face1)
            if ("q",) not in key1:
                continue  # external faces miss the prism center
            for k2 in range(14):
                if k2 == k1:
                    continue
                for f2 in range(4):
                    if (k2, f2, k1, f1) in seen or (k1, f1, k2, f2) in seen:
                        continue
                    face2 = [tags[k2][i] for i in range(4) if i != f2]
                    if frozenset(face2) != key1:
                        continue
                    perm = [0, 0, 0, 0]
                    for i in range(4):
                        if i == f1:
                            perm[i] = f2
                        else:
                            perm[i] = tags[k2].index(tags[k1][i])
                    out.append((k1, f1, k2, f2, tuple(perm)))
                    seen.add((k1, f1, k2, f2))
    assert len(out) == 21, len(out)
    return out


_INTERNAL = _internal_pattern()

# external face slots of the prism: (tet, face, kind)
# bottom/top triangles plus the four sub-triangles of each wall
_EXTERNAL = {"B": (0, 3), "T": (1, 3)}
for _e in range(3):
    for _j in range(4):
        _EXTERNAL[("R", _e, _j)] = (2 + 4 * _e + _j, 3)


class PrismComplex:
    """Prisms (triangle x interval) with glued rectangular/triangular faces.

    Corner ids 0..5 are (triangle corner, level): corner + 3 * level.
    Faces: "B", "T", ("R", e).  Gluings map corner ids to corner ids.
    """

    def __init__(self, nprisms: int):
        self.n = nprisms
        self.glue: Dict[Tuple[int, object], Tuple[int, object, Dict[int, int]]] = {}

    def join(self, p1: int, face1, p2: int, face2, cmap: Dict[int, int]):
        if (p1, face1) in self.glue or (p2, face2) in self.glue:
            raise InternalInvariantError(
                f"prism face glued twice: {(p1, face1)} / {(p2, face2)}")
        self.glue[(p1, face1)] = (p2, face2, dict(cmap))
        self.glue[(p2, face2)] = (p1, face1, {v: k for k, v in cmap.items()})

    def boundary_faces(self) -> List[Tuple[int, object]]:
        out = []
        for p in range(self.n):
            for face in ("B", "T", ("R", 0), ("R", 1), ("R", 2)):
                if (p, face) not in self.glue:
                    out.append((p, face))
        return out

    def to_triangulation(self) -> Triangulation:
        """Stellar subdivision: 14 tetrahedra per prism.

        Each rectangular face gains a center vertex (shared across the
        gluing), and the prism boundary is coned to the prism center.
        """
        n = self.n
        nt = 14 * n
        glue_tet = np.full(4 * nt, -1, dtype=np.int64)
        glue_face = np.full(4 * nt, 0, dtype=np.int8)
        glue_perm = np.full(4 * nt, 0, dtype=np.int8)
        from .triangulation import S4_INDEX

        def set_gluing(t1, f1, t2, f2, perm):
            glue_tet[4 * t1 + f1] = t2
            glue_face[4 * t1 + f1] = f2
            glue_perm[4 * t1 + f1] = S4_INDEX[tuple(perm)]

        for p in range(n):
            base = 14 * p
            for (k1, f1, k2, f2, perm) in _INTERNAL:
                set_gluing(base + k1, f1, base + k2, f2, perm)
                inv = [0, 0, 0, 0]
                for i in range(4):
                    inv[perm[i]] = i
                set_gluing(base + k2, f2, base + k1, f1, inv)

        done = set()
        for (p1, face1), (p2, face2, cmap) in self.glue.items():
            if (p2, face2, p1, face1) in done:
                continue
            done.add((p1, face1, p2, face2))
            if face1 in ("B", "T"):
                k1, _ = _EXTERNAL[face1]
                k2, _ = _EXTERNAL[face2]
                tags1 = _prism_tet_tags(k1)
                tags2 = _prism_tet_tags(k2)
                perm = [0, 0, 0, 0]
                for i in range(3):
                    corner = tags1[i][1]
                    target = cmap[corner]
                    perm[i] = [tags2[x][1] for x in range(3)].index(target)
                perm[3] = 3
                set_gluing(14 * p1 + k1, 3, 14 * p2 + k2, 3, perm)
                inv = [0, 0, 0, 0]
                for i in range(4):
                    inv[perm[i]] = i
                set_gluing(14 * p2 + k2, 3, 14 * p1 + k1, 3, inv)
            else:
                e1 = face1[1]
                e2 = face2[1]
                cyc1 = _WALL_CYCLE[e1]
                cyc2 = _WALL_CYCLE[e2]
                pos2 = {c: i for i, c in enumerate(cyc2)}
                for j in range(4):
                    a, b_ = cyc1[j], cyc1[(j + 1) % 4]
                    ia, ib = pos2[cmap[a]], pos2[cmap[b_]]
                    if (ia + 1) % 4 == ib:
                        j2, swap = ia, False
                    elif (ib + 1) % 4 == ia:
                        j2, swap = ib, True
                    else:
                        raise InternalInvariantError(
                            "rectangle gluing is not a square symmetry")
                    k1 = 2 + 4 * e1 + j
                    k2 = 2 + 4 * e2 + j2
                    perm = [0, 0, 0, 0]
                    perm[0] = 1 if swap else 0
                    perm[1] = 0 if swap else 1
                    perm[2] = 2
                    perm[3] = 3
                    set_gluing(14 * p1 + k1, 3, 14 * p2 + k2, 3, perm)
                    inv = [0, 0, 0, 0]
                    for i in range(4):
                        inv[perm[i]] = i
                    set_gluing(14 * p2 + k2, 3, 14 * p1 + k1, 3, inv)
        if bool((glue_tet < 0).any()):
            raise InternalInvariantError(
                "prism complex is not closed after doubling")
        return Triangulation.from_arrays(glue_tet, glue_face, glue_perm)


# ---------------------------------------------------------------------------
# the reduction
# ---------------------------------------------------------------------------

F0_LAYERS = 5
# vertical direction convention for attachments: a literal piece's level 0
# lands on the lower level of its target layer
_ATTACH_FLIP = False


@dataclass
class ReducedInstance:
    """Everything the reduction produces, with provenance for witnesses."""

    instance: CnfInstance
    branching: BranchingSurface
    triangulation: Triangulation
    knot: List[int]
    genus_bound: int
    prisms: int
    # bookkeeping to locate cells of the final triangulation:
    piece_order: List[object]
    piece_tris: Dict[object, int]
    piece_thickness: Dict[object, int]
    piece_offset: Dict[object, int]
    copy_stride: int
    arrivals: Dict[Tuple[object, int], int]   # (piece, circle) -> stack level

    def prism_id(self, copy: int, piece, tri: int, layer: int) -> int:
        th = self.piece_thickness[piece]
        return (copy * self.copy_stride + self.piece_offset[piece]
                + tri * th + layer)

    def tet_id(self, copy: int, piece, tri: int, layer: int, k: int) -> int:
        return 14 * self.prism_id(copy, piece, tri, layer) + k


def reduce_instance(inst: CnfInstance) -> ReducedInstance:
    """Closed triangulation, knot and genus bound for an instance.

    The knot bounds an embedded orientable genus m + n surface exactly
    when some assignment makes every clause carry one true literal; the
    genus bound returned is m + n.
    """
    br = build_branching_surface(inst)
    pieces: Dict[object, PieceTemplate] = {"F0": br.base}
    pieces.update(br.pieces)
    piece_order: List[object] = ["F0"] + sorted(br.pieces.keys())
    thickness = {p: (F0_LAYERS if p == "F0" else 1) for p in piece_order}
    offset: Dict[object, int] = {}
    acc = 0
    for p in piece_order:
        offset[p] = acc
        acc += pieces[p].surface.tris * thickness[p]
    stride = acc
    pc = PrismComplex(2 * stride)

    def prism(copy, piece, tri, layer):
        return copy * stride + offset[piece] + tri * thickness[piece] + layer

    # product structure: stacks and intra-piece walls, in both copies
    for copy in (0, 1):
        for p in piece_order:
            surf = pieces[p].surface
            th = thickness[p]
            for tri in range(surf.tris):
                for layer in range(th - 1):
                    pc.join(prism(copy, p, tri, layer), "T",
                            prism(copy, p, tri, layer + 1), "B",
                            {3: 0, 4: 1, 5: 2})
            seen = set()
            for tri in range(surf.tris):
                for e in range(3):
                    entry = surf.gluings[tri][e]
                    if entry is None or (tri, e) in seen:
                        continue
                    t2, e2, perm3 = entry
                    seen.add((tri, e))
                    seen.add((t2, e2))
                    cmap = {}
                    for x in range(3):
                        if x == e:
                            continue
                        cmap[x] = perm3[x]
                        cmap[x + 3] = perm3[x] + 3
                    for layer in range(th):
                        pc.join(prism(copy, p, tri, layer), ("R", e),
                                prism(copy, p, t2, layer), ("R", e2), cmap)

    # attachments: literal circle walls onto stack layers, both copies
    arrivals: Dict[Tuple[object, int], int] = {}
    for att in br.attachments:
        tp = pieces[att.piece]
        tx, ex, (fa, fb) = tp.boundary[att.piece_circle]
        t0, e0, (ga, gb) = br.base.boundary[att.base_circle]
        xa, xb = [c for c in range(3) if c != ex]
        # corner positions of the circle direction on each side
        corn_x = {"tail": _corner_of(tp, tx, ex, fa),
                  "head": _corner_of(tp, tx, ex, fb)}
        corn_0 = {"tail": _corner_of(br.base, t0, e0, ga),
                  "head": _corner_of(br.base, t0, e0, gb)}
        lo = att.layer if not _ATTACH_FLIP else att.layer + 1
        hi = att.layer + 1 if not _ATTACH_FLIP else att.layer
        # orientation reversing on the circle: tail meets head
        cmap = {
            corn_x["tail"]: corn_0["head"] + 3 * 0,
            corn_x["head"]: corn_0["tail"] + 3 * 0,
            corn_x["tail"] + 3: corn_0["head"] + 3 * 1,
            corn_x["head"] + 3: corn_0["tail"] + 3 * 1,
        }
        if _ATTACH_FLIP:
            cmap = {
                corn_x["tail"]: corn_0["head"] + 3,
                corn_x["head"]: corn_0["tail"] + 3,
                corn_x["tail"] + 3: corn_0["head"],
                corn_x["head"] + 3: corn_0["tail"],
            }
        for copy in (0, 1):
            pc.join(prism(copy, att.piece, tx, 0), ("R", ex),
                    prism(copy, "F0", t0, att.layer), ("R", e0), cmap)
        arrivals[(att.piece, att.piece_circle)] = (
            att.layer + (1 if _ATTACH_FLIP else 0))

    # double: identify the remaining boundary between the copies
    for (p, face) in pc.boundary_faces():
        if p >= stride:
            continue
        ident = ({0: 0, 1: 1, 2: 2} if face == "B"
                 else {3: 3, 4: 4, 5: 5} if face == "T"
                 else {c: c for c in _WALL_CYCLE[face[1]]})
        pc.join(p, face, p + stride, face, ident)

    tri = pc.to_triangulation()
    red = ReducedInstance(inst, br, tri, [], inst.n + inst.m,
                          pc.n, piece_order,
                          {p: pieces[p].surface.tris for p in piece_order},
                          thickness, offset, stride, arrivals)
    tK, eK, (fa, fb) = br.base.boundary[0]
    pK = _corner_of(br.base, tK, eK, fa)
    qK = _corner_of(br.base, tK, eK, fb)
    b_tet = red.tet_id(0, "F0", tK, 0, 0)
    red.knot = [tri.edge_class_of(b_tet, pK, qK)]
    return red


def _corner_of(tp: PieceTemplate, t: int, e: int, pos: int) -> int:
    """Corner position `pos` must lie on edge e (sanity) and is returned."""
    if pos == e:
        raise InternalInvariantError("boundary direction uses the off corner")
    return pos


def reduce(inst: CnfInstance) -> Tuple[Triangulation, List[int], int]:
    """Spec-level entry point: (triangulation, knot, genus bound)."""
    red = reduce_instance(inst)
    return red.triangulation, red.knot, red.genus_bound


# ---------------------------------------------------------------------------
# witness surfaces
# ---------------------------------------------------------------------------

def witness_faces(red: ReducedInstance,
                  assignment: Sequence[bool]) -> List[int]:
    """Face classes of the spanning surface for a satisfying assignment.

    The surface is the union of one flat sheet per chosen literal piece
    and a planar sheet that bends through vertical stack walls so that
    each boundary circle arrives at the level where the chosen piece is
    attached; its single free boundary edge is the knot.
    """
    inst = red.instance
    if not is_one_in_three(inst, assignment):
        raise WitnessError(
            "assignment does not give every clause exactly one true literal")
    tri = red.triangulation
    br = red.branching
    n = inst.n
    chosen = {i: ("pos", i) if assignment[i - 1] else ("neg", i)
              for i in range(1, n + 1)}
    faces: Set[int] = set()

    def face_class(tet: int, f: int) -> int:
        return int(tri.face_classes[4 * tet + f])

    # flat sheets of the chosen pieces, at piece level 0
    for piece in chosen.values():
        tris = red.piece_tris[piece]
        for t in range(tris):
            faces.add(face_class(red.tet_id(0, piece, t, 0, 0), 3))

    # pinned arrival levels for the planar sheet
    level: Dict[int, int] = {}
    tK, eK, _ = br.base.boundary[0]
    level[tK] = 0
    for i in range(1, n + 1):
        piece = chosen[i]
        t0 = br.base.boundary[i][0]
        level[t0] = red.arrivals[(piece, 0)]
    for cj, clause in enumerate(inst.clauses):
        slot = next(s for s, (v, neg) in enumerate(clause)
                    if assignment[v - 1] != neg)
        v, neg = clause[slot]
        piece = chosen[v]
        occ = inst.literal_occurrences(v, neg)
        circle = 1 + occ.index((cj, slot))
        t0 = br.base.boundary[n + 1 + cj][0]
        if t0 in level:
            raise InternalInvariantError("level pinned twice")
        level[t0] = red.arrivals[(piece, circle)]

    surf0 = br.base.surface
    levels = [level.get(t, 0) for t in range(surf0.tris)]

    for t in range(surf0.tris):
        l = levels[t]
        if l == F0_LAYERS:
            faces.add(face_class(red.tet_id(0, "F0", t, F0_LAYERS - 1, 1), 3))
        else:
            faces.add(face_class(red.tet_id(0, "F0", t, l, 0), 3))

    seen = set()
    for t in range(surf0.tris):
        for e in range(3):
            entry = surf0.gluings[t][e]
            if entry is None or (t, e) in seen:
                continue
            t2, e2, _ = entry
            seen.add((t, e))
            seen.add((t2, e2))
            l1, l2 = levels[t], levels[t2]
            for j in range(min(l1, l2), max(l1, l2)):
                for jj in range(4):
                    faces.add(face_class(
                        red.tet_id(0, "F0", t, j, 2 + 4 * e + jj), 3))
    _check_surface_subcomplex(red, sorted(faces))
    return sorted(faces)


def _check_surface_subcomplex(red: ReducedInstance, faces: Sequence[int]):
    """Every edge of the union must be shared by exactly two of its faces,
    except the knot edge, which is free (the surface boundary)."""
    tri = red.triangulation
    from .triangulation import DIR12, FACE_CORNERS
    fc = tri.face_classes
    reps: Dict[int, int] = {}
    for s in range(4 * tri.tets):
        k = int(fc[s])
        if k not in reps:
            reps[k] = s
    counts: Dict[int, int] = {}
    for k in faces:
        s = reps[k]
        t, f = s // 4, s % 4
        cs = FACE_CORNERS[f]
        for i in range(3):
            for j in range(i + 1, 3):
                e = int(tri.edge_classes[12 * t + DIR12[cs[i] * 4 + cs[j]]])
                counts[e] = counts.get(e, 0) + 1
    knot_edge = red.knot[0]
    bad = {e: c for e, c in counts.items()
           if c != (1 if e == knot_edge else 2)}
    if counts.get(knot_edge) != 1 or bad:
        raise InternalInvariantError(
            f"witness subcomplex is not a surface with boundary the knot: "
            f"{list(bad.items())[:4]}")


def assemble(inst: CnfInstance, assignment: Sequence[bool],
             red: Optional[ReducedInstance] = None,
             ctx: Optional[ComplementContext] = None) -> Certificate:
    """Certificate for a satisfying assignment's spanning surface."""
    if red is None:
        red = reduce_instance(inst)
    faces = witness_faces(red, assignment)
    return build_certificate(red.triangulation, red.knot, faces, ctx=ctx)