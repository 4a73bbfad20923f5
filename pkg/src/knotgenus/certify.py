"""Genus certificates: construction and verification.

A certificate for "knot K in closed triangulation T bounds genus <= g"
consists of a normal vector in the knot complement and a parity cycle on
the complement's boundary torus.  Both sides agree on the complement:
the verifier rebuilds the second barycentric subdivision of T and removes
the closed star of the subdivided knot; the tetrahedron order of that
construction is deterministic, so certificate coordinates are
unambiguous.

``verify`` runs the stages in order (instance re-checks, admissibility,
boundary parity, connectedness, boundary connectedness, orientability,
genus) and reports the first failed stage.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import InputError, InternalInvariantError
from .intervals import count_orbits
from .surfaces import (
    NormalVector,
    boundary_curve,
    check_admissible,
    count_components,
    count_curve_components,
    euler_characteristic,
    _edge_weights,
)
from .triangulation import (
    BaryTriangulation,
    CellMarks,
    FACE_CORNERS,
    Triangulation,
    barycentric_subdivide,
    check_knot,
    is_null_homologous,
    knot_cell_marks,
    remove_tets,
    validate_manifold,
)


@dataclass(frozen=True)
class Certificate:
    """Spanning-surface witness: normal vector plus a parity cycle."""

    w: NormalVector
    parity_cycle: Tuple[int, ...]

    def __init__(self, w: NormalVector, parity_cycle: Sequence[int]):
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "parity_cycle", tuple(parity_cycle))


@dataclass
class ComplementContext:
    """Everything both producer and verifier derive from (T, K)."""

    base: Triangulation
    knot: Tuple[int, ...]
    first: BaryTriangulation
    second: BaryTriangulation
    knot_vertex_marks: np.ndarray     # over second-subdivision vertex classes
    complement: Triangulation
    kept: np.ndarray                  # kept tet ids in the subdivision


def _marks_to_vertexmask(bary1: BaryTriangulation,
                         marks: CellMarks) -> np.ndarray:
    """Vertex mask of a subcomplex in the SECOND subdivision.

    Vertices of the second subdivision are the cells of the first; a
    barycenter lies on the subcomplex exactly when its cell does.
    """
    m1 = bary1.subdivided_marks(marks)
    return np.concatenate([m1.vertices, m1.edges, m1.faces, m1.tets])


def complement_pipeline(tri: Triangulation,
                        knot: Sequence[int]) -> ComplementContext:
    """Second barycentric subdivision of T minus the star of the knot."""
    check_knot(tri, knot)
    b1 = barycentric_subdivide(tri)
    b2 = barycentric_subdivide(b1)
    vmask = _marks_to_vertexmask(b1, knot_cell_marks(tri, knot))
    touched = vmask[b2.vertex_classes].reshape(b2.tets, 4).any(axis=1)
    if bool(touched.all()):
        raise InputError("knot star covers the whole subdivision")
    comp, kept = remove_tets(b2, ~touched)
    surf = comp.boundary_surface()
    ncomp = surf.component_count()
    chi = surf.euler_characteristic()
    if ncomp != 1 or chi != 0:
        raise InternalInvariantError(
            f"complement boundary is not one torus "
            f"(components {ncomp}, chi {chi})")
    return ComplementContext(tri, tuple(knot), b1, b2, vmask, comp, kept)


# ---------------------------------------------------------------------------
# the one-sided push-off of an embedded surface subcomplex
# ---------------------------------------------------------------------------

def surface_cell_marks(tri: Triangulation,
                       faces: Sequence[int]) -> CellMarks:
    """Closure marks of a set of face classes (a 2-subcomplex)."""
    fmarks = np.zeros(tri.face_class_count, dtype=bool)
    for f in faces:
        fmarks[f] = True
    vmarks = np.zeros(tri.vertex_count, dtype=bool)
    emarks = np.zeros(tri.edge_class_count, dtype=bool)
    fc = tri.face_classes
    vc = tri.vertex_classes
    ec = tri.edge_classes
    from .triangulation import DIR12
    for s in range(4 * tri.tets):
        if not fmarks[fc[s]]:
            continue
        t, f = s // 4, s % 4
        cs = FACE_CORNERS[f]
        for v in cs:
            vmarks[vc[4 * t + v]] = True
        for i in range(3):
            for j in range(i + 1, 3):
                emarks[ec[12 * t + DIR12[cs[i] * 4 + cs[j]]]] = True
    return CellMarks(vmarks, emarks, fmarks,
                     np.zeros(tri.tets, dtype=bool))


def pushoff_vector(ctx: ComplementContext,
                   faces: Sequence[int]) -> NormalVector:
    """Normal coordinates of the surface pushed off to one side.

    The subcomplex becomes full in the second subdivision, so the level
    surface separating its vertices from the rest of each tetrahedron is
    normal; restricting to one side component of the complement of the
    subcomplex inside the knot complement gives an embedded copy of the
    surface, properly ended on the boundary torus.
    """
    b2, comp, kept = ctx.second, ctx.complement, ctx.kept
    smask = _marks_to_vertexmask(ctx.first,
                                 surface_cell_marks(ctx.base, faces))
    corner_marks = smask[b2.vertex_classes].reshape(b2.tets, 4)[kept]
    acount = corner_marks.sum(axis=1)
    if int(acount.max(initial=0)) >= 4:
        raise InternalInvariantError(
            "subcomplex is not full in the second subdivision")
    nodes = np.flatnonzero(acount >= 1)
    node_rank = -np.ones(comp.tets, dtype=np.int64)
    node_rank[nodes] = np.arange(nodes.size)
    # side graph: adjacency through faces that do not lie on the surface
    slots = comp._interior_one_side()
    t1 = slots // 4
    t2 = comp.glue_tet[slots].astype(np.int64)
    both = (node_rank[t1] >= 0) & (node_rank[t2] >= 0)
    f1 = slots % 4
    corner_all = np.ones(slots.size, dtype=bool)
    cm = corner_marks
    for j in range(3):
        corner = np.array(FACE_CORNERS, dtype=np.int64)[f1, j]
        corner_all &= cm[t1, corner]
    usable = both & ~corner_all
    from .triangulation import _components
    labels, ncomp = _components(nodes.size,
                                node_rank[t1[usable]],
                                node_rank[t2[usable]])
    sides = np.unique(labels)
    if sides.size != 2:
        raise InternalInvariantError(
            f"surface neighborhood has {sides.size} sides (expected 2)")
    plus = labels == labels[0]
    support: Dict[int, int] = {}
    cm_nodes = cm[nodes]
    a_nodes = acount[nodes]
    for i in np.flatnonzero(plus).tolist():
        tet = int(nodes[i])
        marked = cm_nodes[i]
        a = int(a_nodes[i])
        if a == 1:
            j = int(np.flatnonzero(marked)[0])
        elif a == 3:
            j = int(np.flatnonzero(~marked)[0])
        else:
            u, v = np.flatnonzero(marked).tolist()
            from .surfaces import QUAD_PAIR
            j = int(QUAD_PAIR[u, v])
        support[7 * tet + j] = 1
    return NormalVector.sparse(comp.tets, support)


# ---------------------------------------------------------------------------
# parity cycles
# ---------------------------------------------------------------------------

def boundary_edge_classes(tri: Triangulation) -> set:
    """3d edge classes that lie on the boundary."""
    out = set()
    from .triangulation import DIR12
    ec = tri.edge_classes
    for s in tri.boundary_slots.tolist():
        t, f = s // 4, s % 4
        cs = FACE_CORNERS[f]
        for i in range(3):
            for j in range(i + 1, 3):
                out.add(int(ec[12 * t + DIR12[cs[i] * 4 + cs[j]]]))
    return out


def parity_check(tri: Triangulation, v: NormalVector,
                 cycle: Sequence[int]) -> int:
    """Parity of the intersection count of the surface boundary with a
    closed edge walk on the boundary (sum of edge weights mod 2)."""
    if not cycle:
        return 0
    bdry = boundary_edge_classes(tri)
    for e in cycle:
        if e not in bdry:
            raise InputError(f"cycle edge {e} is not a boundary edge")
    ew = _edge_weights(tri, v)
    return sum(ew.get(int(e), 0) for e in cycle) % 2


def find_odd_cycle(tri: Triangulation, v: NormalVector) -> List[int]:
    """A boundary 1-skeleton cycle meeting the surface boundary oddly.

    Walks the fundamental cycles of a spanning tree of the boundary
    1-skeleton and returns the first with odd total crossing weight.
    """
    surf = tri.boundary_surface()
    klass, ne, _ = surf.edge_slot_classes()
    vclasses = surf.vertex_classes()
    ew = _edge_weights(tri, v)
    from .triangulation import DIR12
    ec3 = tri.edge_classes
    # per surface edge class: endpoints (surface vertex classes) + 3d class
    info: Dict[int, Tuple[int, int, int]] = {}
    slots = surf.parent_slots
    for t in range(surf.tris):
        s3 = int(slots[t])
        tet, f = s3 // 4, s3 % 4
        cs = FACE_CORNERS[f]
        for e in range(3):
            k = klass[3 * t + e]
            if k in info:
                continue
            lo, hi = [c for c in range(3) if c != e]
            e3 = int(ec3[12 * tet + DIR12[cs[lo] * 4 + cs[hi]]])
            info[k] = (vclasses[3 * t + lo], vclasses[3 * t + hi], e3)
    nvert = surf.vertex_count()
    adj: Dict[int, List[Tuple[int, int]]] = {i: [] for i in range(nvert)}
    for k, (a, b, e3) in info.items():
        adj[a].append((b, k))
        adj[b].append((a, k))
    parent = {0: (None, None)}
    order = [0]
    seen = {0}
    i = 0
    while i < len(order):
        u = order[i]
        i += 1
        for (w_, k) in adj[u]:
            if w_ not in seen:
                seen.add(w_)
                parent[w_] = (u, k)
                order.append(w_)
    tree_edges = {k for (_, k) in parent.values() if k is not None}

    def path_to_root(u):
        out = []
        while parent[u][0] is not None:
            out.append(parent[u][1])
            u = parent[u][0]
        return out, u

    for k, (a, b, e3) in sorted(info.items()):
        if k in tree_edges:
            continue
        pa, _ = path_to_root(a)
        pb, _ = path_to_root(b)
        # drop the common tail of the two root paths
        while pa and pb and pa[-1] == pb[-1]:
            pa.pop()
            pb.pop()
        cyc = [k] + pa + pb
        edges3 = [info[kk][2] for kk in cyc]
        if sum(ew.get(e, 0) for e in edges3) % 2 == 1:
            return edges3
    raise InternalInvariantError(
        "no odd parity cycle exists; surface boundary is not essential")


def build_certificate(tri: Triangulation, knot: Sequence[int],
                      faces: Sequence[int],
                      ctx: Optional[ComplementContext] = None) -> Certificate:
    """Certificate from a spanning-surface subcomplex of T."""
    if ctx is None:
        ctx = complement_pipeline(tri, knot)
    w = pushoff_vector(ctx, faces)
    cycle = find_odd_cycle(ctx.complement, w)
    return Certificate(w, cycle)


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------

@dataclass
class VerifyResult:
    accepted: bool
    reason: Optional[str]
    stats: Dict[str, object] = field(default_factory=dict)

    def __bool__(self):
        return self.accepted

    def to_json(self) -> dict:
        out = {"accepted": self.accepted}
        if self.reason is not None:
            out["reason"] = self.reason
        out["stats"] = {k: (str(v) if isinstance(v, int) else v)
                        for k, v in self.stats.items()}
        return out


def verify(tri: Triangulation, knot: Sequence[int], g: int,
           cert: Certificate,
           ctx: Optional[ComplementContext] = None) -> VerifyResult:
    """Accept when the certificate proves a genus <= g spanning surface.

    Stages, in order: manifold and knot re-checks, homology triviality,
    complement construction, admissibility, boundary parity,
    connectedness, boundary connectedness, orientability, genus.  The
    result names the first failed stage; malformed inputs raise
    InputError instead of rejecting.
    """
    stats: Dict[str, object] = {}
    t0 = time.monotonic()
    if g < 0:
        raise InputError("genus bound must be nonnegative")

    rep = validate_manifold(tri)
    if not rep.valid or not rep.is_closed:
        return VerifyResult(False, "manifold", {"failures": rep.failures})
    try:
        check_knot(tri, knot)
    except InputError as exc:
        return VerifyResult(False, "knot", {"detail": str(exc)})
    if not is_null_homologous(tri, knot):
        return VerifyResult(False, "homology", {})

    if ctx is None:
        ctx = complement_pipeline(tri, knot)
    comp = ctx.complement
    stats["complement_tets"] = comp.tets
    if cert.w.t != comp.tets:
        raise InputError(
            f"certificate vector is for {cert.w.t} tetrahedra; the "
            f"complement has {comp.tets}")

    adm = check_admissible(comp, cert.w)
    if not adm:
        return VerifyResult(False, "admissible", {"detail": adm.reason})

    try:
        par = parity_check(comp, cert.w, cert.parity_cycle)
    except InputError as exc:
        raise
    if par != 1:
        return VerifyResult(False, "parity", stats)

    ncomp = count_components(comp, cert.w)
    stats["components"] = ncomp
    if ncomp != 1:
        return VerifyResult(False, "connected", stats)

    surf, cv = boundary_curve(comp, cert.w)
    nb = count_curve_components(surf, cv)
    stats["boundary_components"] = nb
    if nb != 1:
        return VerifyResult(False, "boundary", stats)

    ndouble = count_components(comp, cert.w.scaled(2))
    stats["double_components"] = ndouble
    if ndouble != 2:
        return VerifyResult(False, "orientable", stats)

    chi = euler_characteristic(comp, cert.w)
    stats["euler_characteristic"] = chi
    genus_f = (1 - chi) // 2
    if (1 - chi) % 2:
        return VerifyResult(False, "genus", stats)
    stats["genus"] = genus_f
    stats["seconds"] = round(time.monotonic() - t0, 3)
    if genus_f > g:
        return VerifyResult(False, "genus", stats)
    return VerifyResult(True, None, stats)