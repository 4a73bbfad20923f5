"""Named test fixtures and randomized admissible vector generation.

Catalog (see the README for descriptions):

* ``ball1``        one unglued tetrahedron (3-ball)
* ``ball2``        two tetrahedra sharing one face (3-ball)
* ``sphere2``      double of ball1 (the 2-tetrahedron 3-sphere)
* ``sphere4``      double of ball2
* ``solidtorus1``  one tetrahedron with two faces self-glued (solid torus)
* ``solidtorus2``  double-layered variant with 2 tetrahedra
* ``badedge``      invalid complex: an edge glued to itself reversed
* ``periodic7``    pairing system: width 7, one periodic pairing, 2 orbits
* ``figure3``      the two-clause instance (u1 v u2 v u3)(u1 v ~u2 v ~u3)
* ``smallest_sat`` one-clause instance over one variable
"""

from __future__ import annotations

import random
from typing import Dict, List, Optional, Sequence, Tuple

from . import jsonio
from .errors import InputError
from .surfaces import NormalVector, QUAD_PAIR, check_admissible
from .triangulation import FACE_CORNERS, S4_ARR, Triangulation

_IDENT = (0, 1, 2, 3)


def ball1() -> Triangulation:
    return Triangulation(1, [[None] * 4])


def ball2() -> Triangulation:
    # glue face 0 of each to the other; vertices match identically
    return Triangulation(2, [
        [(1, 0, _IDENT), None, None, None],
        [(0, 0, _IDENT), None, None, None],
    ])


def double(tri: Triangulation) -> Triangulation:
    """Two copies glued along every boundary face by the identity."""
    t = tri.tets
    rows = []
    for copy in (0, 1):
        for tet in range(t):
            row = []
            for f in range(4):
                g = tri.gluing(tet, f)
                if g is None:
                    mirror = tet + t if copy == 0 else tet
                    row.append((mirror, f, _IDENT))
                else:
                    t2, f2, perm = g
                    row.append((t2 + copy * t, f2, perm))
            rows.append(row)
    return Triangulation(2 * t, rows)


def sphere2() -> Triangulation:
    return double(ball1())


def sphere4() -> Triangulation:
    return double(ball2())


def solidtorus1() -> Triangulation:
    perm = (1, 2, 3, 0)
    inv = tuple(perm.index(i) for i in range(4))
    return Triangulation(1, [[(0, 1, perm), (0, 0, inv), None, None]])


def solidtorus2() -> Triangulation:
    # layer one tetrahedron onto the solid torus along a boundary face
    perm = (1, 2, 3, 0)
    inv = tuple(perm.index(i) for i in range(4))
    return Triangulation(2, [
        [(0, 1, perm), (0, 0, inv), (1, 2, _IDENT), None],
        [None, None, (0, 2, _IDENT), None],
    ])


def badedge() -> Triangulation:
    """A face self-gluing that reverses an edge onto itself."""
    return Triangulation(1, [[(0, 0, (0, 2, 1, 3)), None, None, None]])


def figure3_instance():
    from .satreduce import CnfInstance
    return CnfInstance(3, [
        ((1, False), (2, False), (3, False)),
        ((1, False), (2, True), (3, True)),
    ])


def smallest_sat_instance():
    from .satreduce import CnfInstance
    return CnfInstance(1, [((1, False), (1, False), (1, True))])


def periodic7_system():
    from .intervals import Pairing, PairingSystem
    return PairingSystem(7, [Pairing.make((1, 5), (3, 7))])


MANIFOLDS = {
    "ball1": ball1,
    "ball2": ball2,
    "sphere2": sphere2,
    "sphere4": sphere4,
    "solidtorus1": solidtorus1,
    "solidtorus2": solidtorus2,
    "badedge": badedge,
}


def generate(name: str, seed: int = 0):
    """JSON payload of a named fixture (CLI `gen fixture NAME`)."""
    if name in MANIFOLDS:
        return jsonio.triangulation_to_json(MANIFOLDS[name]())
    if name == "periodic7":
        return jsonio.system_to_json(periodic7_system())
    if name == "figure3":
        return jsonio.cnf_to_json(figure3_instance())
    if name == "smallest_sat":
        return jsonio.cnf_to_json(smallest_sat_instance())
    if name == "random_system":
        rng = random.Random(seed)
        return jsonio.system_to_json(random_pairing_system(rng))
    raise InputError(f"unknown fixture {name!r}; see the catalog in the "
                     "fixtures module")


def random_pairing_system(rng: random.Random, max_n: int = 5000,
                          max_k: int = 12, min_k: int = 1):
    from .intervals import Pairing, PairingSystem
    n = rng.randint(1, max_n)
    k = rng.randint(min_k, max_k)
    ps = []
    for _ in range(k):
        w = rng.randint(1, n)
        a = rng.randint(1, n - w + 1)
        c = rng.randint(1, n - w + 1)
        rev = rng.random() < 0.5 and not (a == c and w == 1)
        ps.append(Pairing.make((a, a + w - 1), (c, c + w - 1), rev))
    return PairingSystem(n, ps)


# ---------------------------------------------------------------------------
# admissible vector sampling
# ---------------------------------------------------------------------------

def vertex_link_vector(tri: Triangulation, vertex_class: int) -> NormalVector:
    """All triangle types cutting off the corners of one vertex class."""
    vc = tri.vertex_classes
    support: Dict[int, int] = {}
    for tet in range(tri.tets):
        for v in range(4):
            if vc[4 * tet + v] == vertex_class:
                idx = 7 * tet + v
                support[idx] = support.get(idx, 0) + 1
    return NormalVector.sparse(tri.tets, support)


def random_admissible_vector(tri: Triangulation, rng: random.Random,
                             max_quad: int = 3,
                             max_link_coeff: int = 4) -> NormalVector:
    """Random admissible vector: quads solved by corner potentials.

    Picks one quadrilateral type with a small count for a random subset
    of tetrahedra, propagates the forced triangle-count differences
    through the face identifications, lifts everything nonnegative, and
    adds random multiples of vertex links.  Retries until the potential
    assignment is consistent (it always is when no quads are chosen).
    """
    t = tri.tets
    for _attempt in range(60):
        quads: Dict[int, Tuple[int, int]] = {}
        for tet in range(t):
            if rng.random() < 0.4:
                quads[tet] = (4 + rng.randrange(3), rng.randint(1, max_quad))

        def quad_at(tet: int, q: int) -> int:
            got = quads.get(tet)
            return got[1] if got and got[0] == q else 0

        # corner potentials: T(tet2, sx) - T(tet1, x) is forced per face
        pot: Dict[int, int] = {}
        ok = True
        slots = tri._interior_one_side()
        edges: List[Tuple[int, int, int]] = []
        for s in slots.tolist():
            t1, f1 = s // 4, s % 4
            t2 = int(tri.glue_tet[s])
            f2 = int(tri.glue_face[s])
            perm = S4_ARR[tri.glue_perm[s]]
            for x in FACE_CORNERS[f1]:
                sx = int(perm[x])
                delta = (quad_at(t1, int(QUAD_PAIR[x, f1]))
                         - quad_at(t2, int(QUAD_PAIR[sx, f2])))
                edges.append((4 * t1 + x, 4 * t2 + sx, delta))
        adj: Dict[int, List[Tuple[int, int]]] = {}
        for a, b, d in edges:
            adj.setdefault(a, []).append((b, d))
            adj.setdefault(b, []).append((a, -d))
        for start in range(4 * t):
            if start in pot:
                continue
            pot[start] = 0
            stack = [start]
            while stack and ok:
                u = stack.pop()
                for (v, d) in adj.get(u, []):
                    want = pot[u] + d
                    if v not in pot:
                        pot[v] = want
                        stack.append(v)
                    elif pot[v] != want:
                        ok = False
                        break
            if not ok:
                break
        if not ok:
            continue
        # lift each vertex class to a nonnegative base + random link coeff
        vc = tri.vertex_classes
        base: Dict[int, int] = {}
        for corner, p in pot.items():
            cl = int(vc[corner])
            base[cl] = min(base.get(cl, 0), p)
        coeff = {cl: -base[cl] + rng.randint(0, max_link_coeff)
                 for cl in base}
        support: Dict[int, int] = {}
        for corner, p in pot.items():
            tet, x = divmod(corner, 4)
            val = p + coeff[int(vc[corner])]
            if val:
                support[7 * tet + x] = val
        for tet, (q, cnt) in quads.items():
            support[7 * tet + q] = cnt
        vec = NormalVector.sparse(t, support)
        adm = check_admissible(tri, vec)
        if adm.ok:
            return vec
    # quad-free fallback: a sum of vertex links is always admissible
    vec = NormalVector(t, {})
    for cl in range(tri.vertex_count):
        k = rng.randint(0, max_link_coeff)
        if k:
            vec = vec + vertex_link_vector(tri, cl).scaled(k)
    return vec
