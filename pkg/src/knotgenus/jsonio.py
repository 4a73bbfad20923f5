"""JSON codecs for the package's file formats.

All integers are serialized as decimal strings so arbitrary-precision
values survive any JSON consumer; integers are also accepted on input.
Formats:

* pairing system: ``{"n": "12", "pairings": [{"domain": ["1","3"],
  "range": ["5","7"], "reversing": false}, ...]}``
* weight list: ``{"d": 2, "entries": [{"interval": ["1","4"],
  "weight": ["3","0"]}, ...]}``
* orbit weight report: weight-list shape plus ``"orbit_count"``
* triangulation: ``{"tets": t, "gluings": [[...4 entries...], ...]}``
  where each entry is ``null`` (boundary face) or ``{"tet": j, "face": k,
  "perm": [..4..]}``; the permutation maps vertex labels of the source
  tetrahedron to the target and sends the glued face index to ``k``.
* knot: list of edge-class ids.
* normal vector: ``{"t": t, "coords": ["0", ...]}`` (dense) or
  ``{"t": t, "support": {"17": "3", ...}}`` (sparse alternative).
* certificate: ``{"w": <normal vector>, "parity_cycle": [edge ids]}``
* CNF instance: ``{"n": 3, "clauses": [[1, -2, 3], ...]}``
"""

from __future__ import annotations

import json
from typing import Any

from .errors import InputError
from .intervals import Pairing, PairingSystem
from .weights import OrbitWeightReport, WeightList


def _as_int(v: Any) -> int:
    if isinstance(v, bool):
        raise InputError(f"expected integer, got boolean {v}")
    if isinstance(v, int):
        return v
    if isinstance(v, str):
        try:
            return int(v, 10)
        except ValueError:
            raise InputError(f"not a decimal integer: {v!r}") from None
    raise InputError(f"expected integer or decimal string, got {type(v)}")


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


# -- pairing systems --------------------------------------------------------

def system_to_json(sys: PairingSystem) -> dict:
    return {
        "n": str(sys.n),
        "pairings": [
            {"domain": [str(p.domain.lo), str(p.domain.hi)],
             "range": [str(p.range.lo), str(p.range.hi)],
             "reversing": p.reversing}
            for p in sys.pairings
        ],
    }


def system_from_json(data: dict) -> PairingSystem:
    try:
        n = _as_int(data["n"])
        pairings = [
            Pairing.make((_as_int(q["domain"][0]), _as_int(q["domain"][1])),
                         (_as_int(q["range"][0]), _as_int(q["range"][1])),
                         bool(q.get("reversing", False)))
            for q in data.get("pairings", [])
        ]
    except (KeyError, IndexError, TypeError) as exc:
        raise InputError(f"malformed pairing system: {exc}") from None
    return PairingSystem(n, pairings)


# -- weights ----------------------------------------------------------------

def weights_to_json(L: WeightList) -> dict:
    return {
        "d": L.d,
        "entries": [
            {"interval": [str(iv.lo), str(iv.hi)],
             "weight": [str(x) for x in vec]}
            for iv, vec in L.entries
        ],
    }


def weights_from_json(data: dict) -> WeightList:
    try:
        d = data.get("d")
        entries = [
            ((_as_int(e["interval"][0]), _as_int(e["interval"][1])),
             tuple(_as_int(x) for x in e["weight"]))
            for e in data.get("entries", [])
        ]
    except (KeyError, IndexError, TypeError) as exc:
        raise InputError(f"malformed weight list: {exc}") from None
    return WeightList.make(entries, d=None if d is None else _as_int(d))


def report_to_json(rep: OrbitWeightReport) -> dict:
    return {
        "orbit_count": str(rep.orbit_count),
        "entries": [
            {"interval": [str(iv.lo), str(iv.hi)],
             "weight": [str(x) for x in vec]}
            for iv, vec in rep.entries
        ],
    }


# -- triangulations ---------------------------------------------------------

def triangulation_to_json(tri) -> dict:
    rows = []
    for tet in range(tri.tets):
        row = []
        for face in range(4):
            g = tri.gluing(tet, face)
            if g is None:
                row.append(None)
            else:
                t2, f2, perm = g
                row.append({"tet": int(t2), "face": int(f2),
                            "perm": [int(x) for x in perm]})
        rows.append(row)
    return {"tets": tri.tets, "gluings": rows}


def triangulation_from_json(data: dict):
    from .triangulation import Triangulation
    try:
        tets = _as_int(data["tets"])
        table = []
        for row in data["gluings"]:
            out = []
            for entry in row:
                if entry is None:
                    out.append(None)
                else:
                    out.append((_as_int(entry["tet"]), _as_int(entry["face"]),
                                tuple(_as_int(x) for x in entry["perm"])))
            table.append(out)
    except (KeyError, IndexError, TypeError) as exc:
        raise InputError(f"malformed triangulation: {exc}") from None
    return Triangulation(tets, table)


# -- normal vectors ---------------------------------------------------------

def normal_vector_to_json(vec, sparse: bool = False) -> dict:
    if sparse:
        return {"t": vec.t,
                "support": {str(i): str(v) for i, v in vec.support()}}
    return {"t": vec.t, "coords": [str(x) for x in vec.coords()]}


def normal_vector_from_json(data: dict):
    from .surfaces import NormalVector
    try:
        t = _as_int(data["t"])
        if "coords" in data:
            coords = [_as_int(x) for x in data["coords"]]
            return NormalVector.dense(t, coords)
        support = {_as_int(i): _as_int(v)
                   for i, v in data["support"].items()}
        return NormalVector.sparse(t, support)
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed normal vector: {exc}") from None


def certificate_to_json(cert) -> dict:
    big = cert.w.t > 4096
    return {"w": normal_vector_to_json(cert.w, sparse=big),
            "parity_cycle": [int(e) for e in cert.parity_cycle]}


def certificate_from_json(data: dict):
    from .certify import Certificate
    try:
        w = normal_vector_from_json(data["w"])
        cycle = [_as_int(e) for e in data["parity_cycle"]]
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed certificate: {exc}") from None
    return Certificate(w, cycle)


# -- CNF instances ----------------------------------------------------------

def cnf_to_json(inst) -> dict:
    return {"n": inst.n,
            "clauses": [[(-v if neg else v) for v, neg in clause]
                        for clause in inst.clauses]}


def cnf_from_json(data: dict):
    from .satreduce import CnfInstance
    try:
        n = _as_int(data["n"])
        clauses = []
        for cl in data["clauses"]:
            lits = []
            for lit in cl:
                lit = _as_int(lit)
                lits.append((abs(lit), lit < 0))
            clauses.append(tuple(lits))
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed CNF instance: {exc}") from None
    return CnfInstance(n, clauses)


def cnf_from_dimacs(text: str):
    """Parse the DIMACS-like format restricted to 3-literal clauses."""
    from .satreduce import CnfInstance
    n = None
    clauses = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) < 4 or parts[1] != "cnf":
                raise InputError(f"bad problem line: {line!r}")
            n = int(parts[2])
            continue
        lits = [int(x) for x in line.split()]
        if lits and lits[-1] == 0:
            lits = lits[:-1]
        if not lits:
            continue
        if len(lits) != 3:
            raise InputError(f"clause {lits} does not have 3 literals")
        clauses.append(tuple((abs(x), x < 0) for x in lits))
    if n is None:
        n = max((v for cl in clauses for v, _ in cl), default=0)
    return CnfInstance(n, clauses)


def cnf_to_dimacs(inst) -> str:
    lines = [f"p cnf {inst.n} {len(inst.clauses)}"]
    for clause in inst.clauses:
        lines.append(" ".join(str(-v if neg else v)
                              for v, neg in clause) + " 0")
    return "\n".join(lines) + "\n"
