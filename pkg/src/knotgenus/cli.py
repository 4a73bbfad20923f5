"""Command-line interface: every pipeline stage with JSON input/output.

Exit codes: 0 success (or certificate accepted), 1 certificate rejected,
2 malformed input or usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from . import jsonio
from .errors import InputError, OracleCapacityError
from .intervals import PairingSystem, count_orbits, count_orbits_oracle
from .weights import weighted_count, weighted_count_oracle


def _load(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _emit(obj) -> None:
    sys.stdout.write(jsonio.dumps(obj))


def _write_trace(path: Optional[str], sys_: PairingSystem) -> None:
    if path is None or sys_.trace is None:
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("cycle,step,n,k,x\n")
        for cycle, step, n, k, x in sys_.trace:
            fh.write(f"{cycle},{step},{n},{k},{x}\n")


def _cmd_orbits(args) -> int:
    sys_ = jsonio.system_from_json(_load(args.file))
    if args.mode == "count":
        res = count_orbits(sys_, keep_trace=args.trace is not None)
        _write_trace(args.trace, sys_)
        print(res)
    elif args.mode == "oracle":
        print(count_orbits_oracle(sys_, cap=args.oracle_cap))
    else:  # weighted
        weights = jsonio.weights_from_json(_load(args.weights))
        rep = weighted_count(sys_, weights, keep_trace=args.trace is not None)
        _write_trace(args.trace, sys_)
        _emit(jsonio.report_to_json(rep))
    return 0


def _cmd_surface(args) -> int:
    from . import surfaces
    tri = jsonio.triangulation_from_json(_load(args.triangulation))
    vec = jsonio.normal_vector_from_json(_load(args.vector))
    if args.mode == "admissible":
        adm = surfaces.check_admissible(tri, vec)
        _emit({"admissible": adm.ok, "reason": adm.reason})
        return 0
    if args.mode == "components":
        print(surfaces.count_components(tri, vec))
        return 0
    rep = surfaces.analyze_components(tri, vec)
    out = []
    for c in rep.components:
        out.append({
            "vector": jsonio.normal_vector_to_json(c.vector,
                                                   sparse=c.vector.t > 4096),
            "weight": str(c.weight),
            "euler_characteristic": str(c.euler_characteristic),
            "orientable": c.orientable,
            "boundary_components": str(c.boundary_components),
            "genus": None if c.genus is None else str(c.genus),
        })
    _emit(out)
    return 0


def _cmd_reduce(args) -> int:
    from . import satreduce
    if args.file.endswith(".cnf") or args.file.endswith(".dimacs"):
        with open(args.file, "r", encoding="utf-8") as fh:
            inst = jsonio.cnf_from_dimacs(fh.read())
    else:
        inst = jsonio.cnf_from_json(_load(args.file))
    if args.mode == "sat":
        tri, knot, g = satreduce.reduce(inst)
        _emit({"triangulation": jsonio.triangulation_to_json(tri),
               "knot": [int(e) for e in knot],
               "genus_bound": g})
        return 0
    assignment = tuple(bool(int(x)) for x in args.assignment.split(","))
    cert = satreduce.assemble(inst, assignment)
    _emit(jsonio.certificate_to_json(cert))
    return 0


def _cmd_verify(args) -> int:
    from .certify import verify
    tri = jsonio.triangulation_from_json(_load(args.triangulation))
    knot = [int(e) for e in _load(args.knot)]
    cert = jsonio.certificate_from_json(_load(args.certificate))
    res = verify(tri, knot, args.genus, cert)
    _emit(res.to_json())
    return 0 if res.accepted else 1


def _cmd_gen(args) -> int:
    from . import fixtures
    obj = fixtures.generate(args.name, seed=args.seed)
    _emit(obj)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="knotgenus",
        description="exact orbit counting, normal surface analysis and "
                    "knot genus certificates")
    ap.add_argument("--trace", metavar="CSVPATH",
                    help="write the engine's per-step instrumentation rows")
    ap.add_argument("--seed", type=int, default=0,
                    help="seed for randomized fixture generation")
    ap.add_argument("--oracle-cap", type=int, default=10**6,
                    help="point cap for brute-force oracles")
    sub = ap.add_subparsers(dest="command", required=True)

    orbits = sub.add_parser("orbits", help="interval pairing orbit counting")
    osub = orbits.add_subparsers(dest="mode", required=True)
    for mode in ("count", "oracle"):
        p = osub.add_parser(mode)
        p.add_argument("file")
    pw = osub.add_parser("weighted")
    pw.add_argument("file")
    pw.add_argument("weights")

    surface = sub.add_parser("surface", help="normal surface analysis")
    ssub = surface.add_subparsers(dest="mode", required=True)
    for mode in ("components", "analyze", "admissible"):
        p = ssub.add_parser(mode)
        p.add_argument("triangulation")
        p.add_argument("vector")

    red = sub.add_parser("reduce", help="one-in-three SAT compilation")
    rsub = red.add_subparsers(dest="mode", required=True)
    p = rsub.add_parser("sat")
    p.add_argument("file")
    p = rsub.add_parser("witness")
    p.add_argument("file")
    p.add_argument("assignment", help="comma-separated 0/1 values")

    ver = sub.add_parser("verify", help="check a genus certificate")
    ver.add_argument("triangulation")
    ver.add_argument("knot")
    ver.add_argument("genus", type=int)
    ver.add_argument("certificate")

    gen = sub.add_parser("gen", help="emit a named fixture")
    gsub = gen.add_subparsers(dest="mode", required=True)
    p = gsub.add_parser("fixture")
    p.add_argument("name")
    return ap


def dispatch(argv) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        if args.command == "orbits":
            return _cmd_orbits(args)
        if args.command == "surface":
            return _cmd_surface(args)
        if args.command == "reduce":
            return _cmd_reduce(args)
        if args.command == "verify":
            return _cmd_verify(args)
        if args.command == "gen":
            return _cmd_gen(args)
    except (InputError, OracleCapacityError, FileNotFoundError,
            json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 2


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
