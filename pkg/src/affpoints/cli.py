"""Command-line front end.

Subcommands: ellipsoid (john|loewner), points, symmetry, phi, dualzeros,
dist, family (verify|phi-table).  Bodies come from JSON documents conforming
to schemas/body.schema.json (print it with --schema).  Reports go to stdout
as JSON (CSV for phi-table), every numeric accompanied by the tolerance or
standard-error bound it was computed under, and are byte-identical for
identical configuration and seed.

Exit codes: 0 success, 1 verification or computation failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

import numpy as np

from .bodies import AffineMap, BodyError, ConvexBody, polar
from .bodyjson import BodyJSONError, parse_body, schema_text
from .config import CONFIG
from .ellipsoids import SolverError, john, loewner, verify_contact_system
from .families import (FamilyError, contact_system_K, family_params,
                       phi_jl_Cd_closed_form)
from .measures import (MeasureError, dual_zero_search, phi_measure,
                       point_distance_estimate)
from .points import (POINT_MAPS, PointError, centroid, centroid_is_exact,
                     point_map, santalo)
from .symmetry import SymmetryError, fixed_space, symmetry_group

__all__ = ["main"]

# dotted config keys accepted by --set, mapped to RunConfig attributes
_CONFIG_KEYS = {
    "tol.boundary": "boundary_tol",
    "tol.support": "support_tol",
    "tol.solver": "solver_tol",
    "tol.group": "group_tol",
    "polar.margin": "polar_margin",
    "samples.sphere": "sphere_samples",
    "samples.mc": "mc_samples",
    "mc.max_stderr": "mc_max_stderr",
    "seed": "seed",
    "kernels": "kernels",
}


def _fail(message: str, code: int) -> int:
    print(f"affpoints: {message}", file=sys.stderr)
    return code


def _apply_sets(pairs: Optional[List[str]]) -> None:
    for pair in pairs or []:
        if "=" not in pair:
            raise ValueError(f"--set expects key=value, got {pair!r}")
        key, _, raw = pair.partition("=")
        attr = _CONFIG_KEYS.get(key.strip())
        if attr is None:
            raise ValueError(
                f"unknown config key {key!r}; known keys: "
                + ", ".join(sorted(_CONFIG_KEYS)))
        current = getattr(CONFIG, attr)
        value = type(current)(raw) if not isinstance(current, str) else raw
        setattr(CONFIG, attr, value)


def _emit(report: dict) -> None:
    print(json.dumps(report, indent=2, sort_keys=True))


def _load_body(path: str) -> ConvexBody:
    return parse_body(path)


def _contacts_field(result) -> Optional[list]:
    sys_ = result.contact_points
    if sys_ is None:
        return None
    return [{"point": p.tolist(), "weight": float(w)}
            for p, w in zip(sys_, result.contact_weights)]


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_ellipsoid(args) -> int:
    body = _load_body(args.body)
    tol = args.tol if args.tol is not None else CONFIG.solver_tol
    if args.which == "john":
        res = john(body, tol=tol)
    else:
        res = loewner(body, n_samples=args.samples, tol=tol)
    _emit({
        "center": res.ellipsoid.center.tolist(),
        "shape": res.ellipsoid.shape.tolist(),
        "residual": float(res.residual),
        "tol": float(tol),
        "iterations": int(res.iterations),
        "method": res.method,
        "contacts": _contacts_field(res),
    })
    return 0


def _cmd_points(args) -> int:
    body = _load_body(args.body)
    names = [w.strip() for w in args.which.split(",") if w.strip()]
    scale = max(1.0, body.circumradius_bound())
    out = {}
    for name in names:
        pmap = point_map(name)
        if name == "g":
            val = centroid(body)
            if centroid_is_exact(body):
                err, method = 0.0, "closed-form"
            else:
                err, method = CONFIG.mc_max_stderr * scale, "monte-carlo"
        elif name == "s":
            stol = args.tol if args.tol is not None else 1e-9 * scale
            val = santalo(body, tol=stol)
            err, method = stol, "support-net pattern search"
        elif name == "j":
            res = john(body, tol=args.tol)
            val = res.ellipsoid.center
            err, method = float(res.residual), res.method
        else:
            res = loewner(body, tol=args.tol)
            val = res.ellipsoid.center
            err, method = float(res.residual), res.method
        out[pmap.name] = {"value": val.tolist(), "error": float(err),
                          "method": method}
    _emit(out)
    return 0


def _compose(a: AffineMap, b: AffineMap) -> AffineMap:
    return AffineMap(a.matrix @ b.matrix, a.matrix @ b.offset + a.offset)


def _map_close(a: AffineMap, b: AffineMap, tol: float) -> bool:
    return (float(np.max(np.abs(a.matrix - b.matrix))) <= tol
            and float(np.max(np.abs(a.offset - b.offset))) <= tol)


def _generators(elements, tol: float):
    """Greedy small generating set: take an element only when it lies outside
    the subgroup generated so far, then regrow that subgroup's closure."""
    d = elements[0].dim
    identity = AffineMap(np.eye(d), np.zeros(d))
    gens: list = []
    closure = [identity]
    for el in elements:
        if any(_map_close(el, known, tol) for known in closure):
            continue
        gens.append(el)
        grew = True
        while grew:
            grew = False
            for a in list(closure):
                for g in gens:
                    cand = _compose(a, g)
                    if not any(_map_close(cand, s, tol) for s in closure):
                        closure.append(cand)
                        grew = True
    return gens


def _cmd_symmetry(args) -> int:
    body = _load_body(args.body)
    vp = body.as_vpolytope() if not hasattr(body, "vertices") else body
    if vp is None:
        return _fail("symmetry detection needs a vertex presentation", 1)
    tol = args.tol if args.tol is not None else CONFIG.group_tol
    group = symmetry_group(vp, tol=tol)
    space = fixed_space(group, tol=tol)
    gens = _generators(list(group.elements), tol=max(1e-9, 10 * tol))
    _emit({
        "order": group.order,
        "closure_residual": float(group.closure_residual()),
        "generators": [{"matrix": g.matrix.tolist(),
                        "offset": g.offset.tolist()} for g in gens],
        "fixed_space": {"base": space.base.tolist(),
                        "basis": [b.tolist() for b in space.basis],
                        "dim": space.dim},
        "tol": float(tol),
    })
    return 0


def _cmd_phi(args) -> int:
    body = _load_body(args.body)
    p1 = point_map(args.p1)
    p2 = point_map(args.p2)
    res = phi_measure(p1, p2, body)
    _emit({
        "phi": float(res.phi),
        "delta": float(res.delta),
        "chord_length": None if res.chord_length is None else float(res.chord_length),
        "p1": {"name": p1.name, "value": res.p1_val.tolist()},
        "p2": {"name": p2.name, "value": res.p2_val.tolist()},
        "tol": float(CONFIG.solver_tol),
    })
    return 0


def _cmd_dualzeros(args) -> int:
    body = _load_body(args.body)
    pmap = point_map(args.point)
    report = dual_zero_search(pmap, body, grid_n=args.grid)
    _emit({
        "zeros": [z.tolist() for z in report.zeros],
        "values": [float(v) for v in report.values],
        "grid": int(report.grid_n),
        "tol": float(report.tol),
        "cluster_radius": float(report.cluster_radius),
    })
    return 0


def _cmd_dist(args) -> int:
    est = point_distance_estimate(point_map(args.p1), point_map(args.p2),
                                  n_bodies=args.bodies, dim=args.dim,
                                  seed=args.seed)
    _emit({
        "distance_lower_bound": float(est),
        "note": "empirical max over sampled bodies; a lower bound of the sup",
        "n_bodies": int(args.bodies),
        "dim": int(args.dim),
        "seed": int(args.seed),
        "tol": float(CONFIG.solver_tol),
    })
    return 0


def _cmd_family(args) -> int:
    if args.action == "verify":
        tol = 1e-10
        rows = []
        worst_ok = True
        for d in range(args.dmin, args.dmax + 1):
            params = family_params(d)
            system = contact_system_K(d)
            ok, residuals = verify_contact_system(system, tol=tol)
            worst_ok = worst_ok and ok
            rows.append({
                "d": d,
                "ok": bool(ok),
                "outer_residual": float(residuals["outer"]),
                "barycenter_residual": float(residuals["barycenter"]),
                "t1": float(params.t1),
                "t2": float(params.t2),
            })
        _emit({"check": "contact", "tol": tol, "rows": rows,
               "ok": bool(worst_ok)})
        return 0 if worst_ok else 1
    # phi-table
    rows = []
    for d in range(args.dmin, args.dmax + 1):
        phi = phi_jl_Cd_closed_form(d)
        bound = 2.0 / (d + 1)
        rows.append((d, phi, bound, phi / bound))
    if args.format == "json":
        _emit({"columns": ["d", "phi", "bound", "ratio"],
               "rows": [list(r) for r in rows],
               "tol": 1e-12})
    else:
        print("d,phi,bound,ratio")
        for d, phi, bound, ratio in rows:
            print(f"{d},{phi!r},{bound!r},{ratio!r}")
    return 0


# ---------------------------------------------------------------------------
# parser


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="affpoints",
        description="Affine invariant points, extremal ellipsoids, symmetry "
                    "groups, and symmetry measures of convex bodies.")
    parser.add_argument("--schema", action="store_true",
                        help="print the body JSON schema and exit")
    parser.add_argument("--set", action="append", metavar="KEY=VALUE",
                        dest="sets",
                        help="override a config key (e.g. tol.support=1e-8); "
                             "repeatable")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("ellipsoid", help="extremal ellipsoid of a body")
    p.add_argument("which", choices=["john", "loewner"])
    p.add_argument("--body", required=True, help="body JSON file")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--samples", type=int, default=None,
                   help="support samples for the loewner initial sweep")
    p.set_defaults(handler=_cmd_ellipsoid)

    p = sub.add_parser("points", help="evaluate affine invariant points")
    p.add_argument("--body", required=True)
    p.add_argument("--which", default=",".join(sorted(POINT_MAPS)),
                   help="comma list from g,s,j,l")
    p.add_argument("--tol", type=float, default=None)
    p.set_defaults(handler=_cmd_points)

    p = sub.add_parser("symmetry", help="affine symmetry group and fixed space")
    p.add_argument("--body", required=True)
    p.add_argument("--tol", type=float, default=None)
    p.set_defaults(handler=_cmd_symmetry)

    p = sub.add_parser("phi", help="symmetry measure from two point maps")
    p.add_argument("--body", required=True)
    p.add_argument("--p1", default="j")
    p.add_argument("--p2", default="l")
    p.set_defaults(handler=_cmd_phi)

    p = sub.add_parser("dualzeros",
                       help="interior translations whose polar zeroes a point map")
    p.add_argument("--body", required=True)
    p.add_argument("--point", default="g")
    p.add_argument("--grid", type=int, default=33)
    p.set_defaults(handler=_cmd_dualzeros)

    p = sub.add_parser("dist", help="empirical distance between two point maps")
    p.add_argument("--p1", required=True)
    p.add_argument("--p2", required=True)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--bodies", type=int, default=50)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(handler=_cmd_dist)

    p = sub.add_parser("family",
                       help="verification runs on the extremal body family")
    p.add_argument("action", choices=["verify", "phi-table"])
    p.add_argument("--check", choices=["contact"], default="contact",
                   help="which certificate family 'verify' should run")
    p.add_argument("--dmin", type=int, default=None)
    p.add_argument("--dmax", type=int, default=None)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(handler=_cmd_family)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_sets(args.sets)
    except ValueError as exc:
        return _fail(str(exc), 2)
    if args.schema:
        sys.stdout.write(schema_text())
        return 0
    if args.command is None:
        parser.print_usage(sys.stderr)
        return _fail("a subcommand is required (or --schema)", 2)
    if args.command == "family":
        args.dmin = args.dmin if args.dmin is not None else 2
        default_max = 8 if args.action == "verify" else 20
        args.dmax = args.dmax if args.dmax is not None else default_max
        if args.action == "phi-table" and args.dmin < 3:
            args.dmin = 3
        if args.dmin > args.dmax:
            return _fail("--dmin must not exceed --dmax", 2)
    if args.command == "dist" and args.seed is None:
        args.seed = CONFIG.seed
    try:
        return args.handler(args)
    except BodyJSONError as exc:
        return _fail(str(exc), 2)
    except (SolverError, BodyError, PointError, MeasureError, FamilyError,
            SymmetryError) as exc:
        return _fail(str(exc), 1)


if __name__ == "__main__":
    sys.exit(main())
