"""Command-line entry point: ``mirrorcell <subcommand> [options]``.

Exit codes: 0 all checks pass, 1 some named check failed, 2 usage or invalid
parameters, 3 a verification step raised (details are in the payload).
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from .arrangement import build_Akl, build_monomial_reflection, serialize
from .errors import InvalidParameterError
from .fibration import FibrationParams, verification_report
from .lattice import characteristic_polynomial, format_poly, intersection_lattice, mobius, serialize_lattice
from .numerics import DEFAULT_SEED
from .restriction import restriction_closure_scan, restriction_table
from .topology import report as topology_report

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_VERIFY = 0, 1, 2, 3


class UsageError(Exception):
    pass


def default_seed() -> int:
    raw = os.environ.get("MIRRORCELL_SEED")
    if raw is None or not raw.strip():
        return DEFAULT_SEED
    try:
        return int(raw, 0)
    except ValueError:
        raise UsageError(f"MIRRORCELL_SEED must be an integer, got {raw!r}") from None


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _arrangement(args):
    """A(G(r,p,l)) when --p is given, otherwise A^k_l(r)."""
    if args.l is None or args.r is None:
        raise UsageError("--l and --r are required")
    if args.p is not None:
        return build_monomial_reflection(args.r, args.p, args.l)
    if args.k is None:
        raise UsageError("--k is required unless --p selects a reflection arrangement")
    return build_Akl(args.k, args.l, args.r)


def _triple(args) -> FibrationParams:
    if args.k is None or args.l is None or args.r is None:
        raise UsageError("--k, --l and --r are required (or use --grid)")
    return FibrationParams(args.k, args.l, args.r)


def _grid(lmax: int, rmax: int) -> list[FibrationParams]:
    if lmax < 2 or rmax < 1:
        raise UsageError("--grid needs LMAX >= 2 and RMAX >= 1")
    triples = [(k, ell, r) for ell in range(2, lmax + 1) for r in range(1, rmax + 1) for k in range(ell + 1)]
    return [FibrationParams(*t) for t in sorted(triples)]


def _map(fn, items, jobs: int):
    if jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


# -- subcommands --------------------------------------------------------------

def cmd_build(args) -> int:
    A = _arrangement(args)
    if args.format == "json":
        hyperplanes = [[[str(c) for c in x.coeffs] for x in h.covector] for h in A.hyperplanes]
        sys.stdout.write(_dump({"dim": A.dim, "r": A.field.order, "count": len(A), "hyperplanes": hyperplanes}))
    else:
        sys.stdout.write(serialize(A))
    return EXIT_OK


def cmd_lattice(args) -> int:
    L = mobius(intersection_lattice(_arrangement(args)))
    if args.format == "json":
        flats = sorted(L.flats, key=lambda X: (X.rank, X.containing))
        sys.stdout.write(_dump({
            "rank_sizes": L.rank_sizes,
            "flats": [{"rank": X.rank, "mobius": X.mobius, "hyperplanes": list(X.containing)} for X in flats],
        }))
    else:
        sys.stdout.write(serialize_lattice(L))
    return EXIT_OK


def cmd_charpoly(args) -> int:
    coeffs = characteristic_polynomial(_arrangement(args))
    if args.format == "json":
        sys.stdout.write(_dump({"coefficients": list(coeffs), "poly": format_poly(coeffs)}))
    else:
        print(format_poly(coeffs))
    return EXIT_OK


def _emit_rows(rows, fmt: str, header: dict | None = None) -> None:
    if fmt == "json":
        payload = dict(header or {})
        payload["rows"] = [{"flat": list(row.flat), "dim": row.dim, "induced_count": row.induced_count,
                            "candidates": [list(c) for c in row.candidates]} for row in rows]
        sys.stdout.write(_dump(payload))
    else:
        for row in rows:
            print(row.line())


def cmd_restrict(args) -> int:
    A = _arrangement(args)
    r_max = args.r_max if args.r_max is not None else args.r
    _emit_rows(restriction_table(A, r_max, min_dim=1), args.format)
    return EXIT_OK


def _scan_one(group):
    return restriction_closure_scan(*group)


def cmd_scan(args) -> int:
    if args.grid:
        lmax, rmax = args.grid
        groups = sorted({(r, p, ell) for ell in range(2, lmax + 1) for r in range(1, rmax + 1) for p in {1, r}})
    else:
        if args.r is None or args.l is None:
            raise UsageError("--r and --l are required (or use --grid)")
        groups = [(args.r, args.p if args.p is not None else 1, args.l)]
    results = _map(_scan_one, groups, args.jobs)
    ok = all(res.ok for res in results)
    if args.format == "json":
        sys.stdout.write(_dump({
            "groups": [{"r": g[0], "p": g[1], "l": g[2], "pass": res.ok,
                        "rows": [{"flat": list(row.flat), "dim": row.dim, "induced_count": row.induced_count,
                                  "candidates": [list(c) for c in row.candidates]} for row in res.rows]}
                       for g, res in zip(groups, results)],
            "pass": ok,
        }))
    else:
        for g, res in zip(groups, results):
            print(f"# G({g[0]},{g[1]},{g[2]}) {'ok' if res.ok else 'UNIDENTIFIED'}")
            for row in res.rows:
                print(row.line())
    return EXIT_OK if ok else EXIT_FAIL


def _verify_one(job):
    params, seed, samples = job
    return verification_report(params, seed, samples=samples)


def cmd_verify(args) -> int:
    triples = _grid(*args.grid) if args.grid else [_triple(args)]
    results = _map(_verify_one, [(t, args.seed, args.samples) for t in triples], args.jobs)
    ok = all(res["pass"] for res in results)
    if args.format == "json":
        sys.stdout.write(_dump({"seed": args.seed, "samples": args.samples, "results": results, "pass": ok}))
    else:
        for res in results:
            bad = [name for name, v in res.items() if isinstance(v, dict) and not v["pass"]]
            status = "PASS" if res["pass"] else "FAIL " + ",".join(bad or [res.get("error", "")])
            print(f"k={res['k']} l={res['l']} r={res['r']} {status}")
    if any("error" in res for res in results):
        return EXIT_VERIFY
    return EXIT_OK if ok else EXIT_FAIL


def _report_one(job):
    params, seed = job
    return topology_report(params, seed=seed).to_dict()


def cmd_report(args) -> int:
    triples = _grid(*args.grid) if args.grid else [_triple(args)]
    results = _map(_report_one, [(t, args.seed) for t in triples], args.jobs)
    ok = all(res["pass"] for res in results)
    if args.format == "json":
        payload = results[0] if len(results) == 1 and not args.grid else {"results": results, "pass": ok}
        sys.stdout.write(_dump(payload))
    else:
        for res in results:
            failed = [c["name"] for c in res["checks"] if not c["pass"]]
            print(f"k={res['k']} l={res['l']} r={res['r']} genus={res['genus']} punctures={res['punctures']} "
                  f"free_rank={res['free_rank']} pi1={res['pi1']['descriptor']} "
                  + ("PASS" if not failed else "FAIL " + ",".join(failed)))
    return EXIT_OK if ok else EXIT_FAIL


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--k", type=int, help="number of coordinate hyperplanes")
    common.add_argument("--l", type=int, help="ambient dimension")
    common.add_argument("--r", type=int, help="order of the roots of unity")
    common.add_argument("--p", type=int, help="use the reflection arrangement of G(r,p,l)")
    common.add_argument("--format", choices=("text", "json"), default=None)

    runs = argparse.ArgumentParser(add_help=False)
    runs.add_argument("--seed", type=int, default=None, help="master seed (default: $MIRRORCELL_SEED or a constant)")
    runs.add_argument("--grid", type=int, nargs=2, metavar=("LMAX", "RMAX"),
                      help="run every triple with 2 <= l <= LMAX, 1 <= r <= RMAX, 0 <= k <= l")
    runs.add_argument("--jobs", type=int, default=1, help="worker processes for grid runs")

    parser = argparse.ArgumentParser(prog="mirrorcell", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("build", parents=[common], help="list the hyperplanes").set_defaults(func=cmd_build, fmt="text")
    sub.add_parser("lattice", parents=[common], help="intersection lattice with Mobius values") \
        .set_defaults(func=cmd_lattice, fmt="text")
    sub.add_parser("charpoly", parents=[common], help="characteristic polynomial") \
        .set_defaults(func=cmd_charpoly, fmt="text")
    p = sub.add_parser("restrict", parents=[common], help="restriction to every flat, with identification")
    p.add_argument("--r-max", type=int, default=None, help="largest r tried when identifying")
    p.set_defaults(func=cmd_restrict, fmt="text")
    sub.add_parser("scan", parents=[common, runs], help="restriction closure scan over G(r,p,l)") \
        .set_defaults(func=cmd_scan, fmt="text")
    p = sub.add_parser("verify", parents=[common, runs], help="numeric fiber checks")
    p.add_argument("--samples", type=int, default=100, help="fiber samples per base point")
    p.set_defaults(func=cmd_verify, fmt="json")
    sub.add_parser("report", parents=[common, runs], help="topological invariants and cross-checks") \
        .set_defaults(func=cmd_report, fmt="json")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = args.fmt
    try:
        if hasattr(args, "seed") and args.seed is None:
            args.seed = default_seed()
        if getattr(args, "samples", 1) < 1 or getattr(args, "jobs", 1) < 1:
            raise UsageError("--samples and --jobs must be positive")
        return args.func(args)
    except (UsageError, InvalidParameterError) as exc:
        print(f"mirrorcell {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
