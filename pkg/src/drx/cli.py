"""Command-line front end: ``drx <subcommand> [options]``.

Exit codes: 0 success, 1 computation failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from .aell import AellData, reduced_dr_invariant_closed, reduced_dr_invariant_graphsum
from .cache import ResultCache, canonical_json, request_key
from .exact import PolynomialityError, format_rational
from .graphs import enumerate_stable_graphs, graph_to_dict, render_graph
from .graphsum import DRRequest, chiodo_constant_class, compute_P_constant, compute_P_fixed_r
from .strata import class_to_json, render_class
from .target import TargetModel, pair_c1S
from .weightings import IncompatibleDataError

log = logging.getLogger("drx")


class UsageError(Exception):
    pass


def _int_list(text: str | None) -> tuple[int, ...]:
    if text is None or text.strip() == "":
        return ()
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def load_target(descriptor: str) -> TargetModel:
    try:
        if descriptor == "point":
            return TargetModel.point()
        if descriptor.lstrip().startswith("{"):
            return TargetModel.from_dict(json.loads(descriptor))
        return TargetModel.load(descriptor)
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"bad target descriptor: {exc}") from None


def _common(p: argparse.ArgumentParser, degree=False, r=False):
    p.add_argument("--target", default="point", help="'point', a JSON file, or inline JSON")
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--A", required=True, help="comma-separated ramification data, e.g. --A=1,-1")
    p.add_argument("--beta", default=None, help="comma-separated curve class (default: zero)")
    if degree:
        p.add_argument("--degree", type=int, required=True)
    if r:
        p.add_argument("--r", type=int, required=True)
    p.add_argument("--r-min", type=int, default=None)
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    p.add_argument("--cache-dir", default=os.environ.get("DRX_CACHE_DIR"))
    p.add_argument("--no-cache", action="store_true")
    p.add_argument("--format", choices=("json", "text"), default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="drx", description="X-valued double ramification cycles")
    sub = parser.add_subparsers(dest="command", required=True)
    _common(sub.add_parser("dr", help="DR cycle (constant term at degree g)"))
    _common(sub.add_parser("pclass", help="constant-term class at any degree"), degree=True)
    _common(sub.add_parser("pfixed", help="graph-sum class at a fixed modulus r"), degree=True, r=True)
    _common(sub.add_parser("chiodo", help="constant-term class on the Picard-type stack"), degree=True)

    pa = sub.add_parser("aell", help="A_ell reduced invariants")
    mode = pa.add_mutually_exclusive_group(required=True)
    mode.add_argument("--check", action="store_true")
    mode.add_argument("--graphsum", action="store_true")
    mode.add_argument("--closed", action="store_true")
    pa.add_argument("--ell", type=int, required=True)
    pa.add_argument("--g", type=int, required=True)
    pa.add_argument("--d", type=int, required=True)
    pa.add_argument("--A", required=True)
    pa.add_argument("--alpha", default=None, help="root in simple-root coordinates (default all ones)")
    pa.add_argument("--omega", default=None, help="1-based simple-root dual index per marking (default 1)")
    pa.add_argument("--format", choices=("json", "text"), default="text")

    pg = sub.add_parser("graphs", help="enumerate stable graphs")
    pg.add_argument("--target", default="point")
    pg.add_argument("--g", type=int, required=True)
    pg.add_argument("--n", type=int, required=True)
    pg.add_argument("--beta", default=None)
    pg.add_argument("--max-edges", type=int, required=True)
    pg.add_argument("--format", choices=("json", "text"), default="json")

    ps = sub.add_parser("selftest", help="run a quick invariant suite")
    ps.add_argument("--format", choices=("json", "text"), default="text")
    return parser


# --- subcommand bodies --------------------------------------------------------------


def _request(args, degree: int | None) -> tuple[DRRequest, TargetModel]:
    target = load_target(args.target)
    A = _int_list(args.A)
    beta = _int_list(args.beta) if args.beta is not None else target.zero()
    if not target.is_effective(beta):
        raise UsageError(f"class {list(beta)} is not effective for this target")
    if sum(A) != pair_c1S(target, beta):
        raise UsageError("sum of A must equal pairing")
    if args.g < 0:
        raise UsageError("genus must be non-negative")
    d = args.g if degree is None else degree
    if d < 0:
        raise UsageError("degree must be non-negative")
    return DRRequest(args.g, A, beta, target, d), target


def _class_command(args) -> str:
    degree = None if args.command == "dr" else args.degree
    req, target = _request(args, degree)
    if args.command == "pfixed" and args.r < 2:
        raise UsageError("--r must be at least 2")
    request = {
        "command": args.command,
        "g": req.g,
        "A": list(req.A),
        "beta": list(req.beta),
        "target": target.to_dict(),
        "degree": req.degree,
        "r": getattr(args, "r", None),
        "r_min": args.r_min,
    }
    cache = None if args.no_cache or not args.cache_dir else ResultCache(args.cache_dir)
    key = request_key(request)
    payload = cache.get(key) if cache else None
    if payload is None:
        jobs = max(1, args.jobs)
        if args.command in ("dr", "pclass"):
            cls = compute_P_constant(req, r_min=args.r_min, jobs=jobs)
        elif args.command == "pfixed":
            cls = compute_P_fixed_r(req, args.r, jobs=jobs)
        else:
            cls = chiodo_constant_class(req.g, req.A, req.beta, target, req.degree, r_min=args.r_min, jobs=jobs)
        payload = class_to_json(cls)
        if cache:
            cache.put(key, payload)
    if args.format == "text":
        from .strata import class_from_json

        return render_class(class_from_json(payload))
    return payload


def _aell_command(args) -> tuple[str, int]:
    A = _int_list(args.A)
    if args.ell < 1 or args.g < 0 or args.d < 1:
        raise UsageError("need ell >= 1, g >= 0, d >= 1")
    if sum(A) != 0:
        raise UsageError("sum of A must equal pairing")
    alpha = _int_list(args.alpha) if args.alpha else (1,) * args.ell
    if len(alpha) != args.ell:
        raise UsageError("alpha needs ell coordinates")
    idx = _int_list(args.omega) if args.omega else (1,) * len(A)
    if len(idx) != len(A) or any(not 1 <= i <= args.ell for i in idx):
        raise UsageError("--omega needs one index in 1..ell per marking")
    data = AellData(args.ell, alpha)
    omegas = [data.simple_root_dual(i - 1) for i in idx]
    out: dict = {}
    if args.check or args.graphsum:
        out["graphsum"] = reduced_dr_invariant_graphsum(data, args.g, args.d, A, omegas)
    if args.check or args.closed:
        out["closed"] = reduced_dr_invariant_closed(data, args.g, args.d, A, omegas)
    code = 0
    if args.check:
        same = out["graphsum"] == out["closed"]
        status = "MATCH" if same else "MISMATCH"
        code = 0 if same else 1
        if args.format == "text":
            text = f"MATCH {format_rational(out['closed'])}" if same else (
                f"MISMATCH graphsum={format_rational(out['graphsum'])} closed={format_rational(out['closed'])}"
            )
            return text, code
        return canonical_json({"status": status, **{k: format_rational(v) for k, v in out.items()}}), code
    (value,) = out.values()
    if args.format == "text":
        return format_rational(value), 0
    return canonical_json({k: format_rational(v) for k, v in out.items()}), 0


def _graphs_command(args) -> str:
    target = load_target(args.target)
    beta = _int_list(args.beta) if args.beta is not None else target.zero()
    if not target.is_effective(beta) or args.g < 0 or args.n < 0 or args.max_edges < 0:
        raise UsageError("invalid graph enumeration request")
    graphs = enumerate_stable_graphs(args.g, args.n, beta, target, args.max_edges)
    if args.format == "text":
        lines = [f"{len(graphs)} graphs"] + [render_graph(G) for G in graphs]
        return "\n".join(lines)
    return canonical_json({"count": len(graphs), "graphs": [graph_to_dict(G) for G in graphs]})


def _selftest() -> list[tuple[str, bool]]:
    from .exact import series_exp, series_G, series_S
    from .oracle import naive_P_constant
    from .graphsum import compute_DR, verify_grr_exponentiation
    from .strata import Ambient, TautClass
    from .weightings import enumerate_weightings

    point = TargetModel.point()
    results = []
    results.append(("series S = exp(G) to order 20", series_exp(series_G(20)) == series_S(20)))
    ok = all(
        len(enumerate_weightings(G, (1, -1), point, r)) == r**G.h1
        for G in enumerate_stable_graphs(1, 2, (), point, 2)
        for r in (2, 3, 5)
    )
    results.append(("weighting count r^h1", ok))
    results.append(("GRR exponentiation", verify_grr_exponentiation(6, 6).passed
                    and not verify_grr_exponentiation(6, 6, flip_sign=True).passed))
    data = AellData(1, (1,))
    ok = all(
        reduced_dr_invariant_graphsum(data, g, 1, (1, -1), [(1,), (1,)])
        == reduced_dr_invariant_closed(data, g, 1, (1, -1), [(1,), (1,)])
        for g in range(3)
    )
    results.append(("A_ell graph sum equals closed form", ok))
    fund = TautClass.fundamental(Ambient("X", 0, 3, (), point))
    results.append(("genus-0 DR is the fundamental class", compute_DR(0, (1, 1, -2), (), point) == fund))
    main = compute_DR(1, (1, -1), (), point)
    naive = naive_P_constant(1, (1, -1), (), point, 1, r0=5)
    results.append(("naive path equals main path at g=1", main == naive))
    return results


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command in ("dr", "pclass", "pfixed", "chiodo"):
            stdout.write(_class_command(args) + "\n")
            return 0
        if args.command == "aell":
            text, code = _aell_command(args)
            stdout.write(text + "\n")
            return code
        if args.command == "graphs":
            stdout.write(_graphs_command(args) + "\n")
            return 0
        results = _selftest()
        if args.format == "json":
            stdout.write(canonical_json([{"check": n, "passed": ok} for n, ok in results]) + "\n")
        else:
            for name, ok in results:
                stdout.write(f"{'PASS' if ok else 'FAIL'}  {name}\n")
        return 0 if all(ok for _, ok in results) else 1
    except (UsageError, IncompatibleDataError) as exc:
        stdout.write(canonical_json({"error": "usage", "message": str(exc)}) + "\n")
        stderr.write(f"drx: {exc}\n")
        return 2
    except (PolynomialityError, ArithmeticError, ValueError) as exc:
        stdout.write(canonical_json({"error": "computation", "message": str(exc)}) + "\n")
        stderr.write(f"drx: {exc}\n")
        return 1


def main() -> None:
    logging.basicConfig(level=logging.WARNING, format="drx: %(levelname)s: %(message)s")
    sys.exit(run())


if __name__ == "__main__":
    main()
