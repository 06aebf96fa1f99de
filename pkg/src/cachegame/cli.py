"""Command-line front end.

Commands: solve, verify, sweep-accuracy, accumulation, plambda,
fractional-check.  Machine output is JSON with rationals as "p/q" strings;
--format table renders for humans, and --approx adds a clearly marked
non-authoritative decimal column.  Exit codes: 0 success, 2 invalid input,
3 node budget exceeded, 4 internal invariant breach.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile
import time
from fractions import Fraction

from . import __version__
from . import accumulation as accu
from . import fractional as frac
from . import lp as lpmod
from . import solver, strategies
from .core import GameSpec, Variant, upper_bound_combinatorial
from .rational import format_rational, parse_rational

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_BUDGET = 3
EXIT_INTERNAL = 4

CACHE_SCHEMA = 1


def _add_global_options(parser: argparse.ArgumentParser, top_level: bool) -> None:
    """Global flags, accepted both before and after the subcommand.

    Only the top-level parser carries real defaults; subcommand copies use
    SUPPRESS so they never overwrite a flag parsed earlier.
    """
    d = (lambda v: v) if top_level else (lambda v: argparse.SUPPRESS)
    parser.add_argument("--budget", type=int, default=d(solver.DEFAULT_NODE_BUDGET),
                        help="node budget for game-tree construction")
    parser.add_argument("--no-symmetry", action="store_true", default=d(False),
                        help="disable symmetry reduction")
    parser.add_argument("--relaxed-queries", action="store_true", default=d(False),
                        help="allow queries smaller than k")
    parser.add_argument("--format", choices=("json", "table"), default=d("json"))
    parser.add_argument("--approx", action="store_true", default=d(False),
                        help="add a non-authoritative decimal column to tables")
    parser.add_argument("--cache", default=d(None), help="path to a JSON result cache")
    parser.add_argument("--recheck", action="store_true", default=d(False),
                        help="recompute cached entries and fail on any mismatch")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cachegame", description=__doc__)
    _add_global_options(p, top_level=True)
    sub = p.add_subparsers(dest="command", required=True)

    def add_command(name, help_text):
        command = sub.add_parser(name, help=help_text)
        _add_global_options(command, top_level=False)
        return command

    s = add_command("solve", "exact game value and optimal plans")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--variant", choices=("adversary", "random"), default="adversary")

    v = add_command("verify", "worst-case value of a strategy tree")
    v.add_argument("--family", help="built-in family name")
    v.add_argument("--file", help="strategy JSON file")
    v.add_argument("--n", type=int)
    v.add_argument("--d", type=int)
    v.add_argument("--k", type=int)
    v.add_argument("--variant", choices=("adversary", "random", "cooperative"),
                   default="adversary")

    w = add_command("sweep-accuracy", "compare solved values to the combinatorial bound")
    w.add_argument("--max-n", type=int, required=True)
    w.add_argument("--max-d", type=int, required=True)
    w.add_argument("--max-k", type=int, required=True)

    a = add_command("accumulation", "one-turn accumulation game analysis")
    a.add_argument("--n", type=int, required=True)
    a.add_argument("--k", type=int, required=True)
    a.add_argument("--d", type=str, required=True, help='gold total, e.g. "5/3"')
    a.add_argument("--mode", choices=("evaluate", "ruckle", "exact"), required=True)
    a.add_argument("--dist", help='comma-separated amounts for --mode evaluate, e.g. "1/5,1/5,..."')

    y = add_command("plambda", "repeat-probability of the single-box plan")
    y.add_argument("--n", type=int, required=True)
    y.add_argument("--d", type=int, required=True)
    y.add_argument("--lam", type=str, required=True, help='record, e.g. "2,1"')

    f = add_command("fractional-check", "per-step identities of the mixed plan")
    f.add_argument("--n", type=int, required=True)
    f.add_argument("--d", type=int, required=True)
    f.add_argument("--k", type=str, required=True, help='rational query size, e.g. "3/2"')
    f.add_argument("--lam", type=str, required=True)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code not in (0, None) else EXIT_OK
    try:
        if args.recheck:
            return _recheck_cache(args)
        handler = {
            "solve": cmd_solve,
            "verify": cmd_verify,
            "sweep-accuracy": cmd_sweep_accuracy,
            "accumulation": cmd_accumulation,
            "plambda": cmd_plambda,
            "fractional-check": cmd_fractional_check,
        }[args.command]
        return handler(args)
    except solver.BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (lpmod.CertificateError, solver.SolverError, AssertionError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


# ---------------------------------------------------------------------------
# Output helpers.
# ---------------------------------------------------------------------------


def _emit(args, payload: dict, table_rows=None) -> None:
    if args.format == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
        return
    rows = table_rows or [(k, str(v)) for k, v in payload.items()]
    width = max((len(str(r[0])) for r in rows), default=0)
    for row in rows:
        label, value = row[0], row[1]
        line = f"{str(label):<{width}}  {value}"
        if args.approx and len(row) > 2 and row[2] is not None:
            line += f"   (~{float(row[2]):.6f}, approximate)"
        print(line)


def _rat(text: str) -> Fraction:
    return parse_rational(text)


# ---------------------------------------------------------------------------
# Result cache.
# ---------------------------------------------------------------------------


def _cache_key(n, d, k, variant, symmetry, relaxed) -> str:
    blob = f"n={n};d={d};k={k};variant={variant};symmetry={symmetry};relaxed={relaxed}"
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _load_cache(path: str) -> dict:
    if path and os.path.exists(path):
        with open(path) as fh:
            data = json.load(fh)
        if data.get("schema") != CACHE_SCHEMA:
            raise ValueError(f"cache schema {data.get('schema')} unsupported")
        return data
    return {"schema": CACHE_SCHEMA, "entries": {}}


def _store_cache(path: str, cache: dict) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".cachegame-")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(cache, fh, indent=1, sort_keys=True)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _solve_cached(args, n, d, k, variant) -> dict:
    """Solve through the result cache: hits skip recomputation entirely,
    so interrupted sweeps resume where they stopped."""
    symmetry = not args.no_symmetry
    relaxed = args.relaxed_queries
    cache = _load_cache(args.cache) if args.cache else None
    key = _cache_key(n, d, k, variant.value, symmetry, relaxed)
    if cache is not None and key in cache["entries"]:
        entry = cache["entries"][key]
        if "payload" in entry:
            return entry["payload"]
    result = solver.solve(GameSpec(n, d, k, variant), symmetry=symmetry,
                          relaxed=relaxed, budget=args.budget)
    payload = result.to_json_dict()
    if cache is not None:
        cache["entries"][key] = {
            "params": {"n": n, "d": d, "k": k, "variant": variant.value,
                       "symmetry": symmetry, "relaxed": relaxed},
            "value": format_rational(result.value),
            "stats": {k2: v for k2, v in result.stats.items() if k2 != "solve_seconds"},
            "payload": payload,
            "tool_version": __version__,
            "timestamp": int(time.time()),
        }
        _store_cache(args.cache, cache)
    return payload


def _recheck_cache(args) -> int:
    if not args.cache:
        raise ValueError("--recheck needs --cache")
    cache = _load_cache(args.cache)
    bad = []
    for key, entry in sorted(cache["entries"].items()):
        p = entry["params"]
        result = solver.solve(
            GameSpec(p["n"], p["d"], p["k"], Variant(p["variant"])),
            symmetry=p["symmetry"], relaxed=p["relaxed"], budget=args.budget,
        )
        fresh = format_rational(result.value)
        status = "ok" if fresh == entry["value"] else "MISMATCH"
        if status != "ok":
            bad.append(key)
        print(f"{key}  {p['n']},{p['d']},{p['k']},{p['variant']}  stored={entry['value']}  fresh={fresh}  {status}")
    if bad:
        print(f"error: {len(bad)} cache entries failed recheck", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


# ---------------------------------------------------------------------------
# Commands.
# ---------------------------------------------------------------------------


def cmd_solve(args) -> int:
    variant = Variant(args.variant)
    payload = _solve_cached(args, args.n, args.d, args.k, variant)
    rows = [
        ("value", payload["value"], parse_rational(payload["value"])),
        ("nodes", payload["stats"]["nodes"], None),
        ("lp_rows", payload["stats"]["lp_rows"], None),
        ("lp_cols", payload["stats"]["lp_cols"], None),
        ("pivots", payload["stats"]["pivots"], None),
    ]
    _emit(args, payload, rows)
    return EXIT_OK


def cmd_verify(args) -> int:
    if bool(args.family) == bool(args.file):
        raise ValueError("give exactly one of --family or --file")
    if args.family:
        params = {k: v for k, v in (("n", args.n), ("d", args.d), ("k", args.k)) if v is not None}
        tree = strategies.builtin_family(args.family, **params)
    else:
        with open(args.file) as fh:
            tree = strategies.from_json_dict(json.load(fh))
    variant = Variant(args.variant)
    spec = GameSpec(tree.n, tree.d, tree.k, variant)
    if variant == Variant.COOPERATIVE:
        value = strategies.joint_verify_cooperative(spec, tree, strategies.least_treasures_rule)
        worst = None
    else:
        response = solver.best_response_value(spec, tree)
        value = response.value
        worst = response.worst_allocation.to_json()
    payload = {
        "n": tree.n, "d": tree.d, "k": tree.k, "variant": variant.value,
        "value": format_rational(value),
        "worst_allocation": worst,
    }
    _emit(args, payload, [("value", format_rational(value), value),
                          ("worst_allocation", worst, None)])
    return EXIT_OK


def cmd_sweep_accuracy(args) -> int:
    rows = []
    findings = []
    values: dict[tuple[int, int, int], Fraction] = {}
    for n in range(1, args.max_n + 1):
        for d in range(1, args.max_d + 1):
            for k in range(1, min(args.max_k, n) + 1):
                try:
                    payload = _solve_cached(args, n, d, k, Variant.ADVERSARY)
                except solver.BudgetExceededError:
                    rows.append({"n": n, "d": d, "k": k, "skipped": "budget"})
                    continue
                value = parse_rational(payload["value"])
                bound = upper_bound_combinatorial(n, d, k)
                accurate = value == bound
                values[(n, d, k)] = value
                conjectured = n >= d * (k - 1) + 1
                consistent = accurate or not conjectured
                if not consistent:
                    findings.append(f"threshold-conjecture violated at ({n},{d},{k})")
                rows.append({
                    "n": n, "d": d, "k": k,
                    "value": format_rational(value),
                    "bound": format_rational(bound),
                    "accurate": accurate,
                    "threshold_consistent": consistent,
                })
    for (n, d, k), value in values.items():
        if (n, d + 1, k) in values and values[(n, d + 1, k)] > value:
            findings.append(f"d-monotonicity violated between ({n},{d},{k}) and ({n},{d + 1},{k})")
        # Accuracy monotonicity: easier triplets of an accurate one stay accurate.
        if value == upper_bound_combinatorial(n, d, k):
            for (n2, d2, k2), v2 in values.items():
                if n2 >= n and d2 <= d and k2 <= k and v2 != upper_bound_combinatorial(n2, d2, k2):
                    findings.append(
                        f"accuracy-monotonicity violated: ({n},{d},{k}) accurate but ({n2},{d2},{k2}) is not"
                    )
    payload = {"rows": rows, "findings": sorted(set(findings))}
    table = [
        (f"({r['n']},{r['d']},{r['k']})",
         r.get("skipped") or f"value={r['value']} bound={r['bound']} accurate={r['accurate']}",
         None)
        for r in rows
    ] + [("finding", f, None) for f in sorted(set(findings))]
    _emit(args, payload, table)
    return EXIT_OK


def cmd_accumulation(args) -> int:
    spec = accu.AccumulationSpec(args.n, args.k, _rat(args.d))
    if args.mode == "evaluate":
        if not args.dist:
            raise ValueError("--mode evaluate needs --dist")
        amounts = tuple(_rat(x) for x in args.dist.split(","))
        payload = accu.evaluate_distribution(spec, accu.GoldDistribution(amounts))
    elif args.mode == "ruckle":
        r, wins, g = accu.best_ruckle_distribution(spec)
        total = accu.comb(spec.n, spec.k)
        payload = {
            "r": r, "winning": wins, "total": total,
            "probability": format_rational(Fraction(wins, total)),
            "witness": g.to_json(),
        }
    else:
        losing, witness = accu.max_losing_subsets_exact(spec)
        total = accu.comb(spec.n, spec.k)
        payload = {
            "losing": losing, "winning": total - losing, "total": total,
            "probability": format_rational(Fraction(total - losing, total)),
            "witness": witness.to_json(),
        }
    _emit(args, payload)
    return EXIT_OK


def cmd_plambda(args) -> int:
    lam = tuple(int(x) for x in args.lam.split(",") if x.strip())
    state = frac.YoungState(lam, args.n, args.d)
    value = frac.p_lambda(state)
    payload = {"n": args.n, "d": args.d, "lambda": list(lam),
               "p_lambda": format_rational(value)}
    _emit(args, payload, [("p_lambda", format_rational(value), value)])
    return EXIT_OK


def cmd_fractional_check(args) -> int:
    lam = tuple(int(x) for x in args.lam.split(",") if x.strip())
    spec = frac.FractionalSpec(args.n, args.d, _rat(args.k))
    state = frac.YoungState(lam, args.n, args.d)
    dist = frac.fractional_step_distribution(spec, state)
    checks = {}
    for target in ("current", "fresh"):
        lhs, rhs = frac.per_step_discovery_check(spec, state, target)
        checks[target] = {
            "lhs": format_rational(lhs),
            "rhs": format_rational(rhs),
            "equal": lhs == rhs,
        }
    payload = {
        "n": args.n, "d": args.d, "k": format_rational(spec.k),
        "lambda": list(lam),
        "mix_on_floor": format_rational(spec.p),
        "step_distribution": [
            {"repeat_current": rep, "fresh_boxes": fresh, "prob": format_rational(prob)}
            for (rep, fresh), prob in dist
        ],
        "identities": checks,
    }
    _emit(args, payload)
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
