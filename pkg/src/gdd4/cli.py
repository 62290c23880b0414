"""Command-line entry point.

Exit codes: 0 success or pass, 1 verification failure / unsat / unresolved
plan, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

from . import algebra, constructors, derived
from .admissibility import KNOWN_NONEXISTENT_TAG, check_gum
from .appendix import EntryError, expand_entry, get_entry, load_entries
from .core import DesignFormatError, GroupedDesign, TypeSignature, blocks_for_signature
from .exact_cover import InstanceTooLarge, solve_signature
from .registry import ENV_VAR, Registry, RegistryError
from .verify import verify_dgdd_profile, verify_many

OK, FAIL, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _emit(args, text: str, obj) -> None:
    if args.format == "structured":
        print(json.dumps(obj, sort_keys=True))
    else:
        print(text)


def _read_design(path: str) -> GroupedDesign:
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return GroupedDesign.loads(text)


def _write_design(args, design: GroupedDesign) -> None:
    out = getattr(args, "output", None)
    if out:
        design.save(out)
        print(f"wrote {out}: {design.kind} {design.signature()}, {design.num_blocks} blocks", file=sys.stderr)
    else:
        sys.stdout.write(design.dumps())


def _type_arg(values) -> TypeSignature:
    text = " ".join(values)
    try:
        return TypeSignature.parse(text)
    except ValueError as exc:
        raise UsageError(f"bad type {text!r}: {exc}") from exc


def _kv(text: str) -> dict:
    out = {}
    for item in filter(None, text.split(",")):
        k, sep, v = item.partition("=")
        if not sep:
            raise UsageError(f"expected key=value, got {item!r}")
        out[k.strip()] = int(v)
    return out


def _registry(args) -> Registry:
    return Registry(args.registry, unsafe=getattr(args, "unsafe", False))


# commands


def cmd_admissible(args):
    verdict = check_gum(args.g, args.u, args.m)
    ok = verdict.admissible and verdict.existence != KNOWN_NONEXISTENT_TAG
    obj = {
        "g": args.g, "u": args.u, "m": args.m,
        "admissible": verdict.admissible,
        "failed": verdict.failed_conditions,
        "existence": verdict.existence,
        "citation": verdict.citation,
        "notes": verdict.notes,
    }
    _emit(args, f"{args.g}^{args.u} {args.m}^1: {verdict}", obj)
    return OK if ok else FAIL


def cmd_blocks(args):
    sig = _type_arg(args.type)
    n = blocks_for_signature(sig)
    _emit(args, f"{sig}: {n} blocks", {"type": str(sig), "blocks": n})
    return OK


def cmd_expand(args):
    if args.list:
        for name in sorted(load_entries()):
            print(name)
        return OK
    if not args.name:
        raise UsageError("expand needs an entry name, e.g. \"9^4 18^1 15^1\", or --list")
    _write_design(args, expand_entry(get_entry(" ".join(args.name))))
    return OK


def cmd_verify(args):
    designs = [_read_design(p) for p in args.files]
    if args.profile:
        profile = [int(x) for x in args.profile.split(",")]
        reports = [verify_dgdd_profile(d, profile) for d in designs]
    else:
        reports = verify_many(designs, jobs=args.jobs)
    for path, rep in zip(args.files, reports):
        if args.report == "json-lines":
            print(rep.json_lines())
        elif args.format == "structured":
            print(json.dumps({"file": path, "passed": rep.passed, "blocks": rep.num_blocks, "v": rep.v,
                              "counts": rep.counts}, sort_keys=True))
        else:
            print(f"{path}: {rep.summary()}")
            for viol in rep.violations[: args.show]:
                print(f"  {viol}")
    return OK if all(r.passed for r in reports) else FAIL


def cmd_construct(args):
    if args.what == "td":
        d = algebra.transversal(args.params[0], args.params[1])
    elif args.what == "rtd":
        d = algebra.rtd(args.params[0], args.params[1])
    else:
        d = derived.rtd_to_dgdd(args.params[0])
    _write_design(args, d)
    return OK


def cmd_transpose(args):
    _write_design(args, derived.dgdd_transpose(_read_design(args.file)))
    return OK


def cmd_inflate(args):
    _write_design(args, derived.weight_design(_read_design(args.file), args.w))
    return OK


def cmd_compose(args):
    p = _kv(args.params)
    ing: dict[str, list[GroupedDesign]] = {}
    for item in args.ingredient:
        role, sep, path = item.partition("=")
        if not sep:
            raise UsageError(f"--ingredient expects role=path, got {item!r}")
        ing.setdefault(role, []).append(_read_design(path))

    def one(role, default=None):
        if role in ing:
            return ing[role][0]
        if default is not None:
            return default()
        raise UsageError(f"{args.theorem} needs --ingredient {role}=PATH")

    def need(*keys):
        missing = [k for k in keys if k not in p]
        if missing:
            raise UsageError(f"{args.theorem} needs --params with {', '.join(missing)}")

    fillers = ing.get("filler", [])
    if args.theorem == "thm33":
        need("a", "b", "c", "d", "t", "u", "v")
        d = constructors.thm_fundamental(p["a"], p["b"], p["c"], p["d"], p["t"], p["u"], p["v"], one("rgdd"), fillers)
    elif args.theorem == "thm41":
        need("g")
        d = constructors.thm_fill_groups(one("big"), p["g"], one("td", lambda: algebra.transversal(4, p["g"])), m=p.get("m"))
    elif args.theorem == "thm42":
        need("u", "m")
        d = constructors.thm_wilson_inflate(one("small"), p["u"], one("dgdd", lambda: derived.rtd_to_dgdd(p["u"])), fillers, p["m"])
    elif args.theorem == "thm43":
        need("m")
        d = constructors.thm_hole_fill(one("dgdd"), one("filler"), p["m"])
    else:
        need("r")
        td = ing["td"][0] if "td" in ing else None
        d = constructors.thm_scalar_inflate(one("design"), p["r"], td)
    _write_design(args, d)
    return OK


def cmd_solve(args):
    sig = _type_arg(args.type)
    res = solve_signature(sig, holes_profile=args.holes, seed=args.seed, time_budget=args.budget)
    obj = {"type": str(sig), "status": res.status, "seed": res.seed, "nodes": res.nodes, "elapsed": round(res.elapsed, 3)}
    if res.status == "sat":
        if args.output:
            res.design.save(args.output)
        elif args.format != "structured":
            sys.stdout.write(res.design.dumps())
    msg = f"{sig}: {res.status} ({res.nodes} nodes, {res.elapsed:.2f} s)"
    if args.format == "structured" or args.output or res.status != "sat":
        _emit(args, msg, obj)
    else:
        print(msg, file=sys.stderr)
    return OK if res.status == "sat" else FAIL


def cmd_plan(args):
    from .planner import ExecutionConfig, PlanError, UnresolvedPlan, execute_plan, plan_gum

    try:
        plan = plan_gum(args.g, args.u, args.m)
    except PlanError as exc:
        _emit(args, str(exc), {"error": str(exc)})
        return FAIL
    if not args.execute:
        _emit(args, plan.render(), plan.to_obj())
        return OK if plan.complete() else FAIL
    registry = Registry(args.registry) if args.registry else Registry()
    try:
        design = execute_plan(plan, registry, ExecutionConfig(seed=args.seed, search_budget=args.budget))
    except UnresolvedPlan as exc:
        obj = {"plan": plan.to_obj(), "missing": [m.__dict__ for m in exc.missing]}
        _emit(args, plan.render() + "\n" + str(exc) + "".join(f"\n  missing {m}" for m in exc.missing), obj)
        return FAIL
    entry = registry.lookup(design.signature(), design.kind)
    if args.output:
        design.save(args.output)
    where = args.output or str(registry.root / entry.path)
    obj = {"plan": plan.to_obj(), "type": str(design.signature()), "blocks": design.num_blocks, "path": where}
    _emit(args, f"{plan.render()}\nbuilt and verified {design.signature()}: {design.num_blocks} blocks -> {where}", obj)
    return OK


def cmd_catalog(args):
    reg = _registry(args)
    if args.action in ("list", "search"):
        if args.action == "search" and not args.args:
            raise UsageError("catalog search needs a query")
        rows = reg.entries() if args.action == "list" else reg.search(" ".join(args.args))
        if args.format == "structured":
            for e in rows:
                print(json.dumps({"key": e.key, **e.to_obj()}, sort_keys=True))
        else:
            for e in rows:
                print(f"{e.key}\t{e.source}\t{e.path}")
        return OK
    if args.action == "import":
        if not args.args:
            raise UsageError("catalog import needs one or more files")
        status = OK
        for path in args.args:
            try:
                e = reg.import_file(path)
                print(f"imported {path} as {e.key}")
            except RegistryError as exc:
                print(f"rejected {exc}", file=sys.stderr)
                if exc.report is not None:
                    for viol in exc.report.violations[:10]:
                        print(f"  {viol}", file=sys.stderr)
                status = FAIL
        return status
    # export TYPE DEST
    if len(args.args) < 2:
        raise UsageError("catalog export needs a type and a destination file")
    sig = _type_arg(args.args[:-1])
    try:
        dest = reg.export(sig, args.args[-1], kind=args.kind)
    except RegistryError as exc:
        print(str(exc), file=sys.stderr)
        return FAIL
    print(f"exported {sig} to {dest}")
    return OK


# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "structured"), default="text", help="output style (default text)")
    out = argparse.ArgumentParser(add_help=False)
    out.add_argument("-o", "--output", help="write the design here instead of stdout")

    ap = argparse.ArgumentParser(prog="gdd4", description="4-GDDs of type g^u m^1: build, verify, plan.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("admissible", parents=[common], help="check the necessary conditions for g^u m^1")
    p.add_argument("g", type=int)
    p.add_argument("u", type=int)
    p.add_argument("m", type=int)
    p.set_defaults(func=cmd_admissible)

    p = sub.add_parser("blocks", parents=[common], help="number of blocks of a 4-GDD type")
    p.add_argument("type", nargs="+", help='e.g. "39^8 120^1"')
    p.set_defaults(func=cmd_blocks)

    p = sub.add_parser("expand", parents=[common, out], help="expand a shipped base-block design")
    p.add_argument("name", nargs="*", help='entry name, e.g. "9^4 18^1 15^1"')
    p.add_argument("--list", action="store_true", help="list entry names")
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("verify", parents=[common], help="verify design files ('-' reads stdin)")
    p.add_argument("files", nargs="+")
    p.add_argument("--report", choices=("text", "json-lines"), default="text")
    p.add_argument("--jobs", type=int, default=1, help="parallel verification; output keeps input order")
    p.add_argument("--profile", help="DGDD hole profile h_1,h_2,... per group")
    p.add_argument("--show", type=int, default=10, help="violations to print per file")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("construct", parents=[common, out], help="algebraic designs: td K Q, rtd K Q, dgdd-rtd N")
    p.add_argument("what", choices=("td", "rtd", "dgdd-rtd"))
    p.add_argument("params", type=int, nargs="+")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("transpose", parents=[common, out], help="swap groups and holes of a grid DGDD")
    p.add_argument("file")
    p.set_defaults(func=cmd_transpose)

    p = sub.add_parser("inflate", parents=[common, out], help="weight every point by w")
    p.add_argument("file")
    p.add_argument("w", type=int)
    p.set_defaults(func=cmd_inflate)

    p = sub.add_parser("compose", parents=[common, out], help="run a recursive construction")
    p.add_argument("theorem", choices=("thm33", "thm41", "thm42", "thm43", "thm44"))
    p.add_argument("--params", default="", help="comma separated key=value integers")
    p.add_argument("--ingredient", action="append", default=[], help="role=path (repeatable)")
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("solve", parents=[common, out], help="exact-cover search for a small type")
    p.add_argument("type", nargs="+")
    p.add_argument("--holes", type=int, help="number of holes for a DGDD")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=float, default=30.0, help="seconds (default 30)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("plan", parents=[common, out], help="plan (and optionally build) g^u m^1")
    p.add_argument("g", type=int)
    p.add_argument("u", type=int)
    p.add_argument("m", type=int)
    p.add_argument("--execute", action="store_true")
    p.add_argument("--registry", help=f"registry directory (default ${ENV_VAR} or ~/.gdd4/registry)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=float, default=30.0, help="per-search budget in seconds")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("catalog", parents=[common], help="list|search|import|export stored designs")
    p.add_argument("action", choices=("list", "search", "import", "export"))
    p.add_argument("args", nargs="*")
    p.add_argument("--registry", help=f"registry directory (default ${ENV_VAR} or ~/.gdd4/registry)")
    p.add_argument("--kind", default="GDD")
    p.add_argument("--unsafe", action="store_true", help="skip verification when loading")
    p.set_defaults(func=cmd_catalog)
    return ap


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except (DesignFormatError, EntryError, InstanceTooLarge, RegistryError, KeyError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return FAIL


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
