"""Command-line front end.

Usage::

    gerbelab run MANIFEST               run every task
    gerbelab <command> MANIFEST         run the manifest's tasks of one command
    gerbelab <command> MANIFEST --ref role=name ...
                                        run one ad-hoc task on manifest objects
    gerbelab suite [BUNDLE]             acceptance bundle, or a bundled manifest

Exit codes: 0 pass, 1 check failure, 2 input error.
"""

import argparse
import sys
from pathlib import Path

from . import canonical
from .errors import GerbelabError, InputError
from .manifest import COMMANDS, bundled, bundled_names, emit_report, parse_manifest, run, run_task, Report
from .sampling import seed_from_env


def _parser():
    p = argparse.ArgumentParser(prog="gerbelab", description="Gerbe, plectic and loop-space computations.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, help="override task tolerances")
    common.add_argument("--samples", type=int, help="resample loops to this many points")
    common.add_argument("--eps", type=float, help="finite-difference step")
    common.add_argument("--degree", type=int, help="polynomial degree bound for homspace")
    common.add_argument("--format", choices=["json", "text"], default="json")
    common.add_argument("--timings", action="store_true", help="include wall-clock times (not deterministic)")
    common.add_argument("-o", "--output", help="write the report to a file")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", parents=[common], help="run every task of a manifest")
    r.add_argument("manifest")
    for cmd in COMMANDS:
        if cmd == "suite":
            continue
        c = sub.add_parser(cmd, parents=[common], help=f"run {cmd} tasks")
        c.add_argument("manifest")
        c.add_argument("--ref", action="append", default=[], metavar="ROLE=NAME",
                       help="build an ad-hoc task from manifest objects")
    s = sub.add_parser("suite", parents=[common], help="run the acceptance bundle or a bundled manifest")
    s.add_argument("bundle", nargs="?", default="acceptance")
    s.add_argument("--seed", type=int, help="overrides GERBELAB_SEED")
    s.add_argument("--criteria", help="comma-separated criterion numbers")
    s.add_argument("--list", action="store_true", help="list bundled manifests")
    return p


def _overrides(args):
    out = {}
    for key in ("tol", "samples", "eps", "degree"):
        v = getattr(args, key, None)
        if v is not None:
            out[key] = v
    return out


def _read(path):
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None


def _write(args, text):
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _suite(args):
    if args.list:
        sys.stdout.write("acceptance\n" + "".join(n + "\n" for n in bundled_names()))
        return 0
    if args.bundle != "acceptance":
        m = parse_manifest(bundled(args.bundle))
        rep = run(m, _overrides(args))
        _write(args, emit_report(rep, args.format, args.timings))
        return rep.exit_code
    from .suite import run_suite
    only = None
    if args.criteria:
        try:
            only = {int(t) for t in args.criteria.split(",") if t.strip()}
        except ValueError:
            raise InputError("--criteria takes comma-separated integers") from None
    seed = args.seed if args.seed is not None else seed_from_env()
    res = run_suite(seed, only)
    ok = all(r.passed for r in res)
    if args.format == "json":
        doc = {"bundle": "acceptance", "seed": seed, "status": "pass" if ok else "fail",
               "criteria": [r.to_json(args.timings) for r in res]}
        text = canonical.dumps(doc)
    else:
        lines = [f"acceptance suite, seed {seed}: {'PASS' if ok else 'FAIL'}"]
        for r in res:
            line = r.line()
            if args.timings:
                line += f"  ({r.seconds:.2f} s)"
            lines.append(line)
            for f in r.failures[:3]:
                lines.append("    " + ", ".join(f"{k}={v}" for k, v in sorted(f.items())))
        text = "\n".join(lines) + "\n"
    _write(args, text)
    return 0 if ok else 1


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        if args.command == "suite":
            return _suite(args)
        m = parse_manifest(_read(args.manifest))
        if args.command == "run":
            rep = run(m, _overrides(args))
        elif args.ref:
            refs = {}
            for item in args.ref:
                role, sep, name = item.partition("=")
                if not sep:
                    raise InputError(f"--ref expects ROLE=NAME, got {item!r}")
                if role in refs:
                    prev = refs[role]
                    refs[role] = (prev if isinstance(prev, list) else [prev]) + [name]
                else:
                    refs[role] = name
            task = {"command": args.command, "refs": refs, "params": {}}
            # validate the ad-hoc task with the manifest parser
            m2 = parse_manifest(canonical.dumps({"version": m.version, "objects": m.objects, "tasks": [task]}))
            rep = Report([run_task(m2, 0, task, _overrides(args))], m.version)
        else:
            rep = run(m, _overrides(args), commands={args.command})
        _write(args, emit_report(rep, args.format, args.timings))
        return rep.exit_code
    except InputError as e:
        sys.stderr.write(f"gerbelab: {type(e).__name__}: {e}\n")
        return 2
    except GerbelabError as e:
        sys.stderr.write(f"gerbelab: {type(e).__name__}: {e}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
