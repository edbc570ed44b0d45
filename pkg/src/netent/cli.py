"""Command-line front end: check, prove, group-vector, solve, demo.

Exit codes: 0 holds/solved/provable, 1 violated/unsolvable/not provable,
2 input or usage error.  ``--json`` prints a deterministic JSON payload in
which every number is an exact string.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from . import builtins
from .cones import (
    Inequality,
    check_all_permutations,
    check_instance,
    in_gamma,
    ingleton_inequality,
    membership_report,
    shannon_provable,
    zy_inequality,
)
from .groups import GroupAxiomError, SubgroupFamily, group_entropy_vector
from .mpnet import MpError, classify, solve_mp_from_group, verify_theorem1
from .netmodel import NetworkError
from .setfn import (
    DomainError,
    SetFunction,
    SetFunctionError,
    condition1_gaps,
    evaluate_sides,
    nonempty_subsets,
    subset_key,
)

HOLDS, VIOLATED, USAGE = 0, 1, 2
BUILTIN_PREFIX = "builtin:"


class InputError(Exception):
    pass


@dataclass
class CommandResult:
    verdict: str
    summary: list[str]
    payload: dict = field(default_factory=dict)
    exit_code: int = HOLDS

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "exit_code": self.exit_code, "summary": self.summary,
                **self.payload}


# -- input loading ---------------------------------------------------------------


def _read_json(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def _parse_a(text: str) -> Fraction:
    try:
        a = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"--a must be a rational number, got {text!r}") from None
    if a < 0:
        raise InputError("--a must be nonnegative")
    return a


def load_vector(spec: str, a: str = "1") -> tuple[SetFunction, bool | None]:
    """A vector file, or ``builtin:pg13`` / ``builtin:zy-gap``; also returns known entropicity."""
    if spec.startswith(BUILTIN_PREFIX):
        name = spec[len(BUILTIN_PREFIX):]
        if name not in builtins.NAMES:
            raise InputError(f"unknown built-in vector {name!r}; choose from {', '.join(builtins.NAMES)}")
        return builtins.load(name, _parse_a(a)), builtins.metadata(name)["known_entropic"] or None
    data = _read_json(spec)
    return SetFunction.from_json(data), data.get("known_entropic") if isinstance(data, dict) else None


def load_inequality(spec: str) -> Inequality:
    if spec == BUILTIN_PREFIX + "ingleton":
        return ingleton_inequality()
    if spec == BUILTIN_PREFIX + "zy":
        return zy_inequality()
    if spec.startswith(BUILTIN_PREFIX):
        raise InputError(f"unknown built-in inequality {spec!r}; choose builtin:ingleton or builtin:zy")
    return Inequality.from_json(_read_json(spec))


# -- commands ------------------------------------------------------------------------


def _sides(v: SetFunction, ineq: Inequality, roles) -> dict:
    expr = ineq.expr.relabel(roles) if roles is not None else ineq.expr
    pos, neg = evaluate_sides(expr, v)
    return {"positive": pos.to_json(), "negative": neg.to_json()}


def _cone_check(v: SetFunction, ineq: Inequality, permutations: bool) -> tuple[dict, list[str], bool]:
    if v.n != 4:
        raise InputError(f"{ineq.name} needs a four-variable vector, got n = {v.n}")
    verdict = check_all_permutations(v, ineq) if permutations else check_instance(v, ineq)
    roles = verdict.witness_roles
    out = verdict.to_json()
    out["sides"] = _sides(v, ineq, roles if permutations else None)
    state = "holds" if verdict.holds else "VIOLATED"
    line = f"{ineq.name}: {state}, margin {verdict.margin.to_json()}"
    if not verdict.holds:
        line += f" ({out['sides']['positive']} < {out['sides']['negative']})"
        if permutations:
            line += f", witness roles {''.join(map(str, roles))}"
    return out, [line], verdict.holds


def cmd_check(args) -> CommandResult:
    v, _ = load_vector(args.vector, args.a)
    payload: dict = {"command": "check", "family": args.family, "vector": v.to_json()}
    summary: list[str] = []
    ok = True
    if args.family == "all":
        try:
            report = membership_report(v)
        except SetFunctionError as exc:
            raise InputError(str(exc)) from None
        payload["report"] = report.to_json()
        for name, verdict in (("Gamma_4", report.gamma), ("Ingleton", report.ingleton), ("ZY", report.zy)):
            summary.append(f"{name}: {'holds' if verdict.holds else 'VIOLATED'}, "
                           f"margin {verdict.margin.to_json()}")
        summary.extend(report.conclusions)
        ok = report.gamma.holds and report.ingleton.holds and report.zy.holds
    elif args.family == "gamma":
        verdict = in_gamma(v)
        payload["gamma"] = verdict.to_json()
        line = f"Gamma_{v.n}: {'holds' if verdict.holds else 'VIOLATED'}, margin {verdict.margin.to_json()}"
        if not verdict.holds:
            line += f", first violated: {verdict.witness_name}"
        summary.append(line)
        ok = verdict.holds
    else:
        ineq = ingleton_inequality() if args.family == "ingleton" else zy_inequality()
        payload[args.family], summary, ok = _cone_check(v, ineq, args.permutations)
    return CommandResult("holds" if ok else "violated", summary, payload, HOLDS if ok else VIOLATED)


def cmd_prove(args) -> CommandResult:
    ineq = load_inequality(args.inequality)
    res = shannon_provable(ineq, args.n)
    payload = {"command": "prove", "result": res.to_json()}
    if res.provable:
        cert = " + ".join(f"{c}*{name}" if c != 1 else name for name, c in res.multipliers.items())
        return CommandResult("provable", [f"{ineq.name}: provable", f"certificate: {cert or '0'}"],
                             payload, HOLDS)
    values = ", ".join(f"{k}={v}" for k, v in res.counterexample.to_json()["values"].items())
    return CommandResult("not-provable", [
        f"{ineq.name}: not provable from Shannon inequalities",
        f"counterexample polymatroid: {values}",
        f"target value on it: {res.counterexample_value.to_json()}",
    ], payload, VIOLATED)


def _load_family(path: str) -> SubgroupFamily:
    data = _read_json(path)
    if not isinstance(data, dict):
        raise InputError("group JSON must be an object")
    return SubgroupFamily.from_json(data)


def cmd_group_vector(args) -> CommandResult:
    fam = _load_family(args.group)
    h = group_entropy_vector(fam)
    payload = {"command": "group-vector", "vector": h.to_json()}
    summary = [f"group of order {fam.parent.order}, {fam.n} subgroups"]
    summary += [f"h({subset_key(m)}) = {h.values[m].to_json()}" for m in nonempty_subsets(h.n)]
    if h.n == 4:
        gaps = condition1_gaps(h)
        payload["condition1"] = not gaps
        payload["condition1_gaps"] = {k: d.to_json() for k, d in gaps}
        summary.append("condition (1): " + ("holds" if not gaps else
                       "fails at " + ", ".join(f"h({k})" for k, _ in gaps)))
    return CommandResult("computed", summary, payload, HOLDS)


def cmd_solve(args) -> CommandResult:
    fam = _load_family(args.group)
    if fam.n != 4:
        raise InputError(f"solve needs a family of four subgroups, got {fam.n}")
    h = group_entropy_vector(fam)
    gaps = condition1_gaps(h)
    payload: dict = {"command": "solve", "vector": h.to_json()}
    if gaps:
        payload["condition1_gaps"] = {k: d.to_json() for k, d in gaps}
        return CommandResult("unsolvable", [
            "condition (1) fails: " + ", ".join(f"h({k}) - h(1234) = {d}" for k, d in gaps)
        ], payload, VIOLATED)
    bundle = solve_mp_from_group(fam)
    inst = bundle.instance
    sizes = {sink: len(table) for sink, table in sorted(bundle.decoders.items())}
    payload["decoder_table_sizes"] = sizes
    payload["tuple"] = inst.tuple().to_json()
    if args.emit_network:
        payload["network"] = inst.to_json()
        payload["code"] = bundle.to_json()
    summary = [f"MP(h) solved: {len(inst.sinks)} sinks, "
               + ", ".join(f"{s}:{n}" for s, n in sizes.items())]
    ok = True
    if args.verify:
        report = verify_theorem1(inst, bundle)
        payload["verification"] = report.to_json()
        ok = report.ok and report.decodable and report.admissible
        summary.append(f"{report.matches}/{len(report.entries)} entropies match")
        for e in report.entries:
            actual = e.actual.to_json() if e.actual is not None else "non-uniform"
            summary.append(f"  h({e.alpha}) = {e.expected.to_json()}  H = {actual}  "
                           f"{'ok' if e.match else 'MISMATCH'}")
        summary.append(f"decodable: {report.decodable}, admissible: {report.admissible}")
    return CommandResult("solved" if ok else "unsolvable", summary, payload, HOLDS if ok else VIOLATED)


def cmd_demo(args) -> CommandResult:
    if args.name not in builtins.NAMES:
        raise InputError(f"unknown demo {args.name!r}; choose from {', '.join(builtins.NAMES)}")
    h, known = load_vector(BUILTIN_PREFIX + args.name, args.a)
    if args.name == "zy-gap" and _parse_a(args.a) == 0:
        known = True
    c = classify(h, known_entropic=known)
    rep = c.report
    ok = rep.gamma.holds and rep.ingleton.holds and rep.zy.holds
    payload = {"command": "demo", "name": args.name, "vector": h.to_json(), "classification": c.to_json()}
    summary = [f"{args.name}: Gamma_4 {'pass' if rep.gamma.holds else 'FAIL'}, "
               f"Ingleton {'pass' if rep.ingleton.holds else 'FAIL'}, "
               f"ZY {'pass' if rep.zy.holds else 'FAIL'}"]
    summary.extend(c.narrative)
    return CommandResult("holds" if ok else "violated", summary, payload, HOLDS if ok else VIOLATED)


# -- parser and dispatch -----------------------------------------------------------------


def _global_flags(default) -> argparse.ArgumentParser:
    flags = argparse.ArgumentParser(add_help=False)
    flags.add_argument("--json", action="store_true", default=default, help="print the JSON payload")
    flags.add_argument("--quiet", action="store_true", default=default,
                       help="suppress the human-readable summary")
    return flags


def build_parser() -> argparse.ArgumentParser:
    # the flags work before or after the subcommand; the subcommand copy
    # must not overwrite a value parsed at the top level
    common = _global_flags(argparse.SUPPRESS)
    parser = argparse.ArgumentParser(prog="netent", parents=[_global_flags(False)],
                                     description="Entropy vectors and the multicast problems they induce.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="cone membership of a four-variable vector")
    p.add_argument("vector", help="vector JSON file, or builtin:pg13 / builtin:zy-gap")
    p.add_argument("--family", choices=("gamma", "ingleton", "zy", "all"), default="all")
    p.add_argument("--permutations", action="store_true",
                   help="sweep every role assignment instead of the literal instance")
    p.add_argument("--a", default="1", help="parameter of builtin:zy-gap")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("prove", parents=[common], help="decide Shannon provability of an inequality")
    p.add_argument("inequality", help="inequality JSON file, or builtin:ingleton / builtin:zy")
    p.add_argument("--n", type=int, default=None, help="ground set size (default: the file's n)")
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("group-vector", parents=[common], help="entropy vector of a subgroup family")
    p.add_argument("group", help="group JSON file")
    p.set_defaults(func=cmd_group_vector)

    p = sub.add_parser("solve", parents=[common], help="build and solve MP(h) from a subgroup family")
    p.add_argument("group", help="group JSON file with four subgroups")
    p.add_argument("--emit-network", action="store_true", help="include the network and code")
    p.add_argument("--verify", action="store_true", help="recompute the 15 entropies")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("demo", parents=[common], help="classify a built-in vector")
    p.add_argument("name", help="pg13 or zy-gap")
    p.add_argument("--a", default="1", help="parameter of zy-gap")
    p.set_defaults(func=cmd_demo)
    return parser


def run(argv=None) -> tuple[CommandResult, argparse.Namespace]:
    args = build_parser().parse_args(argv)
    try:
        result = args.func(args)
    except (InputError, SetFunctionError, DomainError, GroupAxiomError, NetworkError, MpError) as exc:
        result = CommandResult("error", [f"error: {exc}"], {"command": args.command, "error": str(exc)}, USAGE)
    return result, args


def main(argv=None) -> int:
    try:
        result, args = run(argv)
    except SystemExit as exc:       # argparse usage errors
        return int(exc.code or 0)
    if args.json:
        print(json.dumps(result.to_json(), sort_keys=True, indent=2))
    elif not args.quiet or result.exit_code == USAGE:
        out = sys.stderr if result.exit_code == USAGE else sys.stdout
        print("\n".join(result.summary), file=out)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
