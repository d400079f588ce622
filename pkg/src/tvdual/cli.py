"""Command-line entry point: ``tvdual {solve,tv,galois,check,chain,demo}``.

Exit codes: 0 success, 1 a verification verdict failed, 2 invalid input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from . import demos
from .chain import Chain, mass_ledger, solve_chain, step_certificates
from .errors import InstanceError, PreconditionError
from .flow import flow_oracle
from .instance import InstanceFile, parse_instance
from .random_instances import random_instance
from .relations import (
    dual_relation,
    dual_sigma,
    double_dual_relation,
    double_dual_sigma,
    is_basic,
    is_measurable,
)
from .solver import solve_quotient, tv_dual, verify_strong_duality

EXIT_OK, EXIT_FAILED, EXIT_INVALID = 0, 1, 2
EXACT_ONLY = {"solve", "check", "chain"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def _fmt(value: Any, arith: str) -> Any:
    if isinstance(value, Fraction):
        return str(value) if arith == "rational" else format(float(value), ".15g")
    if isinstance(value, float):
        return format(value, ".15g")
    if isinstance(value, (list, tuple)):
        return [_fmt(v, arith) for v in value]
    if isinstance(value, dict):
        return {k: _fmt(v, arith) for k, v in value.items()}
    return value


def _labels(inst_atoms: Sequence[str], blocks) -> list[list[str]]:
    return [[inst_atoms[i] for i in b] for b in blocks]


def _verdict(*values) -> str:
    texts = {str(Fraction(v)) for v in values}
    return "pass" if len(texts) == 1 else "fail"


def _load(path: str) -> InstanceFile:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise InstanceError(path, f"cannot read file: {exc.strerror}") from None
    return parse_instance(data)


def cmd_solve(args) -> list[dict]:
    inst = _load(args.instance)
    sol = solve_quotient(inst.P, inst.P_prime, inst.relation, strategy=args.strategy)
    oracle, _ = flow_oracle(inst.P, inst.P_prime, inst.relation, complete=False)
    atoms = inst.space.atoms
    return [{
        "command": "solve",
        "value": sol.value, "dual_value": sol.dual_value, "oracle_value": oracle,
        "verdict": _verdict(sol.value, sol.dual_value, oracle),
        "witness": [atoms[i] for i in sol.witness_atoms],
        "coupling": sol.coupling.to_matrix(),
    }]


def cmd_tv(args) -> list[dict]:
    inst = _load(args.instance)
    value, witness = tv_dual(inst.P, inst.P_prime, inst.relation)
    atoms = inst.space.atoms
    return [{"command": "tv", "dual_value": value,
             "witness": sorted((atoms[i] for b in witness for i in b), key=atoms.index)}]


def cmd_galois(args) -> list[dict]:
    inst = _load(args.instance)
    E, atoms = inst.relation, inst.space.atoms
    record: dict[str, Any] = {
        "command": "galois",
        "is_measurable": is_measurable(E),
        "is_basic": is_basic(E),
        "E_star_atoms": _labels(atoms, dual_sigma(E).blocks),
        "E_double_star_classes": _labels(atoms, double_dual_relation(E).classes),
        "double_dual_equal": double_dual_relation(E).classes == E.classes,
    }
    if inst.family is not None:
        record["G_star_classes"] = _labels(atoms, dual_relation(inst.family).classes)
        record["G_double_star_atoms"] = _labels(atoms, double_dual_sigma(inst.family).blocks)
    return [record]


def _check_record(P, P_prime, E, label: str) -> dict:
    report = verify_strong_duality(P, P_prime, E)
    if report.verdict == "refused":
        raise PreconditionError("is_measurable", report.refusal.split(": ", 1)[-1])
    return {
        "command": "check", "instance": label,
        "primal": report.primal, "dual": report.dual, "oracle": report.oracle,
        "weak_duality": report.weak_duality, "verdict": report.verdict,
    }


def cmd_check(args) -> list[dict]:
    if args.random:
        rng = random.Random(args.seed)
        return [_check_record(*random_instance(rng, args.max_atoms), label=f"random-{k}")
                for k in range(args.random)]
    if not args.instance:
        raise UsageError("check needs an instance file or --random N")
    inst = _load(args.instance)
    return [_check_record(inst.P, inst.P_prime, inst.relation, label=args.instance)]


def cmd_chain(args) -> list[dict]:
    inst = _load(args.instance)
    chain = Chain(inst.chain if inst.chain is not None else (inst.relation,))
    sol, trace = solve_chain(inst.P, inst.P_prime, chain)
    direct = solve_quotient(inst.P, inst.P_prime, chain.last, build_coupling=False).value
    ledger = mass_ledger(trace)
    certs = step_certificates(trace)
    ok = sol.value == sol.dual_value == direct and ledger and all(certs)
    atoms = inst.space.atoms
    return [{
        "command": "chain",
        "value": sol.value, "dual_value": sol.dual_value, "oracle_value": direct,
        "verdict": "pass" if ok else "fail",
        "witness": [atoms[i] for i in sol.witness_atoms],
        "ledger": ledger,
        "trace": [{"step": n, "residual_total": s.residual_total, "success_mass": s.success_mass,
                   "certificate": c}
                  for n, (s, c) in enumerate(zip(trace.steps, certs))],
        "coupling": sol.coupling.to_matrix(),
    }]


def cmd_demo(args) -> list[dict]:
    grid = args.grid or demos.DEFAULT_GRIDS[args.scenario]
    records = demos.DEMOS[args.scenario](grid)
    return [{"command": "demo", "scenario": args.scenario, **r} for r in records]


COMMANDS = {
    "solve": cmd_solve, "tv": cmd_tv, "galois": cmd_galois,
    "check": cmd_check, "chain": cmd_chain, "demo": cmd_demo,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized batch checks")
    common.add_argument("--arith", choices=("rational", "float"), default="rational")
    common.add_argument("--out", help="write records here instead of stdout")

    parser = _Parser(prog="tvdual", description="Exact optimal equivalence couplings and their total-variation duals.",
                     epilog="Exit status: 0 success, 1 a verdict failed, 2 invalid input.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", parents=[common], help="optimal coupling and dual witness")
    p.add_argument("instance")
    p.add_argument("--strategy", choices=("product", "greedy-diagonal"), default="product")
    p = sub.add_parser("tv", parents=[common], help="total variation over the dual sigma-algebra")
    p.add_argument("instance")
    p = sub.add_parser("galois", parents=[common], help="dual sigma-algebra, dual relation, double duals")
    p.add_argument("instance")
    p = sub.add_parser("check", parents=[common], help="verify primal = dual = max-flow")
    p.add_argument("instance", nargs="?")
    p.add_argument("--random", type=int, default=0, metavar="N", help="check N seeded random instances")
    p.add_argument("--max-atoms", type=int, default=40)
    p = sub.add_parser("chain", parents=[common], help="residual iteration over an increasing chain")
    p.add_argument("instance")
    p = sub.add_parser("demo", parents=[common], help="scenario records over a parameter grid")
    p.add_argument("scenario", choices=sorted(demos.DEMOS))
    p.add_argument("--grid", "--horizon", "--n", "--m", dest="grid", type=int, nargs="+",
                   help="parameter values (horizons, cell counts or truncation levels)")
    return parser


def render(records: list[dict], fmt: str, arith: str) -> str:
    records = [_fmt(r, arith) for r in records]
    if fmt == "json":
        body = records[0] if len(records) == 1 else records
        return json.dumps(body, indent=2) + "\n"
    columns: list[str] = []
    for r in records:
        columns += [k for k in r if k not in columns]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in records:
        row = []
        for k in columns:
            v = r.get(k, "")
            row.append(json.dumps(v) if isinstance(v, (list, dict, bool)) else v)
        writer.writerow(row)
    return buf.getvalue()


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.arith == "float" and args.command in EXACT_ONLY:
            raise UsageError(f"--arith float is not allowed for {args.command}; duality verdicts are exact")
        records = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"tvdual: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except InstanceError as exc:
        print(f"tvdual: invalid instance: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except PreconditionError as exc:
        print(f"tvdual: precondition violated: {exc}", file=sys.stderr)
        return EXIT_INVALID

    text = render(records, args.format, args.arith)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    failed = any(r.get("verdict") == "fail" for r in records)
    return EXIT_FAILED if failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
