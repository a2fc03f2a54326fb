"""Command-line interface.

Exit status: 0 for a positive result (holds / valid / proof OK / no
violations), 1 for a definite negative result, 2 for usage or load errors.
Reports go to stdout as YAML; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import sys
from importlib import resources
from pathlib import Path

from .fuzz import FuzzConfig, OracleConfig, fuzz_soundness, oracle_diff
from .game import ModelError, UnknownState, dumps, load_model, validate_model
from .parser import ParseError, parse, to_text
from .proof import ScriptError, check_proof, load_script
from .semantics import Checker, IncompatibleAgents, check, failing_states
from .syntax import IntelPower

OK, NEGATIVE, USAGE = 0, 1, 2


class _Usage(Exception):
    pass


def _resolve(path: str) -> Path:
    p = Path(path)
    if p.exists():
        return p
    # fall back to the bundled fixtures (atlantic.model, lemma_*.proof)
    bundled = resources.files("intelgame") / "data" / p.name
    if bundled.is_file():
        return Path(str(bundled))
    raise _Usage(f"no such file: {path}")


def _load(path: str):
    try:
        return load_model(_resolve(path), validate=True)
    except ModelError as exc:
        raise _Usage("\n".join(exc.diagnostics)) from None


def cmd_check(args) -> tuple[dict, int]:
    g = _load(args.model)
    try:
        phi = parse(args.formula)
    except ParseError as exc:
        raise _Usage(f"parse error: {exc}") from None
    try:
        if args.state is None:
            checker = Checker(g)
            bad = failing_states(g, phi, checker)
            report = {"formula": to_text(phi), "valid": not bad, "failing_states": bad}
            return report, OK if not bad else NEGATIVE
        result = check(g, args.state, phi)
    except IncompatibleAgents as exc:
        raise _Usage(str(exc)) from None
    except UnknownState as exc:
        raise _Usage(f"unknown state {exc.args[0]!r}") from None
    report = {"formula": to_text(phi), "state": str(args.state), "holds": result.holds}
    if isinstance(phi, IntelPower):
        if result.holds and args.witness:
            report["witness"] = result.witness_table()
        if not result.holds:
            report["counterexample"] = result.counterexample.to_dict()
    return report, OK if result.holds else NEGATIVE


def cmd_validate(args) -> tuple[dict, int]:
    try:
        g = load_model(_resolve(args.model), validate=False)
    except ModelError as exc:
        raise _Usage("\n".join(exc.diagnostics)) from None
    diags = validate_model(g)
    for d in diags:
        print(d, file=sys.stderr)
    return {"valid": not diags, "diagnostics": diags}, OK if not diags else NEGATIVE


def cmd_prove(args) -> tuple[dict, int]:
    try:
        script = load_script(_resolve(args.script))
    except ScriptError as exc:
        raise _Usage(str(exc)) from None
    verdict = check_proof(script)
    report = {"goal": to_text(script.goal), **verdict.to_dict()}
    return report, OK if verdict.ok else NEGATIVE


def cmd_fuzz(args) -> tuple[dict, int]:
    cfg = FuzzConfig(
        seed=args.seed,
        trials=args.trials,
        max_states=args.max_states,
        max_agents=args.max_agents,
        max_actions=args.max_actions,
        max_formula_depth=args.max_formula_depth,
        max_rules=args.max_rules,
        instances=args.instances,
    )
    report = fuzz_soundness(cfg)
    return report.to_dict(), OK if report.sound else NEGATIVE


def cmd_oracle_diff(args) -> tuple[dict, int]:
    cfg = OracleConfig(
        seed=args.seed,
        trials=args.trials,
        max_states=args.max_states,
        max_agents=args.max_agents,
        max_actions=args.max_actions,
        max_formula_depth=args.max_formula_depth,
        max_rules=args.max_rules,
    )
    diffs = oracle_diff(cfg)
    report = {
        "trials": cfg.trials,
        "discrepancies": [d.__dict__ for d in diffs],
    }
    return report, OK if not diffs else NEGATIVE


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="intelgame", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="model-check a formula")
    p.add_argument("model")
    p.add_argument("formula")
    p.add_argument("--state", help="check at this state; otherwise check validity in the model")
    p.add_argument("--witness", action="store_true", help="print the intel -> response table")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("validate", help="validate a model file")
    p.add_argument("model")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("prove", help="check a proof script")
    p.add_argument("script")
    p.set_defaults(func=cmd_prove)

    fd = FuzzConfig()
    p = sub.add_parser("fuzz", help="random soundness campaign")
    p.add_argument("--seed", type=int, default=fd.seed)
    p.add_argument("--trials", type=int, default=fd.trials)
    p.add_argument("--max-states", type=int, default=fd.max_states)
    p.add_argument("--max-agents", type=int, default=fd.max_agents)
    p.add_argument("--max-actions", type=int, default=fd.max_actions)
    p.add_argument("--max-formula-depth", type=int, default=fd.max_formula_depth)
    p.add_argument("--max-rules", type=int, default=fd.max_rules)
    p.add_argument("--instances", type=int, default=fd.instances)
    p.set_defaults(func=cmd_fuzz)

    od = OracleConfig()
    p = sub.add_parser("oracle-diff", help="compare the checker with brute-force enumeration")
    p.add_argument("--seed", type=int, default=od.seed)
    p.add_argument("--trials", type=int, default=od.trials)
    p.add_argument("--max-states", type=int, default=od.max_states)
    p.add_argument("--max-agents", type=int, default=od.max_agents)
    p.add_argument("--max-actions", type=int, default=od.max_actions)
    p.add_argument("--max-formula-depth", type=int, default=od.max_formula_depth)
    p.add_argument("--max-rules", type=int, default=od.max_rules)
    p.set_defaults(func=cmd_oracle_diff)
    return ap


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report, code = args.func(args)
    except (_Usage, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    sys.stdout.write(dumps(report))
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
