"""Command-line front end.

Exit codes: 0 = positive verdict or success, 1 = negative verdict
(inconsistent / not a book / rejected), 2 = input or usage error. The payload
on stdout is always a single JSON document; diagnostics go to stderr.
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import serialize
from .consistency import (
    check_complete_consistency,
    check_forward_consistency,
    derive_beliefs,
    extract_lcps,
    validate_lcps,
)
from .cps import check_siniscalchi, cps_to_lcps, lcps_to_cps
from .errors import (
    DutchbookError,
    InputError,
    InternalError,
    PreconditionViolation,
    UnsupportedEnvironment,
)
from .gambles import (
    accepts_system,
    classify_deterministic,
    classify_dutch_book,
    synthesize_deterministic_db,
    synthesize_dutch_book,
)
from .model import is_uniform_reach, validate_belief_system
from .simulate import (
    FixedState,
    Prior,
    SimConfig,
    compare_to_exact,
    flagged_states,
    run_rounds,
)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_ERROR = 2


class _Parser(argparse.ArgumentParser):
    """Argparse that reports usage problems as JSON input errors."""

    def error(self, message):
        raise InputError(message)


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="dutchbook",
        description="Exact consistency checks and Dutch-book construction "
        "for belief systems over learning environments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def cmd(name, help_, *needs, **optional):
        p = sub.add_parser(name, help=help_)
        for flag in needs:
            p.add_argument(flag, required=True)
        for flag, kw in optional.items():
            p.add_argument(flag.replace("_", "-"), **kw)
        p.add_argument("--out", help="also write the JSON payload to this file")
        return p

    cmd("validate", "validate an environment and optional beliefs or LCPS",
        "--env", __beliefs={"required": False}, __lcps={"required": False})
    cmd("check-forward", "forward-consistency check", "--env", "--beliefs")
    cmd("check-complete", "complete-consistency check", "--env", "--beliefs")
    cmd("extract-lcps", "extract the rationalizing LCPS", "--env", "--beliefs")
    cmd("derive-beliefs", "derive beliefs from an LCPS", "--env", "--lcps")
    cmd("to-cps", "expand an LCPS to a complete CPS", "--lcps",
        __env={"required": False, "help": "fixes the state order"})
    cmd("to-lcps", "collapse a complete CPS to an LCPS", "--cps")
    cmd("check-siniscalchi", "generalized chain-rule check (uniform reach only)",
        "--env", "--beliefs", __max_len={"type": int, "default": None})
    cmd("verify-book", "classify a gamble system as a Dutch book",
        "--env", "--book", __beliefs={"required": False})
    cmd("verify-deterministic", "classify a gamble system path-by-path",
        "--env", "--book", __beliefs={"required": False})
    cmd("synth-book", "construct a Dutch book against inconsistent beliefs",
        "--env", "--beliefs")
    cmd("synth-deterministic",
        "construct a deterministic Dutch book against forward-inconsistent beliefs",
        "--env", "--beliefs")
    cmd("simulate", "Monte Carlo audit of a gamble system",
        "--env", "--beliefs", "--book",
        __rounds={"type": int, "required": True},
        __seed={"type": int, "required": True},
        __state={"required": False, "help": "fixed true state (default: uniform prior)"})
    return parser


def _emit(payload: dict, out: str | None) -> None:
    text = serialize.dumps(payload)
    sys.stdout.write(text)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _load_env(path: str):
    return serialize.environment_from_doc(serialize.load_file(path))


def _load_beliefs(path: str):
    return serialize.beliefs_from_doc(serialize.load_file(path))


def _run(args) -> tuple[int, dict]:
    if args.command == "validate":
        env = _load_env(args.env)
        payload = {
            "ok": True,
            "states": len(env.states),
            "contingencies": len(env.forest.nodes),
            "uniformReach": is_uniform_reach(env),
        }
        if args.beliefs:
            problems = validate_belief_system(env, _load_beliefs(args.beliefs))
            if problems:
                payload["ok"] = False
                payload["problems"] = [
                    {"contingency": h, "reason": reason} for h, reason in problems
                ]
        if args.lcps:
            lcps = serialize.lcps_from_doc(serialize.load_file(args.lcps))
            try:
                validate_lcps(lcps, env.states)
            except InputError as exc:
                payload["ok"] = False
                payload.setdefault("problems", []).append(
                    {"lcps": str(exc)}
                )
        return (EXIT_OK if payload["ok"] else EXIT_NEGATIVE), payload

    if args.command == "check-forward":
        env = _load_env(args.env)
        violation = check_forward_consistency(env, _load_beliefs(args.beliefs))
        if violation is None:
            return EXIT_OK, {"consistent": True}
        return EXIT_NEGATIVE, {
            "consistent": False,
            "violation": serialize.forward_violation_to_doc(violation),
        }

    if args.command == "check-complete":
        env = _load_env(args.env)
        result = check_complete_consistency(env, _load_beliefs(args.beliefs))
        if result.consistent:
            return EXIT_OK, {
                "consistent": True,
                "lcps": serialize.lcps_to_doc(result.lcps, env.states),
                "certificate": serialize.certificate_to_doc(
                    result.certificate, env.states
                ),
            }
        return EXIT_NEGATIVE, {
            "consistent": False,
            "violation": serialize.violation_to_doc(result.violation),
        }

    if args.command == "extract-lcps":
        env = _load_env(args.env)
        mu = _load_beliefs(args.beliefs)
        result = check_complete_consistency(env, mu)
        if not result.consistent:
            return EXIT_NEGATIVE, {
                "consistent": False,
                "violation": serialize.violation_to_doc(result.violation),
            }
        return EXIT_OK, serialize.lcps_to_doc(result.lcps, env.states)

    if args.command == "derive-beliefs":
        env = _load_env(args.env)
        lcps = serialize.lcps_from_doc(serialize.load_file(args.lcps))
        mu = derive_beliefs(env, lcps)
        return EXIT_OK, serialize.beliefs_to_doc(env, mu)

    if args.command == "to-cps":
        lcps = serialize.lcps_from_doc(serialize.load_file(args.lcps))
        if args.env:
            states = _load_env(args.env).states
        else:
            states = tuple(
                dict.fromkeys(s for level in lcps.levels for s in level)
            )
        cps = lcps_to_cps(lcps, states)
        return EXIT_OK, serialize.cps_to_doc(cps)

    if args.command == "to-lcps":
        cps = serialize.cps_from_doc(serialize.load_file(args.cps))
        lcps = cps_to_lcps(cps)
        return EXIT_OK, serialize.lcps_to_doc(lcps, cps.states)

    if args.command == "check-siniscalchi":
        env = _load_env(args.env)
        violation = check_siniscalchi(env, _load_beliefs(args.beliefs), args.max_len)
        if violation is None:
            return EXIT_OK, {"ok": True}
        return EXIT_NEGATIVE, {
            "ok": False,
            "violation": serialize.siniscalchi_violation_to_doc(violation),
        }

    if args.command in ("verify-book", "verify-deterministic"):
        env = _load_env(args.env)
        g = serialize.gambles_from_doc(serialize.load_file(args.book))
        if args.command == "verify-book":
            verdict = classify_dutch_book(env, g)
            payload = serialize.book_verdict_to_doc(verdict, env.states)
            positive = verdict.is_dutch_book
        else:
            verdict = classify_deterministic(env, g)
            payload = serialize.deterministic_verdict_to_doc(verdict, env)
            positive = verdict.is_deterministic_db
        if args.beliefs:
            report = accepts_system(env, _load_beliefs(args.beliefs), g)
            payload["acceptance"] = serialize.acceptance_to_doc(report, env)
            positive = positive and report.accepted
        return (EXIT_OK if positive else EXIT_NEGATIVE), payload

    if args.command in ("synth-book", "synth-deterministic"):
        env = _load_env(args.env)
        mu = _load_beliefs(args.beliefs)
        synth = (
            synthesize_dutch_book
            if args.command == "synth-book"
            else synthesize_deterministic_db
        )
        try:
            g = synth(env, mu)
        except UnsupportedEnvironment:
            raise
        except PreconditionViolation as exc:
            return EXIT_NEGATIVE, {"synthesized": False, "reason": str(exc)}
        # Re-verify before reporting success; the synthesizers already do,
        # but the exit code must not rely on that.
        report = accepts_system(env, mu, g)
        payload = serialize.gambles_to_doc(env, g)
        payload["acceptance"] = serialize.acceptance_to_doc(report, env)
        if args.command == "synth-book":
            verdict = classify_dutch_book(env, g)
            payload["verdict"] = serialize.book_verdict_to_doc(verdict, env.states)
            positive = report.accepted and verdict.is_dutch_book
        else:
            verdict = classify_deterministic(env, g)
            payload["verdict"] = serialize.deterministic_verdict_to_doc(verdict, env)
            positive = report.accepted and verdict.is_deterministic_db
        if not positive:
            raise InternalError("synthesized gamble system failed re-verification")
        return EXIT_OK, payload

    if args.command == "simulate":
        env = _load_env(args.env)
        mu = _load_beliefs(args.beliefs)
        g = serialize.gambles_from_doc(serialize.load_file(args.book))
        if args.state:
            mode = FixedState(args.state)
        else:
            n = len(env.states)
            mode = Prior({s: Fraction(1, n) for s in env.states})
        report = run_rounds(env, mu, g, SimConfig(args.rounds, args.seed, mode))
        payload = serialize.sim_report_to_doc(report, env.states)
        deviations = compare_to_exact(report)
        payload["deviations"] = {s: deviations[s] for s in env.states if s in deviations}
        payload["flagged"] = flagged_states(deviations)
        return EXIT_OK, payload

    raise InternalError(f"unhandled command {args.command!r}")


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        code, payload = _run(args)
    except InputError as exc:
        _emit({"error": {"code": "input", "message": str(exc), "location": None}}, None)
        return EXIT_ERROR
    except UnsupportedEnvironment as exc:
        _emit({"error": {"code": "unsupported", "message": str(exc), "location": None}}, None)
        return EXIT_ERROR
    except DutchbookError as exc:
        _emit({"error": {"code": "domain", "message": str(exc), "location": None}}, None)
        return EXIT_ERROR
    _emit(payload, args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
