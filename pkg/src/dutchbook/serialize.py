"""Canonical JSON documents for environments, beliefs, LCPSs, CPSs, gamble
systems, and verdicts.

Rationals travel as strings "p/q" (or "n" for integers). Canonical writers
order keys by the state-space / forest order so output is byte-stable;
readers reject unknown keys.
"""
from __future__ import annotations

import json
import re
from fractions import Fraction
from typing import Any, Mapping

from .errors import InputError
from .model import (
    BeliefSystem,
    ContingencyForest,
    Distribution,
    LearningEnvironment,
    ZERO,
    build_environment,
)
from .consistency import ForwardViolation, Lcps
from .cps import CompleteCps, SiniscalchiViolation
from .gambles import AcceptanceReport, BookVerdict, DeterministicVerdict, GambleSystem
from .odds import CoherenceCertificate, CoherenceViolation, ExtendedRatio, OddsLink
from .simulate import SimReport

_RATIONAL_RE = re.compile(r"^-?\d+(/[1-9]\d*)?$")


def parse_rational(text: Any, where: str = "value") -> Fraction:
    if not isinstance(text, str) or not _RATIONAL_RE.match(text):
        raise InputError(f"{where}: expected rational string 'p/q', got {text!r}")
    return Fraction(text)


def format_rational(value: Fraction) -> str:
    return str(value)


def _require_keys(doc: Mapping, allowed: set[str], required: set[str], where: str) -> None:
    if not isinstance(doc, dict):
        raise InputError(f"{where}: expected an object")
    unknown = set(doc) - allowed
    if unknown:
        raise InputError(f"{where}: unknown keys {sorted(unknown)}")
    missing = required - set(doc)
    if missing:
        raise InputError(f"{where}: missing keys {sorted(missing)}")


def _rational_row(doc: Any, where: str) -> dict[str, Fraction]:
    if not isinstance(doc, dict):
        raise InputError(f"{where}: expected an object of rationals")
    return {k: parse_rational(v, f"{where}[{k!r}]") for k, v in doc.items()}


# ---------------------------------------------------------------- environment

def environment_from_doc(doc: Any) -> LearningEnvironment:
    _require_keys(doc, {"states", "contingencies", "eta"}, {"states", "contingencies", "eta"}, "environment")
    states = doc["states"]
    if not isinstance(states, list) or not all(isinstance(s, str) for s in states):
        raise InputError("environment.states: expected a list of strings")
    entries = doc["contingencies"]
    if not isinstance(entries, list):
        raise InputError("environment.contingencies: expected a list")
    nodes, parent = [], {}
    for entry in entries:
        _require_keys(entry, {"id", "parent"}, {"id", "parent"}, "contingency entry")
        nodes.append(entry["id"])
        if entry["parent"] is not None:
            parent[entry["id"]] = entry["parent"]
    eta = {
        s: _rational_row(row, f"eta[{s!r}]")
        for s, row in (doc["eta"] or {}).items()
    }
    return build_environment(states, ContingencyForest(nodes, parent), eta)


def environment_to_doc(env: LearningEnvironment) -> dict:
    return {
        "states": list(env.states),
        "contingencies": [
            {"id": h, "parent": env.forest.parent.get(h)} for h in env.forest.nodes
        ],
        "eta": {
            s: {
                leaf: format_rational(env.eta[s][leaf])
                for leaf in env.forest.leaves
                if env.eta[s].get(leaf, ZERO) != 0
            }
            for s in env.states
        },
    }


# -------------------------------------------------------- distribution tables

def _table_from_doc(doc: Any, outer: str) -> dict[str, dict[str, Fraction]]:
    _require_keys(doc, {outer}, {outer}, outer)
    table = doc[outer]
    if not isinstance(table, dict):
        raise InputError(f"{outer}: expected an object")
    return {k: _rational_row(row, f"{outer}[{k!r}]") for k, row in table.items()}


def beliefs_from_doc(doc: Any) -> BeliefSystem:
    return _table_from_doc(doc, "beliefs")


def beliefs_to_doc(env: LearningEnvironment, mu: BeliefSystem) -> dict:
    return {
        "beliefs": {
            h: {
                s: format_rational(mu[h][s])
                for s in env.states
                if mu[h].get(s, ZERO) != 0
            }
            for h in env.forest.nodes
        }
    }


def gambles_from_doc(doc: Any) -> GambleSystem:
    return _table_from_doc(doc, "gambles")


def gambles_to_doc(env: LearningEnvironment, g: GambleSystem) -> dict:
    return {
        "gambles": {
            h: {
                s: format_rational(g[h][s])
                for s in env.states
                if g.get(h, {}).get(s, ZERO) != 0
            }
            for h in env.forest.nodes
            if any(v != 0 for v in g.get(h, {}).values())
        }
    }


# ------------------------------------------------------------------- LCPS/CPS

def lcps_from_doc(doc: Any) -> Lcps:
    _require_keys(doc, {"levels"}, {"levels"}, "lcps")
    levels = doc["levels"]
    if not isinstance(levels, list) or not levels:
        raise InputError("lcps.levels: expected a nonempty list")
    return Lcps(tuple(_rational_row(level, "lcps level") for level in levels))


def lcps_to_doc(lcps: Lcps, states: tuple[str, ...]) -> dict:
    order = {s: i for i, s in enumerate(states)}
    return {
        "levels": [
            {
                s: format_rational(level[s])
                for s in sorted(level, key=order.get)
                if level[s] != 0
            }
            for level in lcps.levels
        ]
    }


def cps_from_doc(doc: Any) -> CompleteCps:
    _require_keys(doc, {"conditionals"}, {"conditionals"}, "cps")
    table = doc["conditionals"]
    if not isinstance(table, dict) or not table:
        raise InputError("cps.conditionals: expected a nonempty object")
    full_key = max(table, key=lambda k: len(k.split(",")))
    states = tuple(full_key.split(","))
    if len(set(states)) != len(states):
        raise InputError("cps: duplicate states in the full-event key")
    conditionals = {}
    for key, row in table.items():
        subset = key.split(",")
        if any(s not in states for s in subset):
            raise InputError(f"cps key {key!r} has states outside {states}")
        conditionals[frozenset(subset)] = _rational_row(row, f"cps[{key!r}]")
    expected = (1 << len(states)) - 1
    if len(conditionals) != expected:
        raise InputError(
            f"cps: expected {expected} conditioning events, found {len(conditionals)}"
        )
    return CompleteCps(states, conditionals)


def cps_to_doc(cps: CompleteCps) -> dict:
    order = {s: i for i, s in enumerate(cps.states)}
    out = {}
    for subset in cps.subsets():
        key = ",".join(sorted(subset, key=order.get))
        row = cps.conditionals[subset]
        out[key] = {
            s: format_rational(row[s])
            for s in sorted(row, key=order.get)
            if row[s] != 0
        }
    return {"conditionals": out}


# ------------------------------------------------------------------- verdicts

def _ratio_to_str(value: ExtendedRatio) -> str:
    if value.is_zero:
        return "0"
    if value.is_infinite:
        return "inf"
    return format_rational(value.value)


def violation_to_doc(violation: CoherenceViolation) -> dict:
    return {
        "cycle": [
            {"h": l.h, "from": l.src, "to": l.dst, "value": _ratio_to_str(l.value)}
            for l in violation.cycle
        ],
        "product": _ratio_to_str(violation.product),
    }


def violation_links(doc: Any) -> list[OddsLink]:
    """Rehydrate just the (h, from, to) walk of a stored witness; values are
    recomputed on re-evaluation."""
    _require_keys(doc, {"cycle", "product"}, {"cycle"}, "violation")
    links = []
    for entry in doc["cycle"]:
        _require_keys(entry, {"h", "from", "to", "value"}, {"h", "from", "to"}, "cycle link")
        links.append(OddsLink(entry["h"], entry["from"], entry["to"], ExtendedRatio.finite(Fraction(1))))
    return links


def certificate_to_doc(cert: CoherenceCertificate, states: tuple[str, ...]) -> dict:
    order = {s: i for i, s in enumerate(states)}
    return {
        "levels": [sorted(members, key=order.get) for members in cert.partition.levels],
        "potentials": {
            s: format_rational(cert.potentials[s])
            for s in sorted(cert.potentials, key=order.get)
        },
    }


def forward_violation_to_doc(v: ForwardViolation) -> dict:
    return {
        "h": v.h,
        "hprime": v.h_prime,
        "s": v.s,
        "lhs": format_rational(v.lhs),
        "rhs": format_rational(v.rhs),
    }


def siniscalchi_violation_to_doc(v: SiniscalchiViolation) -> dict:
    return {
        "sequence": list(v.sequence),
        "event": list(v.event),
        "lhs": format_rational(v.lhs),
        "rhs": format_rational(v.rhs),
    }


def book_verdict_to_doc(verdict: BookVerdict, states: tuple[str, ...]) -> dict:
    return {
        "perState": {s: format_rational(verdict.per_state[s]) for s in states},
        "isDutchBook": verdict.is_dutch_book,
    }


def deterministic_verdict_to_doc(
    verdict: DeterministicVerdict, env: LearningEnvironment
) -> dict:
    return {
        "perPath": {
            s: {
                leaf: format_rational(verdict.per_path[s][leaf])
                for leaf in env.forest.leaves
                if leaf in verdict.per_path[s]
            }
            for s in env.states
        },
        "isDeterministicDB": verdict.is_deterministic_db,
    }


def acceptance_to_doc(report: AcceptanceReport, env: LearningEnvironment) -> dict:
    return {
        "accepted": report.accepted,
        "perContingency": {
            h: {
                "expectation": format_rational(report.per_contingency[h][0]),
                "accepted": report.per_contingency[h][1],
            }
            for h in env.forest.nodes
        },
    }


def sim_report_to_doc(report: SimReport, states: tuple[str, ...]) -> dict:
    return {
        "rounds": report.rounds,
        "seed": report.seed,
        "perState": {
            s: {
                "count": report.per_state[s].count,
                "empiricalMean": report.per_state[s].empirical_mean,
                "exactExpectation": format_rational(report.per_state[s].exact_expectation),
                "exactExpectationUngated": format_rational(
                    report.per_state[s].exact_expectation_ungated
                ),
                "sampleStdDev": report.per_state[s].sample_std_dev,
            }
            for s in states
            if s in report.per_state
        },
    }


def dumps(payload: dict) -> str:
    return json.dumps(payload, indent=2) + "\n"


def load_file(path: str) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise InputError(f"file not found: {path}")
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})")
