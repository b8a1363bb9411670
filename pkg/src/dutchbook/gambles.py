"""Gamble systems, acceptance semantics, Dutch-book classification, and the
two constructive synthesizers."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .errors import DomainError, InternalError, PreconditionViolation, UnsupportedEnvironment
from .model import (
    BeliefSystem,
    Distribution,
    LearningEnvironment,
    ONE,
    ZERO,
    has_deterministic_continuation,
    mass_of,
)
from .consistency import check_complete_consistency, check_forward_consistency
from .odds import OddsLink

log = logging.getLogger(__name__)

# A gamble system maps each contingency to a state->payoff map (missing = 0).
GambleSystem = dict[str, dict[str, Fraction]]

MAX_EPSILON_HALVINGS = 64


@dataclass(frozen=True)
class SynthesisParams:
    epsilon: Fraction = Fraction(1)
    shrink_factor: Fraction = Fraction(1, 2)

    def __post_init__(self):
        if self.epsilon <= 0:
            raise DomainError("epsilon must be positive")
        if not 0 < self.shrink_factor < 1:
            raise DomainError("shrink factor must be in (0, 1)")


@dataclass(frozen=True)
class BookVerdict:
    per_state: dict[str, Fraction]  # objective expected payoff per state
    is_dutch_book: bool


@dataclass(frozen=True)
class DeterministicVerdict:
    per_path: dict[str, dict[str, Fraction]]  # state -> leaf -> realized sum
    is_deterministic_db: bool


@dataclass(frozen=True)
class AcceptanceReport:
    accepted: bool
    per_contingency: dict[str, tuple[Fraction, bool]]  # h -> (expectation, accepted)


def expected_payoff(nu: Mapping[str, Fraction], gamble: Mapping[str, Fraction]) -> Fraction:
    return sum((nu.get(s, ZERO) * x for s, x in gamble.items()), ZERO)


def is_willing_to_accept(nu: Mapping[str, Fraction], gamble: Mapping[str, Fraction]) -> bool:
    """Positive expectation, or zero expectation with no loss on nu-null states."""
    value = expected_payoff(nu, gamble)
    if value > 0:
        return True
    if value < 0:
        return False
    return all(x >= 0 for s, x in gamble.items() if nu.get(s, ZERO) == 0)


def _check_supports(env: LearningEnvironment, g: GambleSystem) -> None:
    for h, gamble in g.items():
        env.forest.require_node(h)
        allowed = set(env.consistent_states[h])
        for s, x in gamble.items():
            env.require_state(s)
            if x != 0 and s not in allowed:
                raise DomainError(f"gamble at {h!r} pays {x} on {s!r} outside S(h)")


def accepts_system(
    env: LearningEnvironment, mu: BeliefSystem, g: GambleSystem
) -> AcceptanceReport:
    """Per-contingency acceptance of every gamble in the system."""
    _check_supports(env, g)
    detail: dict[str, tuple[Fraction, bool]] = {}
    for h in env.forest.nodes:
        gamble = g.get(h, {})
        belief = mu[h]
        detail[h] = (expected_payoff(belief, gamble), is_willing_to_accept(belief, gamble))
    return AcceptanceReport(all(ok for _, ok in detail.values()), detail)


def classify_dutch_book(env: LearningEnvironment, g: GambleSystem) -> BookVerdict:
    """Objective expected payoff per state; a Dutch book never gains and
    sometimes loses."""
    _check_supports(env, g)
    per_state = {
        s: sum((env.reach[h][s] * g.get(h, {}).get(s, ZERO) for h in env.forest.nodes), ZERO)
        for s in env.states
    }
    values = per_state.values()
    return BookVerdict(per_state, all(v <= 0 for v in values) and any(v < 0 for v in values))


def classify_deterministic(env: LearningEnvironment, g: GambleSystem) -> DeterministicVerdict:
    """Realized cumulative payoff along every consistent path of every state."""
    _check_supports(env, g)
    per_path: dict[str, dict[str, Fraction]] = {}
    flat: list[Fraction] = []
    for s in env.states:
        per_path[s] = {}
        for leaf in env.consistent_paths[s]:
            total = sum(
                (g.get(h, {}).get(s, ZERO) for h in env.forest.chain[leaf]), ZERO
            )
            per_path[s][leaf] = total
            flat.append(total)
    verdict = all(v <= 0 for v in flat) and any(v < 0 for v in flat)
    return DeterministicVerdict(per_path, verdict)


def _orient_cycle(cycle: tuple[OddsLink, ...], product) -> tuple[OddsLink, ...]:
    """Reverse the witness cycle if its finite product exceeds 1."""
    if product.is_finite and product.value > 1:
        return tuple(link.reversed() for link in reversed(cycle))
    return cycle


def _expected_terms_book(
    env: LearningEnvironment,
    mu: BeliefSystem,
    cycle: tuple[OddsLink, ...],
    eps: Fraction,
) -> GambleSystem:
    """The telescoping gamble recursion along a witness cycle.

    Entries at a repeated contingency are summed. Uses the uniform recursion
        g(s^m | h^m) = -g(s^m-1 | h^m) * mu(s^m-1|h^m)/mu(s^m|h^m) + eps,
    which makes each cycle contingency's subjective expectation exactly
    eps * mu(s^m | h^m) > 0.
    """
    g: GambleSystem = {}

    def add(h: str, s: str, x: Fraction) -> None:
        g.setdefault(h, {})
        g[h][s] = g[h].get(s, ZERO) + x

    prev_b = None  # g(s^m-1 | h^m-1)
    for m, link in enumerate(cycle):
        h, s_prev, s_cur = link.h, link.src, link.dst
        if m == 0:
            a = Fraction(-1)
        else:
            h_last = cycle[m - 1].h
            a = -prev_b * env.reach[h_last][s_prev] / env.reach[h][s_prev] - eps
        b = -a * mu[h].get(s_prev, ZERO) / mu[h][s_cur] + eps
        add(h, s_prev, a)
        add(h, s_cur, b)
        prev_b = b
    return g


def synthesize_dutch_book(
    env: LearningEnvironment,
    mu: BeliefSystem,
    params: SynthesisParams = SynthesisParams(),
) -> GambleSystem:
    """Turn a coherence violation into a verified, accepted Dutch book."""
    result = check_complete_consistency(env, mu)
    if result.consistent:
        raise PreconditionViolation("belief system is completely consistent")
    witness = result.violation
    cycle = _orient_cycle(witness.cycle, witness.product)

    # Telescoping identity at eps = 0: the anchor state's objective
    # expectation is exactly -p(h^1|s) * (1 - r).
    anchor, h1 = cycle[0].src, cycle[0].h
    r = ZERO
    if witness.product.is_finite:
        r = min(witness.product.value, 1 / witness.product.value)
    limit = classify_dutch_book(env, _expected_terms_book(env, mu, cycle, ZERO))
    if limit.per_state[anchor] != -env.reach[h1][anchor] * (ONE - r):
        raise InternalError("telescoping identity failed on witness cycle")

    eps = params.epsilon
    for _ in range(MAX_EPSILON_HALVINGS):
        g = _expected_terms_book(env, mu, cycle, eps)
        if (
            accepts_system(env, mu, g).accepted
            and classify_dutch_book(env, g).is_dutch_book
        ):
            return g
        eps *= params.shrink_factor
    raise InternalError("epsilon shrinking exhausted; witness cycle is defective")


def _deterministic_witness_pair(
    env: LearningEnvironment, mu: BeliefSystem
) -> tuple[str, str, str, str, Fraction, Fraction] | None:
    """Find (h, h', s, s') with both odds finite and x = odds at h strictly
    above y = odds at h', scanning violating comparable pairs in order."""
    for h, hp in env.forest.comparable_pairs():
        shp = env.consistent_states[hp]
        event_mass = mass_of(mu[h], shp)
        if event_mass == 0:
            continue
        if all(mu[h].get(s, ZERO) == mu[hp].get(s, ZERO) * event_mass for s in shp):
            continue
        for s in shp:
            for sp in shp:
                if s == sp:
                    continue
                if mu[hp].get(sp, ZERO) == 0 or mu[h].get(sp, ZERO) == 0:
                    continue
                x = mu[h].get(s, ZERO) / mu[h][sp]
                y = mu[hp].get(s, ZERO) / mu[hp][sp]
                if x > y:
                    return h, hp, s, sp, x, y
    return None


def synthesize_deterministic_db(
    env: LearningEnvironment,
    mu: BeliefSystem,
    epsilon: Fraction | None = None,
) -> GambleSystem:
    """Two-contingency deterministic Dutch book from a conditioning failure.

    Requires deterministic continuation so that every path of a state in
    S(h') that passes h also reaches h'.
    """
    if check_forward_consistency(env, mu) is None:
        raise PreconditionViolation("belief system is forward consistent")
    if not has_deterministic_continuation(env):
        raise UnsupportedEnvironment(
            "environment lacks deterministic continuation; the two-contingency "
            "construction does not yield a deterministic Dutch book here"
        )
    found = _deterministic_witness_pair(env, mu)
    if found is None:
        raise PreconditionViolation(
            "every violating orientation has an infinite odds ratio; "
            "no finite witness pair available"
        )
    h, hp, s, sp, x, y = found

    eps = epsilon if epsilon is not None else (x - y) / 2
    warned = False
    for _ in range(MAX_EPSILON_HALVINGS):
        if eps < x - y:
            for drag in (y * eps / 4, ZERO):
                g: GambleSystem = {
                    h: {s: ONE, sp: -x + eps / 3},
                    hp: {s: -ONE - drag, sp: y + eps / 3},
                }
                if (
                    accepts_system(env, mu, g).accepted
                    and classify_deterministic(env, g).is_deterministic_db
                ):
                    return g
                if drag != 0 and not warned:
                    # The y*eps/4 drag term can break acceptance at h'
                    # regardless of eps; fall back to a zero drag.
                    log.warning("printed constants rejected at eps=%s; dropping drag term", eps)
                    warned = True
        eps /= 2
    raise InternalError("epsilon shrinking exhausted in deterministic synthesis")
