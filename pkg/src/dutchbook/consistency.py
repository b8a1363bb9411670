"""Complete-consistency checking, LCPS extraction and belief derivation,
and forward-consistency checking."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .errors import InputError, InternalError, PreconditionViolation
from .model import (
    BeliefSystem,
    Distribution,
    LearningEnvironment,
    ONE,
    ZERO,
    dist_equal,
    mass_of,
    validate_belief_system,
)
from .odds import (
    CoherenceCertificate,
    CoherenceViolation,
    build_coherence_graph,
    check_coherence,
)


@dataclass(frozen=True)
class Lcps:
    """Ordered mutually-singular probability measures covering all states."""

    levels: tuple[Distribution, ...]

    def level_for(self, states: tuple[str, ...] | frozenset[str]) -> int:
        """Index of the first level putting positive mass on the event."""
        for m, level in enumerate(self.levels):
            if mass_of(level, states) > 0:
                return m
        raise InternalError(f"no level explains event {sorted(states)}")


def validate_lcps(lcps: Lcps, states: tuple[str, ...]) -> None:
    if not lcps.levels:
        raise InputError("LCPS has no levels")
    for m, level in enumerate(lcps.levels):
        bad = [s for s in level if s not in states]
        if bad:
            raise InputError(f"LCPS level {m} has unknown states {bad}")
        if any(mass < 0 for mass in level.values()):
            raise InputError(f"LCPS level {m} has negative mass")
        if sum(level.values(), ZERO) != ONE:
            raise InputError(f"LCPS level {m} does not sum to 1")
    for s in states:
        hits = sum(1 for level in lcps.levels if level.get(s, ZERO) > 0)
        if hits != 1:
            raise InputError(f"state {s!r} is positive at {hits} levels, expected 1")


@dataclass(frozen=True)
class ForwardViolation:
    """Witness that mu(.|h') is not the conditioning of mu(.|h)."""

    h: str
    h_prime: str
    s: str
    lhs: Fraction  # mu(s|h)
    rhs: Fraction  # mu(s|h') * mu(S(h')|h)


@dataclass(frozen=True)
class ConsistencyResult:
    consistent: bool
    lcps: Lcps | None = None
    certificate: CoherenceCertificate | None = None
    violation: CoherenceViolation | None = None


def derive_beliefs(env: LearningEnvironment, lcps: Lcps) -> BeliefSystem:
    """Bayes rule at every contingency from the first level explaining it."""
    validate_lcps(lcps, env.states)
    beliefs: BeliefSystem = {}
    for h in env.forest.nodes:
        sh = env.consistent_states[h]
        level = lcps.levels[lcps.level_for(sh)]
        weights = {s: env.reach[h][s] * level.get(s, ZERO) for s in sh}
        total = sum(weights.values(), ZERO)
        beliefs[h] = {s: w / total for s, w in weights.items() if w > 0}
    return beliefs


def verify_ccbs(env: LearningEnvironment, mu: BeliefSystem, lcps: Lcps) -> bool:
    """True iff mu is exactly the belief system the LCPS induces."""
    derived = derive_beliefs(env, lcps)
    return all(dist_equal(derived[h], mu.get(h, {})) for h in env.forest.nodes)


def _require_valid_beliefs(env: LearningEnvironment, mu: Mapping) -> None:
    violations = validate_belief_system(env, mu)
    if violations:
        raise InputError(f"invalid belief system: {violations[:3]}")


def extract_lcps(env: LearningEnvironment, mu: BeliefSystem) -> Lcps:
    """Build the rationalizing LCPS from a coherence certificate.

    Levels follow the plausibility partition; within a level, masses are the
    certificate potentials (already normalized to sum 1 per level).
    """
    _require_valid_beliefs(env, mu)
    outcome = check_coherence(build_coherence_graph(env, mu))
    if isinstance(outcome, CoherenceViolation):
        raise PreconditionViolation("belief system is not coherent")
    return _lcps_from_certificate(outcome)


def _lcps_from_certificate(cert: CoherenceCertificate) -> Lcps:
    levels = tuple(
        {s: cert.potentials[s] for s in members} for members in cert.partition.levels
    )
    return Lcps(levels)


def check_complete_consistency(
    env: LearningEnvironment, mu: BeliefSystem
) -> ConsistencyResult:
    """Decide consistency; certificate side returns a verified LCPS."""
    _require_valid_beliefs(env, mu)
    outcome = check_coherence(build_coherence_graph(env, mu))
    if isinstance(outcome, CoherenceViolation):
        return ConsistencyResult(consistent=False, violation=outcome)
    lcps = _lcps_from_certificate(outcome)
    if not verify_ccbs(env, mu, lcps):
        raise InternalError("extracted LCPS does not reproduce the belief system")
    return ConsistencyResult(consistent=True, lcps=lcps, certificate=outcome)


def check_forward_consistency(
    env: LearningEnvironment, mu: BeliefSystem
) -> ForwardViolation | None:
    """Conditioning criterion over all comparable pairs; None means consistent.

    Returns the first violation in canonical (h, h', state) order.
    """
    _require_valid_beliefs(env, mu)
    for h, hp in env.forest.comparable_pairs():
        shp = env.consistent_states[hp]
        event_mass = mass_of(mu[h], shp)
        if event_mass == 0:
            continue
        for s in shp:
            lhs = mu[h].get(s, ZERO)
            rhs = mu[hp].get(s, ZERO) * event_mass
            if lhs != rhs:
                return ForwardViolation(h, hp, s, lhs, rhs)
    return None
