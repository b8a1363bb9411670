"""Domain model: states, contingency forests, learning environments, beliefs.

All probability and payoff arithmetic uses `fractions.Fraction`; nothing on
a verdict path ever touches floating point.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import DomainError, InvalidEnvironment

ZERO = Fraction(0)
ONE = Fraction(1)

# A distribution is a state->mass map; missing keys mean zero mass.
Distribution = dict[str, Fraction]
# A belief system maps each contingency to a distribution over states.
BeliefSystem = dict[str, Distribution]


def mass_of(dist: Mapping[str, Fraction], keys: Iterable[str]) -> Fraction:
    """Total mass the distribution puts on the given keys."""
    return sum((dist.get(k, ZERO) for k in keys), ZERO)


def dist_equal(a: Mapping[str, Fraction], b: Mapping[str, Fraction]) -> bool:
    """Exact equality of distributions, treating missing keys as zero."""
    for k in set(a) | set(b):
        if a.get(k, ZERO) != b.get(k, ZERO):
            return False
    return True


def check_distribution(dist: Mapping[str, Fraction], what: str) -> None:
    total = ZERO
    for key, mass in dist.items():
        if mass < 0:
            raise InvalidEnvironment(f"{what}: negative mass at {key!r}")
        total += mass
    if total != ONE:
        raise InvalidEnvironment(f"{what}: masses sum to {total}, not 1")


class ContingencyForest:
    """Arborescence (possibly multi-rooted) of contingencies.

    `nodes` fixes the canonical order; `parent` maps each non-root node to
    its parent. Derived tables are computed once and never mutated.
    """

    def __init__(self, nodes: Sequence[str], parent: Mapping[str, str]):
        if not nodes:
            raise InvalidEnvironment("forest has no contingencies")
        if len(set(nodes)) != len(nodes):
            raise InvalidEnvironment("duplicate contingency identifiers")
        node_set = set(nodes)
        for child, par in parent.items():
            if child not in node_set:
                raise InvalidEnvironment(f"unknown contingency {child!r} in parent map")
            if par not in node_set:
                raise InvalidEnvironment(f"unknown parent {par!r} of {child!r}")
            if par == child:
                raise InvalidEnvironment(f"contingency {child!r} is its own parent")
        self.nodes: tuple[str, ...] = tuple(nodes)
        self.parent: dict[str, str] = dict(parent)
        self.index: dict[str, int] = {h: i for i, h in enumerate(self.nodes)}

        children: dict[str, list[str]] = {h: [] for h in self.nodes}
        for child in self.nodes:
            if child in self.parent:
                children[self.parent[child]].append(child)
        self.children: dict[str, tuple[str, ...]] = {
            h: tuple(cs) for h, cs in children.items()
        }
        self.roots: tuple[str, ...] = tuple(h for h in self.nodes if h not in self.parent)
        self.leaves: tuple[str, ...] = tuple(h for h in self.nodes if not children[h])

        # Root-to-node chain per node; walking it also detects parent cycles.
        chains: dict[str, tuple[str, ...]] = {}
        for h in self.nodes:
            rev = [h]
            seen = {h}
            cur = h
            while cur in self.parent:
                cur = self.parent[cur]
                if cur in seen:
                    raise InvalidEnvironment(f"cycle in forest through {cur!r}")
                seen.add(cur)
                rev.append(cur)
            chains[h] = tuple(reversed(rev))
        self.chain: dict[str, tuple[str, ...]] = chains

    def is_proper_ancestor(self, h: str, hp: str) -> bool:
        """True iff h strictly precedes hp (h in hp's chain, h != hp)."""
        return h != hp and h in self.chain[hp]

    def comparable_pairs(self) -> Iterable[tuple[str, str]]:
        """All (h, h') with h a proper ancestor of h', in canonical order."""
        for h in self.nodes:
            for hp in self.nodes:
                if self.is_proper_ancestor(h, hp):
                    yield h, hp

    def require_node(self, h: str) -> None:
        if h not in self.index:
            raise DomainError(f"unknown contingency {h!r}")


class LearningEnvironment:
    """States, forest, per-state path distributions, and derived reach tables.

    Built by `build_environment`; immutable after construction. Paths are
    keyed by their leaf contingency.
    """

    def __init__(
        self,
        states: tuple[str, ...],
        forest: ContingencyForest,
        eta: dict[str, Distribution],
        reach: dict[str, dict[str, Fraction]],
        consistent_states: dict[str, tuple[str, ...]],
        consistent_paths: dict[str, tuple[str, ...]],
    ):
        self.states = states
        self.forest = forest
        self.eta = eta
        self.reach = reach  # reach[h][s] = p(h|s)
        self.consistent_states = consistent_states  # S(h)
        self.consistent_paths = consistent_paths  # L(s), as leaf keys
        self.state_index = {s: i for i, s in enumerate(states)}

    def require_state(self, s: str) -> None:
        if s not in self.state_index:
            raise DomainError(f"unknown state {s!r}")

    def paths_through(self, h: str) -> tuple[str, ...]:
        """Leaves of paths going through h, i.e. L(h)."""
        return tuple(l for l in self.forest.leaves if h in self.forest.chain[l])


def build_environment(
    states: Sequence[str],
    forest: ContingencyForest,
    eta: Mapping[str, Mapping[str, Fraction]],
) -> LearningEnvironment:
    """Validate inputs and populate every derived table eagerly."""
    if not states:
        raise InvalidEnvironment("state space is empty")
    if len(set(states)) != len(states):
        raise InvalidEnvironment("duplicate state identifiers")
    state_tuple = tuple(states)
    leaf_set = set(forest.leaves)

    missing = [s for s in state_tuple if s not in eta]
    if missing:
        raise InvalidEnvironment(f"eta missing rows for states {missing}")
    unknown = [s for s in eta if s not in state_tuple]
    if unknown:
        raise InvalidEnvironment(f"eta rows for unknown states {unknown}")

    eta_table: dict[str, Distribution] = {}
    for s in state_tuple:
        row = {k: Fraction(v) for k, v in eta[s].items()}
        bad = [k for k in row if k not in leaf_set]
        if bad:
            raise InvalidEnvironment(f"eta[{s!r}] has unknown path keys {bad}")
        check_distribution(row, f"eta[{s!r}]")
        eta_table[s] = row

    reach: dict[str, dict[str, Fraction]] = {
        h: {s: ZERO for s in state_tuple} for h in forest.nodes
    }
    for s in state_tuple:
        for leaf, mass in eta_table[s].items():
            if mass == 0:
                continue
            for h in forest.chain[leaf]:
                reach[h][s] += mass

    consistent_states: dict[str, tuple[str, ...]] = {}
    for h in forest.nodes:
        sh = tuple(s for s in state_tuple if reach[h][s] > 0)
        if not sh:
            raise InvalidEnvironment(f"inconsistent contingency {h!r}: S(h) is empty")
        consistent_states[h] = sh

    consistent_paths = {
        s: tuple(l for l in forest.leaves if eta_table[s].get(l, ZERO) > 0)
        for s in state_tuple
    }
    return LearningEnvironment(
        state_tuple, forest, eta_table, reach, consistent_states, consistent_paths
    )


def reach_probability(env: LearningEnvironment, h: str, s: str) -> Fraction:
    """p(h|s): probability that state s leads through contingency h."""
    env.forest.require_node(h)
    env.require_state(s)
    return env.reach[h][s]


def is_uniform_reach(env: LearningEnvironment) -> bool:
    """True iff every contingency is reached with one probability across S(h)."""
    for h in env.forest.nodes:
        values = {env.reach[h][s] for s in env.consistent_states[h]}
        if len(values) > 1:
            return False
    return True


def has_deterministic_continuation(env: LearningEnvironment) -> bool:
    """True iff at every non-leaf h, each consistent state continues through
    a single child of h on all its paths."""
    for h in env.forest.nodes:
        kids = env.forest.children[h]
        if not kids:
            continue
        child_of = {}
        for c in kids:
            for leaf in env.paths_through(c):
                child_of[leaf] = c
        for s in env.consistent_states[h]:
            used = {
                child_of[leaf]
                for leaf in env.consistent_paths[s]
                if h in env.forest.chain[leaf]
            }
            if len(used) > 1:
                return False
    return True


def validate_belief_system(
    env: LearningEnvironment, mu: Mapping[str, Mapping[str, Fraction]]
) -> list[tuple[str, str]]:
    """Return a list of (contingency, reason) violations; empty means valid."""
    violations: list[tuple[str, str]] = []
    for h in mu:
        if h not in env.forest.index:
            violations.append((h, "unknown contingency"))
    for h in env.forest.nodes:
        if h not in mu:
            violations.append((h, "undefined belief"))
            continue
        row = mu[h]
        bad = [s for s in row if s not in env.state_index]
        if bad:
            violations.append((h, f"unknown states {bad}"))
            continue
        if any(m < 0 for m in row.values()):
            violations.append((h, "negative mass"))
            continue
        total = sum(row.values(), ZERO)
        if total != ONE:
            violations.append((h, f"masses sum to {total}, not 1"))
            continue
        on_support = mass_of(row, env.consistent_states[h])
        if on_support != ONE:
            violations.append((h, f"mass {ONE - on_support} outside S(h)"))
    return violations
