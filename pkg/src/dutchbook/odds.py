"""Discounted and generalized odds ratios, the coherence graph over states,
cycle-consistency checking, and the plausibility partition."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import DomainError, IndeterminateProduct, IndeterminateRatio, InternalError
from .model import BeliefSystem, LearningEnvironment, ZERO, ONE

_ZERO_TAG = "zero"
_FINITE_TAG = "finite"
_INF_TAG = "infinite"


@dataclass(frozen=True)
class ExtendedRatio:
    """A strictly positive rational, zero, or infinity."""

    tag: str
    value: Fraction | None = None

    @staticmethod
    def zero() -> "ExtendedRatio":
        return ExtendedRatio(_ZERO_TAG)

    @staticmethod
    def infinite() -> "ExtendedRatio":
        return ExtendedRatio(_INF_TAG)

    @staticmethod
    def finite(v: Fraction) -> "ExtendedRatio":
        if v <= 0:
            raise ValueError(f"finite ratio must be positive, got {v}")
        return ExtendedRatio(_FINITE_TAG, Fraction(v))

    @property
    def is_zero(self) -> bool:
        return self.tag == _ZERO_TAG

    @property
    def is_finite(self) -> bool:
        return self.tag == _FINITE_TAG

    @property
    def is_infinite(self) -> bool:
        return self.tag == _INF_TAG

    @property
    def is_one(self) -> bool:
        return self.tag == _FINITE_TAG and self.value == 1

    def inverse(self) -> "ExtendedRatio":
        if self.is_zero:
            return ExtendedRatio.infinite()
        if self.is_infinite:
            return ExtendedRatio.zero()
        return ExtendedRatio.finite(1 / self.value)

    def __mul__(self, other: "ExtendedRatio") -> "ExtendedRatio":
        if (self.is_zero and other.is_infinite) or (self.is_infinite and other.is_zero):
            raise IndeterminateProduct("product of zero and infinite ratios")
        if self.is_zero or other.is_zero:
            return ExtendedRatio.zero()
        if self.is_infinite or other.is_infinite:
            return ExtendedRatio.infinite()
        return ExtendedRatio.finite(self.value * other.value)


@dataclass(frozen=True)
class OddsLink:
    """One discounted odds ratio o(src, dst | h)."""

    h: str
    src: str
    dst: str
    value: ExtendedRatio

    def reversed(self) -> "OddsLink":
        return OddsLink(self.h, self.dst, self.src, self.value.inverse())


OddsChain = Sequence[OddsLink]


@dataclass
class CoherenceGraph:
    """All defined discounted odds ratios, both orientations."""

    states: tuple[str, ...]
    edges: list[OddsLink]


@dataclass(frozen=True)
class PlausibilityPartition:
    """Disjoint state sets ordered from most to least plausible."""

    levels: tuple[tuple[str, ...], ...]


@dataclass(frozen=True)
class CoherenceCertificate:
    partition: PlausibilityPartition
    potentials: dict[str, Fraction]  # strictly positive, sums to 1 per level


@dataclass(frozen=True)
class CoherenceViolation:
    """A self-cycle of discounted odds ratios whose product is not 1."""

    cycle: tuple[OddsLink, ...]
    product: ExtendedRatio


def discounted_odds_ratio(
    env: LearningEnvironment, mu: BeliefSystem, h: str, s: str, sp: str
) -> ExtendedRatio:
    """o(s, s'|h) = (mu(s|h)/p(h|s)) * (p(h|s')/mu(s'|h))."""
    env.forest.require_node(h)
    env.require_state(s)
    env.require_state(sp)
    sh = env.consistent_states[h]
    if s not in sh or sp not in sh:
        raise DomainError(f"states {s!r},{sp!r} must both be consistent with {h!r}")
    if s == sp:
        raise DomainError("discounted odds ratio requires distinct states")
    a = mu[h].get(s, ZERO)
    b = mu[h].get(sp, ZERO)
    if a == 0 and b == 0:
        raise IndeterminateRatio(f"both beliefs zero at {h!r} for {s!r},{sp!r}")
    if a == 0:
        return ExtendedRatio.zero()
    if b == 0:
        return ExtendedRatio.infinite()
    return ExtendedRatio.finite(a / env.reach[h][s] * env.reach[h][sp] / b)


def generalized_odds_ratio(
    env: LearningEnvironment, mu: BeliefSystem, chain: OddsChain
) -> ExtendedRatio:
    """Product of a concatenation of discounted odds ratios.

    Link values are recomputed from (env, mu), so this doubles as the
    re-evaluation oracle for stored witnesses.
    """
    if not chain:
        raise DomainError("empty odds chain")
    product = ExtendedRatio.finite(ONE)
    prev_dst = None
    for link in chain:
        # Accept bare (h, src, dst) triples alongside OddsLink values.
        h, src, dst = (link.h, link.src, link.dst) if isinstance(link, OddsLink) else link
        if prev_dst is not None and prev_dst != src:
            raise DomainError(f"chain breaks between {prev_dst!r} and {src!r}")
        product = product * discounted_odds_ratio(env, mu, h, src, dst)
        prev_dst = dst
    return product


def build_coherence_graph(env: LearningEnvironment, mu: BeliefSystem) -> CoherenceGraph:
    """Materialize every defined DOR; indeterminate (0/0) pairs are omitted."""
    edges: list[OddsLink] = []
    for h in env.forest.nodes:
        sh = env.consistent_states[h]
        for s in sh:
            for sp in sh:
                if s == sp:
                    continue
                if mu[h].get(s, ZERO) == 0 and mu[h].get(sp, ZERO) == 0:
                    continue
                edges.append(OddsLink(h, s, sp, discounted_odds_ratio(env, mu, h, s, sp)))
    return CoherenceGraph(env.states, edges)


class _Analysis:
    """Spanning-tree potentials, finite components, and the zero-edge
    condensation, shared by check_coherence and plausibility_levels."""

    def __init__(self, graph: CoherenceGraph):
        self.graph = graph
        self.order = {s: i for i, s in enumerate(graph.states)}
        self.component: dict[str, int] = {}
        self.potential: dict[str, Fraction] = {}
        self.tree_parent: dict[str, OddsLink] = {}  # link oriented child -> parent
        self.violation: CoherenceViolation | None = None
        self.comp_levels: dict[int, int] = {}
        self._run()

    def _finite_adjacency(self) -> dict[str, list[OddsLink]]:
        adj: dict[str, list[OddsLink]] = {s: [] for s in self.graph.states}
        for e in self.graph.edges:
            if e.value.is_finite:
                adj[e.src].append(e)
        for s in adj:
            adj[s].sort(key=lambda e: (self.order[e.dst], e.h))
        return adj

    def _tree_path(self, frm: str, to: str) -> list[OddsLink]:
        """Links along the spanning tree from `frm` to `to` (same component)."""

        def to_root(x: str) -> list[str]:
            path = [x]
            while path[-1] in self.tree_parent:
                path.append(self.tree_parent[path[-1]].dst)
            return path

        up_a, up_b = to_root(frm), to_root(to)
        common = set(up_b)
        i = next(i for i, x in enumerate(up_a) if x in common)
        lca = up_a[i]
        links = [self.tree_parent[x] for x in up_a[:i]]  # frm -> lca, child->parent
        down = [self.tree_parent[x].reversed() for x in up_b[: up_b.index(lca)]]
        return links + list(reversed(down))

    def _run(self) -> None:
        adj = self._finite_adjacency()
        comp = 0
        for root in self.graph.states:
            if root in self.component:
                continue
            self.component[root] = comp
            self.potential[root] = ONE
            queue = [root]
            while queue:
                u = queue.pop(0)
                for e in adj[u]:
                    v = e.dst
                    if v not in self.component:
                        self.component[v] = comp
                        # pot(u)/pot(v) = o(u, v|h) for the tree edge.
                        self.potential[v] = self.potential[u] / e.value.value
                        self.tree_parent[v] = e.reversed()
                        queue.append(v)
            comp += 1
        self.n_components = comp

        # Every finite edge must agree with the potentials.
        for e in sorted(
            self.graph.edges, key=lambda e: (self.order[e.src], self.order[e.dst], e.h)
        ):
            if not e.value.is_finite:
                continue
            if self.potential[e.src] / self.potential[e.dst] != e.value.value:
                cycle = [e] + self._tree_path(e.dst, e.src)
                self.violation = _make_violation(cycle)
                return

        # Zero edges: inside a finite component they witness a violation;
        # across components they must form a DAG on the condensation.
        zero_edges = sorted(
            (e for e in self.graph.edges if e.value.is_zero),
            key=lambda e: (self.order[e.src], self.order[e.dst], e.h),
        )
        cond: dict[int, dict[int, OddsLink]] = {c: {} for c in range(comp)}
        for e in zero_edges:
            ca, cb = self.component[e.src], self.component[e.dst]
            if ca == cb:
                cycle = [e] + self._tree_path(e.dst, e.src)
                self.violation = _make_violation(cycle)
                return
            cond[ca].setdefault(cb, e)

        cyc = self._condensation_cycle(cond)
        if cyc is not None:
            links: list[OddsLink] = []
            for i, e in enumerate(cyc):
                nxt = cyc[(i + 1) % len(cyc)]
                links.append(e)
                if e.dst != nxt.src:
                    links.extend(self._tree_path(e.dst, nxt.src))
            # rotate so the cycle is closed from links[0].src
            self.violation = _make_violation(links)
            return

        # Levels on the condensation DAG of zero edges.
        memo: dict[int, int] = {}

        def level(c: int) -> int:
            if c not in memo:
                succs = cond[c]
                memo[c] = 1 if not succs else 1 + max(level(d) for d in succs)
            return memo[c]

        for c in range(comp):
            self.comp_levels[c] = level(c)

    def _condensation_cycle(self, cond: dict[int, dict[int, OddsLink]]) -> list[OddsLink] | None:
        """Directed cycle of zero edges across components, or None."""
        WHITE, GRAY, BLACK = 0, 1, 2
        color = {c: WHITE for c in cond}
        stack: list[tuple[int, OddsLink]] = []

        def dfs(c: int) -> list[OddsLink] | None:
            color[c] = GRAY
            for d in sorted(cond[c]):
                if color[d] == GRAY:
                    # unwind the stack back to d
                    cyc = [cond[c][d]]
                    for node, edge in reversed(stack):
                        cyc.append(edge)
                        if node == d:
                            break
                    return list(reversed(cyc))
                if color[d] == WHITE:
                    stack.append((c, cond[c][d]))
                    found = dfs(d)
                    stack.pop()
                    if found:
                        return found
            color[c] = BLACK
            return None

        for c in sorted(cond):
            if color[c] == WHITE:
                found = dfs(c)
                if found:
                    return found
        return None

    def partition(self) -> PlausibilityPartition:
        if self.violation is not None:
            raise InternalError("plausibility levels requested on incoherent graph")
        n = max(self.comp_levels.values(), default=1)
        levels = []
        for m in range(1, n + 1):
            members = tuple(
                s
                for s in self.graph.states
                if self.comp_levels[self.component[s]] == m
            )
            levels.append(members)
        return PlausibilityPartition(tuple(levels))

    def certificate(self) -> CoherenceCertificate:
        part = self.partition()
        potentials: dict[str, Fraction] = {}
        for members in part.levels:
            total = sum((self.potential[s] for s in members), ZERO)
            for s in members:
                potentials[s] = self.potential[s] / total
        return CoherenceCertificate(part, potentials)


def _make_violation(cycle: list[OddsLink]) -> CoherenceViolation:
    cycle = _simplify_cycle(cycle)
    product = ExtendedRatio.finite(ONE)
    for link in cycle:
        product = product * link.value
    if product.is_infinite:
        cycle = [l.reversed() for l in reversed(cycle)]
        product = ExtendedRatio.zero()
    if product.is_one:
        raise InternalError("constructed witness cycle has product 1")
    return CoherenceViolation(tuple(cycle), product)


def _simplify_cycle(cycle: list[OddsLink]) -> list[OddsLink]:
    """Reduce a closed walk to a simple cycle whose product is still not 1.

    The walk decomposes into simple cycles whose products multiply to the
    walk's product, so at least one violating simple cycle exists.
    """
    while True:
        seen: dict[str, int] = {}
        split = None
        for i, link in enumerate(cycle):
            if link.src in seen:
                split = (seen[link.src], i)
                break
            seen[link.src] = i
        if split is None:
            return cycle
        lo, hi = split
        sub = cycle[lo:hi]
        rest = cycle[:lo] + cycle[hi:]
        for candidate in (sub, rest):
            if not candidate:
                continue
            product = ExtendedRatio.finite(ONE)
            ok = True
            try:
                for link in candidate:
                    product = product * link.value
            except IndeterminateProduct:
                ok = False
            if ok and not product.is_one:
                cycle = candidate
                break
        else:
            raise InternalError("cycle decomposition lost the violation")


def check_coherence(graph: CoherenceGraph) -> CoherenceCertificate | CoherenceViolation:
    """Certificate iff every generalized self-odds ratio is 1, else a witness
    self-cycle with product Zero or Finite(!= 1)."""
    analysis = _Analysis(graph)
    if analysis.violation is not None:
        return analysis.violation
    return analysis.certificate()


def plausibility_levels(graph: CoherenceGraph) -> PlausibilityPartition:
    """The partition (P^1,...,P^n) by depth of zero-odds reachability."""
    analysis = _Analysis(graph)
    if analysis.violation is not None:
        raise InternalError("graph fails coherence; no plausibility partition")
    return analysis.partition()
