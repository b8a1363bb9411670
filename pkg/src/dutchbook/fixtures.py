"""Canonical example instances used across the test suite and docs.

Everything here is built from scratch on each call so tests can mutate
results freely.
"""

from fractions import Fraction

from .consistency import Lcps
from .model import (
    BeliefSystem,
    ContingencyForest,
    LearningEnvironment,
    build_environment,
)

F = Fraction


def larry_environment() -> LearningEnvironment:
    """Three states, six flat contingencies, uniform path distributions.

    Each pair contingency is named after its two member states
    (sm = sq & ma, mp = ma & pa, ps = pa & sq).
    """
    forest = ContingencyForest(["sq", "ma", "pa", "sm", "mp", "ps"], {})
    eta = {
        "sq": {"sq": F(1, 3), "sm": F(1, 3), "ps": F(1, 3)},
        "ma": {"ma": F(1, 3), "sm": F(1, 3), "mp": F(1, 3)},
        "pa": {"pa": F(1, 3), "mp": F(1, 3), "ps": F(1, 3)},
    }
    return build_environment(["sq", "ma", "pa"], forest, eta)


def regret_beliefs() -> BeliefSystem:
    """Beliefs that always favor the state just ruled less likely in."""
    return {
        "sq": {"sq": F(1)},
        "ma": {"ma": F(1)},
        "pa": {"pa": F(1)},
        "sm": {"sq": F(1, 4), "ma": F(3, 4)},
        "mp": {"ma": F(1, 4), "pa": F(3, 4)},
        "ps": {"pa": F(1, 4), "sq": F(3, 4)},
    }


def uniform_beliefs() -> BeliefSystem:
    return {
        "sq": {"sq": F(1)},
        "ma": {"ma": F(1)},
        "pa": {"pa": F(1)},
        "sm": {"sq": F(1, 2), "ma": F(1, 2)},
        "mp": {"ma": F(1, 2), "pa": F(1, 2)},
        "ps": {"pa": F(1, 2), "sq": F(1, 2)},
    }


def lex_lcps() -> Lcps:
    """Two levels: certainty of sq first, then 2:1 odds on ma over pa."""
    return Lcps((
        {"sq": F(1)},
        {"ma": F(2, 3), "pa": F(1, 3)},
    ))


def lex_beliefs() -> BeliefSystem:
    """Beliefs induced by `lex_lcps` on the Larry environment."""
    return {
        "sq": {"sq": F(1)},
        "ma": {"ma": F(1)},
        "pa": {"pa": F(1)},
        "sm": {"sq": F(1)},
        "mp": {"ma": F(2, 3), "pa": F(1, 3)},
        "ps": {"sq": F(1)},
    }


def skewed_environment() -> LearningEnvironment:
    """Two states, two leaf contingencies, asymmetric reach."""
    forest = ContingencyForest(["a", "b"], {})
    eta = {
        "u": {"a": F(3, 4), "b": F(1, 4)},
        "v": {"a": F(1, 4), "b": F(3, 4)},
    }
    return build_environment(["u", "v"], forest, eta)


def skewed_beliefs() -> BeliefSystem:
    return {
        "a": {"u": F(3, 4), "v": F(1, 4)},
        "b": {"u": F(1, 4), "v": F(3, 4)},
    }


def nested_environment() -> LearningEnvironment:
    """A root contingency refined by two leaves; every state is deterministic."""
    forest = ContingencyForest(["h0", "h1", "h2"], {"h1": "h0", "h2": "h0"})
    eta = {
        "A": {"h1": F(1)},
        "B": {"h1": F(1)},
        "C": {"h2": F(1)},
    }
    return build_environment(["A", "B", "C"], forest, eta)


def nested_ok_beliefs() -> BeliefSystem:
    return {
        "h0": {"A": F(1, 3), "B": F(1, 3), "C": F(1, 3)},
        "h1": {"A": F(1, 2), "B": F(1, 2)},
        "h2": {"C": F(1)},
    }


def drift_beliefs() -> BeliefSystem:
    """Forward-inconsistent beliefs: the h1 row shifts away from the prior."""
    return {
        "h0": {"A": F(1, 3), "B": F(1, 3), "C": F(1, 3)},
        "h1": {"A": F(3, 4), "B": F(1, 4)},
        "h2": {"C": F(1)},
    }


def larry_book() -> dict[str, dict[str, Fraction]]:
    """The 9/-10 gamble pattern at every pair contingency."""
    return {
        "sq": {},
        "ma": {},
        "pa": {},
        "sm": {"ma": F(9), "sq": F(-10)},
        "mp": {"pa": F(9), "ma": F(-10)},
        "ps": {"sq": F(9), "pa": F(-10)},
    }


def nested_deterministic_book() -> dict[str, dict[str, Fraction]]:
    """The deterministic book synthesized against `drift_beliefs` at eps=1/2."""
    return {
        "h0": {"B": F(1), "A": F(-5, 6)},
        "h1": {"B": F(-25, 24), "A": F(1, 2)},
    }
