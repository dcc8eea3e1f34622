"""Utility functions over partial realizations, combinators, and checkers.

A utility function maps partial realizations to nonnegative integers and is
expected (for a solvable instance) to reach its goal value on every full
realization.  Concrete families are closed-form; only `TableUtility` stores a
raw table (used to build counterexamples).  Evaluations are memoized per
instance, keyed by the partial realization.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .core import (
    UNKNOWN,
    PreconditionError,
    StateAlphabet,
    WeightedSample,
    empty_partial,
    enumerate_partials,
    enumerate_realizations,
    extend,
    free_items,
    is_full,
    set_items,
)


class UtilityFunction:
    """Base class: subclasses implement `_evaluate(b) -> int`."""

    def __init__(self, n: int, goal: int, alphabet: StateAlphabet):
        self.n = n
        self.goal = goal
        self.alphabet = alphabet
        self._cache: dict = {}

    def value(self, b) -> int:
        v = self._cache.get(b)
        if v is None:
            v = self._evaluate(b)
            self._cache[b] = v
        return v

    def _evaluate(self, b) -> int:
        raise NotImplementedError

    def verify_goal_on_full(self, enumeration_budget: int = 200_000) -> bool:
        """Check value(a) == goal on every full realization (if enumerable)."""
        if len(self.alphabet) ** self.n > enumeration_budget:
            raise PreconditionError("realization space too large to enumerate")
        return all(
            self.value(a) == self.goal
            for a in enumerate_realizations(self.alphabet, self.n)
        )


def marginal(g: UtilityFunction, b, i: int, state: str) -> int:
    """Utility gained by observing `state` for item i starting from b."""
    return g.value(extend(b, i, state)) - g.value(b)


def worst_state(g: UtilityFunction, b, i: int) -> str:
    """State of item i with the smallest gain from b; alphabet order on ties."""
    best = None
    best_gain = None
    for state in g.alphabet:
        gain = marginal(g, b, i, state)
        if best_gain is None or gain < best_gain:
            best, best_gain = state, gain
    return best


class OrUtility(UtilityFunction):
    """Combination reaching its goal when either constituent reaches its own.

    value(b) = Q1*Q2 - (Q1 - g1(b)) * (Q2 - g2(b)), goal Q1*Q2.  Preserves
    monotonicity and submodularity.  For the combined function to reach its
    goal on all full realizations, at least one constituent must reach its
    goal on each of them (caller's responsibility; checkable by enumeration).
    """

    def __init__(self, g1: UtilityFunction, g2: UtilityFunction):
        if g1.n != g2.n or g1.alphabet != g2.alphabet:
            raise PreconditionError("operands differ in dimension or alphabet")
        super().__init__(g1.n, g1.goal * g2.goal, g1.alphabet)
        self.left = g1
        self.right = g2

    def _evaluate(self, b):
        q1, q2 = self.left.goal, self.right.goal
        return q1 * q2 - (q1 - self.left.value(b)) * (q2 - self.right.value(b))


def or_combine(g1: UtilityFunction, g2: UtilityFunction) -> OrUtility:
    return OrUtility(g1, g2)


class CountEliminationUtility(UtilityFunction):
    """Number of sample rows ruled out by the observed states; goal m."""

    def __init__(self, sample: WeightedSample, n: int, alphabet: StateAlphabet):
        if not sample.rows:
            raise PreconditionError("sample must be nonempty")
        super().__init__(n, sample.size, alphabet)
        self.sample = sample

    def _evaluate(self, b):
        return self.sample.size - len(self.sample.consistent_rows(b)[0])


class WeightEliminationUtility(UtilityFunction):
    """Total weight of sample rows ruled out by the observed states; goal W."""

    def __init__(self, sample: WeightedSample, n: int, alphabet: StateAlphabet):
        if not sample.rows:
            raise PreconditionError("sample must be nonempty")
        super().__init__(n, sample.total_weight, alphabet)
        self.sample = sample

    def _evaluate(self, b):
        return self.sample.total_weight - self.sample.weight_of(b)


def count_elimination_utility(sample, n, alphabet) -> CountEliminationUtility:
    return CountEliminationUtility(sample, n, alphabet)


def weight_elimination_utility(sample, n, alphabet) -> WeightEliminationUtility:
    return WeightEliminationUtility(sample, n, alphabet)


def scenario_count_utility(g: UtilityFunction, sample: WeightedSample) -> OrUtility:
    """OR of g with the row-count elimination utility; goal Q*m."""
    return or_combine(g, CountEliminationUtility(sample, g.n, g.alphabet))


def scenario_weight_utility(g: UtilityFunction, sample: WeightedSample) -> OrUtility:
    """OR of g with the weight elimination utility; goal Q*W."""
    return or_combine(g, WeightEliminationUtility(sample, g.n, g.alphabet))


BINARY = StateAlphabet(("0", "1"))


class KOfNUtility(UtilityFunction):
    """Utility for evaluating the Boolean k-of-n threshold function.

    Over the binary alphabet, the goal k*(n-k+1) is reached exactly when b
    has at least k ones or at least n-k+1 zeros, i.e. when the function's
    value is determined.
    """

    def __init__(self, n: int, k: int):
        if not 1 <= k <= n:
            raise PreconditionError("k must satisfy 1 <= k <= n")
        super().__init__(n, k * (n - k + 1), BINARY)
        self.k = k

    def _evaluate(self, b):
        k, n = self.k, self.n
        ones = min(k, sum(1 for s in b if s == "1"))
        zeros = min(n - k + 1, sum(1 for s in b if s == "0"))
        return k * (n - k + 1) - (n - k + 1 - zeros) * (k - ones)


def k_of_n_utility(n: int, k: int) -> KOfNUtility:
    return KOfNUtility(n, k)


class CoverageUtility(UtilityFunction):
    """Union coverage of a finite universe; monotone submodular by shape.

    `covers[(i, state)]` is the subset of the universe contributed when item
    i is observed in `state`.  Goal = universe size.  Construction checks
    that every element has an anchor item covering it in all states, which
    is equivalent to reaching the goal on every full realization.
    """

    def __init__(self, covers: dict, universe_size: int, n: int,
                 alphabet: StateAlphabet):
        super().__init__(n, universe_size, alphabet)
        self.universe = frozenset(range(universe_size))
        self.covers = {
            (i, s): frozenset(covers.get((i, s), ()))
            for i in range(n)
            for s in alphabet
        }
        for key, elems in self.covers.items():
            if not elems <= self.universe:
                raise PreconditionError("cover %r leaves the universe" % (key,))
        for u in self.universe:
            if not any(
                all(u in self.covers[(i, s)] for s in alphabet) for i in range(n)
            ):
                raise PreconditionError(
                    "element %d is uncovered under some realization" % u
                )

    def _evaluate(self, b):
        covered = set()
        for i, s in enumerate(b):
            if s != UNKNOWN:
                covered |= self.covers[(i, s)]
        return len(covered)


class TableUtility(UtilityFunction):
    """Utility stored as a raw table; for counterexample construction only."""

    def __init__(self, table: dict, goal: int, n: int, alphabet: StateAlphabet):
        super().__init__(n, goal, alphabet)
        self.table = dict(table)

    def _evaluate(self, b):
        return self.table[b]


@dataclass(frozen=True)
class CheckReport:
    ok: bool
    witness: tuple | None = None

    def __bool__(self):
        return self.ok


def check_monotone(g: UtilityFunction) -> CheckReport:
    """Exhaustive monotonicity check; witness is (b, i, state) on failure."""
    for b in enumerate_partials(g.alphabet, g.n):
        gb = g.value(b)
        for i in free_items(b):
            for state in g.alphabet:
                if g.value(extend(b, i, state)) < gb:
                    return CheckReport(False, (b, i, state))
    return CheckReport(True)


def _strict_ancestors(b):
    """All b0 with b > b0, obtained by unsetting nonempty subsets of set items."""
    fixed = set_items(b)
    for r in range(1, len(fixed) + 1):
        for drop in itertools.combinations(fixed, r):
            b0 = list(b)
            for i in drop:
                b0[i] = UNKNOWN
            yield tuple(b0)


def check_submodular(g: UtilityFunction) -> CheckReport:
    """Exhaustive diminishing-gains check over all extension pairs.

    Witness is (b, b_extended, i, state) with the gain at the extension
    strictly larger than at the base.
    """
    for b2 in enumerate_partials(g.alphabet, g.n):
        frees = free_items(b2)
        for b1 in _strict_ancestors(b2):
            for i in frees:
                for state in g.alphabet:
                    if marginal(g, b1, i, state) < marginal(g, b2, i, state):
                        return CheckReport(False, (b1, b2, i, state))
    return CheckReport(True)


def expected_marginal(g: UtilityFunction, sample: WeightedSample, b, i: int):
    """Exact conditional expected gain of querying item i from b.

    The expectation is over the state of item i under the sample
    distribution conditioned on b.  Undefined (None) when no sample row is
    consistent with b.
    """
    wb = sample.weight_of(b)
    if wb == 0:
        return None
    num = 0
    for state in g.alphabet:
        b_ext = extend(b, i, state)
        num += sample.weight_of(b_ext) * (g.value(b_ext) - g.value(b))
    return Fraction(num, wb)


def check_adaptive_submodular(g: UtilityFunction, sample: WeightedSample) -> CheckReport:
    """Exhaustive adaptive-submodularity check w.r.t. the sample distribution.

    Pairs where either conditional expectation is undefined (zero consistent
    weight) are skipped.  Witness is (b, b_extended, i) on failure.
    """
    for b2 in enumerate_partials(g.alphabet, g.n):
        if sample.weight_of(b2) == 0:
            continue
        frees = free_items(b2)
        for b1 in _strict_ancestors(b2):
            if sample.weight_of(b1) == 0:
                continue
            for i in frees:
                e1 = expected_marginal(g, sample, b1, i)
                e2 = expected_marginal(g, sample, b2, i)
                if e1 < e2:
                    return CheckReport(False, (b1, b2, i))
    return CheckReport(True)


#: Progress floor used by the backbone analysis: min(ratio, 1/9).
PROGRESS_FLOOR = Fraction(1, 9)


@dataclass(frozen=True)
class ProgressReport:
    """Minimum fraction of the remaining distance-to-goal gained by any
    non-worst state observation, with the attaining witness."""

    ratio: Fraction
    witness: tuple  # (b, i, state)
    restricted: bool = False  # True when enumeration was limited to the sample

    @property
    def floor(self) -> Fraction:
        """min(ratio, 1/9): the per-step progress constant of the analysis."""
        return min(self.ratio, PROGRESS_FLOOR)


def min_progress_ratio(g: UtilityFunction, sample: WeightedSample | None = None
                       ) -> ProgressReport:
    """Minimize gain/(goal - value) over b, free i, and non-worst states.

    With `sample` given, enumeration is restricted to partial realizations
    consistent with at least one sample row; the result is then only a
    lower-scope estimate and is flagged `restricted`.
    """
    best = None
    witness = None
    for b in enumerate_partials(g.alphabet, g.n):
        gb = g.value(b)
        if gb >= g.goal:
            continue
        if sample is not None and sample.weight_of(b) == 0:
            continue
        remaining = g.goal - gb
        for i in free_items(b):
            worst = worst_state(g, b, i)
            for state in g.alphabet:
                if state == worst:
                    continue
                ratio = Fraction(marginal(g, b, i, state), remaining)
                if best is None or ratio < best:
                    best, witness = ratio, (b, i, state)
    if best is None:
        raise PreconditionError("no valid (b, i, state) triple to minimize over")
    return ProgressReport(best, witness, restricted=sample is not None)
