"""Exhaustive brute-force solvers used as ground truth in tests and audits.

These are deliberately simple and exponential; hard budgets make any attempt
to run them beyond desk scale an explicit refusal instead of a silent stall.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .core import (
    UNKNOWN,
    Leaf,
    Node,
    PreconditionError,
    ScenarioInstance,
    ScencoverError,
    empty_partial,
    extend,
    free_items,
)
from .minsum import full_cost_schedule, make_job, schedule_cost


class OracleBudgetError(ScencoverError):
    """The instance exceeds the oracle's enumeration budget."""


@dataclass(frozen=True)
class OracleLimits:
    max_items: int = 6
    max_states: int = 3
    max_rows: int = 8


DEFAULT_LIMITS = OracleLimits()


def fixed_order_completion(g, b):
    """Cheapest-to-describe valid subtree: query free items in index order
    until the goal is reached.  Used to finish zero-probability branches."""
    if g.value(b) == g.goal:
        return Leaf()
    frees = free_items(b)
    if not frees:
        raise PreconditionError("no free items left but goal not reached")
    i = frees[0]
    return Node(
        i, {s: fixed_order_completion(g, extend(b, i, s)) for s in g.alphabet}
    )


def optimal_tree(instance: ScenarioInstance, limits: OracleLimits = DEFAULT_LIMITS,
                 use_memo: bool = True):
    """Exact minimum expected cost over all valid strategies.

    Recursion over partial realizations: at each reachable information state
    pick the item minimizing immediate cost plus the weighted cost of the
    consistent subtrees.  Branches no sample row reaches contribute nothing
    to the expectation and are completed in fixed item order.  Returns
    (tree, expected cost).
    """
    if (instance.n > limits.max_items or len(instance.alphabet) > limits.max_states
            or instance.sample.size > limits.max_rows):
        raise OracleBudgetError(
            "instance (n=%d, states=%d, rows=%d) exceeds oracle limits %r"
            % (instance.n, len(instance.alphabet), instance.sample.size, limits)
        )
    if not instance.sample.rows:
        raise PreconditionError("optimal tree undefined for an empty sample")
    g = instance.utility
    costs = instance.costs
    memo: dict = {}

    def best_cost(b) -> Fraction:
        if g.value(b) == g.goal:
            return Fraction(0)
        wb = instance.sample.weight_of(b)
        if wb == 0:
            return Fraction(0)
        if use_memo and b in memo:
            return memo[b]
        best = None
        for i in free_items(b):
            total = costs[i]
            for s in instance.alphabet:
                child = extend(b, i, s)
                wc = instance.sample.weight_of(child)
                if wc:
                    total += Fraction(wc, wb) * best_cost(child)
            if best is None or total < best:
                best = total
        if best is None:
            raise PreconditionError("goal unreachable: no free items at %r" % (b,))
        if use_memo:
            memo[b] = best
        return best

    def build(b):
        if g.value(b) == g.goal:
            return Leaf()
        if instance.sample.weight_of(b) == 0:
            return fixed_order_completion(g, b)
        wb = instance.sample.weight_of(b)
        best = None
        best_item = None
        for i in free_items(b):
            total = costs[i]
            for s in instance.alphabet:
                child = extend(b, i, s)
                wc = instance.sample.weight_of(child)
                if wc:
                    total += Fraction(wc, wb) * best_cost(child)
            if best is None or total < best:
                best, best_item = total, i
        return Node(
            best_item,
            {s: build(extend(b, best_item, s)) for s in instance.alphabet},
        )

    root = empty_partial(instance.n)
    return build(root), best_cost(root)


def optimal_budgeted(items, f, costs, budget):
    """Exhaustive max of f over subsets of items with total cost <= budget."""
    items = sorted(items)
    if len(items) > 20:
        raise OracleBudgetError("too many items for exhaustive subsets")
    budget = Fraction(budget)
    best_set = frozenset()
    best_value = f(frozenset())
    for r in range(1, len(items) + 1):
        for combo in itertools.combinations(items, r):
            if sum((costs[i] for i in combo), Fraction(0)) > budget:
                continue
            value = f(frozenset(combo))
            if value > best_value:
                best_set, best_value = frozenset(combo), value
    return best_set, best_value


def optimal_schedule(items, f, costs):
    """Minimum schedule cost over all orderings of full-cost pairs."""
    items = sorted(items)
    if len(items) > 8:
        raise OracleBudgetError("too many items for permutation enumeration")
    if f(frozenset()) == f(frozenset(items)):
        return (), Fraction(0)
    job = make_job(f, costs, items)
    best = None
    best_schedule = None
    for perm in itertools.permutations(items):
        schedule = full_cost_schedule(perm, costs)
        cost = schedule_cost(job, schedule)
        if best is None or cost < best:
            best, best_schedule = cost, schedule
    return best_schedule, best
