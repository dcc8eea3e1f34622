"""Budget-constrained greedy maximization of a monotone submodular set
function, and the budget search used by the tree builder.

The greedy routine follows the classic scheme: repeatedly add the item with
the best marginal-gain-to-cost ratio among items individually affordable
within the budget, allow the budget to be overshot by the last pick, then
return whichever of {last item} / {everything but the last item} is better.
Its value is guaranteed to be at least alpha = 1 - e^(-chi) times the
optimum, where chi solves e^chi = 2 - chi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable

from .core import CostVector, PreconditionError

SetFunction = Callable[[frozenset], "int | Fraction"]

#: Residual tolerance for the root of e^chi = 2 - chi.
CHI_TOLERANCE = 1e-12


@dataclass(frozen=True)
class GreedyConstants:
    chi: Fraction
    alpha: Fraction


def solve_chi() -> GreedyConstants:
    """Bisection root of e^x + x - 2 on [0, 1]; alpha = 1 - e^(-chi).

    Both constants are returned as exact binary fractions of the float
    results, so downstream comparisons stay rational and deterministic.
    """
    lo, hi = 0.0, 1.0
    while hi - lo > CHI_TOLERANCE / 4:
        mid = (lo + hi) / 2
        if math.exp(mid) + mid - 2 < 0:
            lo = mid
        else:
            hi = mid
    chi = (lo + hi) / 2
    return GreedyConstants(Fraction(chi), Fraction(1 - math.exp(-chi)))


GREEDY_CONSTANTS = solve_chi()
ALPHA = GREEDY_CONSTANTS.alpha


def wolsey_greedy(items: Iterable[int], f: SetFunction, costs: CostVector,
                  budget: Fraction) -> frozenset:
    """Greedy budgeted maximization with last-step overshoot.

    Picks the best-ratio item among those with cost <= budget until the total
    spent exceeds the budget or candidates run out, then returns the better
    of {last item} and the picked set minus the last item.  Ties break on the
    lowest item index.  Returns the empty set if nothing is affordable.
    """
    budget = Fraction(budget)
    eligible = sorted(i for i in items if costs[i] <= budget)
    if not eligible:
        return frozenset()
    chosen: list[int] = []
    spent = Fraction(0)
    current = frozenset()
    base = f(current)
    while True:
        best = None
        best_gain = None
        for i in eligible:
            gain = f(current | {i}) - base
            # strict > keeps the first (lowest-index) maximizer
            if best is None or gain * costs[best] > best_gain * costs[i]:
                best, best_gain = i, gain
        chosen.append(best)
        eligible.remove(best)
        spent += costs[best]
        current = current | {best}
        base = f(current)
        if spent > budget or not eligible:
            break
    last = chosen[-1]
    rest = current - {last}
    if f(frozenset({last})) >= f(rest):
        return frozenset({last})
    return rest


def budget_candidates(items, costs: CostVector, grid_bits: int = 20):
    """Finite candidate budgets: achieved greedy value is piecewise constant
    in the budget, changing only at subset sums of the item costs.

    For more than 20 items the subset-sum set is replaced by a dyadic grid
    over [0, sum of costs], refined to 2^-grid_bits of the total.
    """
    items = list(items)
    total = sum((costs[i] for i in items), Fraction(0))
    if len(items) <= 20:
        sums = {Fraction(0)}
        for i in items:
            sums |= {s + costs[i] for s in sums}
        return sorted(sums)
    step = total / (1 << grid_bits)
    return [k * step for k in range((1 << grid_bits) + 1)]


def find_budget(items: Iterable[int], f: SetFunction, costs: CostVector,
                verify: bool = False) -> Fraction:
    """Smallest candidate budget at which the greedy set reaches an alpha
    fraction of f over all items.

    Binary search assumes the achieved value is monotone in the budget; with
    `verify` set, all smaller candidates are re-checked and the search falls
    back to a linear scan if the assumption fails.
    """
    items = sorted(items)
    full_value = f(frozenset(items))
    if full_value <= 0:
        raise PreconditionError("set function must be positive on all items")
    target_num = ALPHA * full_value

    def feasible(budget):
        return f(wolsey_greedy(items, f, costs, budget)) >= target_num

    candidates = budget_candidates(items, costs)
    if not feasible(candidates[-1]):
        raise PreconditionError("no budget up to the total cost suffices")
    lo, hi = 0, len(candidates) - 1  # invariant: hi is feasible
    while lo < hi:
        mid = (lo + hi) // 2
        if feasible(candidates[mid]):
            hi = mid
        else:
            lo = mid + 1
    if verify:
        for j in range(hi):
            if feasible(candidates[j]):
                # achieved value was not monotone in the budget
                return candidates[j]
    return candidates[hi]


def check_wolsey_bound(items, f: SetFunction, costs: CostVector,
                       budget: Fraction) -> bool:
    """Greedy value >= alpha * exhaustive optimum within the budget."""
    from .oracle import optimal_budgeted

    _, opt_value = optimal_budgeted(items, f, costs, budget)
    greedy_value = f(wolsey_greedy(items, f, costs, budget))
    return greedy_value >= ALPHA * opt_value
