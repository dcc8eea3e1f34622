"""Expected-gain-per-cost adaptive policy and its scenario wrapper.

At each step the policy queries the item with the best exact conditional
expected utility gain per unit cost under the sample distribution.  The
scenario wrapper first combines the utility with weight elimination, which
makes the combination adaptive submodular with respect to the sample
distribution regardless of the original utility.
"""

from __future__ import annotations

from .core import (
    PreconditionError,
    ScenarioInstance,
    free_items,
)
from .mixedgreedy import Strategy, SuffixedStrategy
from .utility import UtilityFunction, extend, scenario_weight_utility


class AdaptiveGreedyStrategy(Strategy):
    """Stateless greedy policy: maximize conditional expected gain / cost.

    On partial realizations with no consistent sample mass the conditional
    expectation is undefined; the policy then falls through to ascending
    index order until the goal is reached.
    """

    def __init__(self, g: UtilityFunction, sample, costs):
        self.utility = g
        self.sample = sample
        self.costs = costs

    def next_item(self, b):
        g = self.utility
        if g.value(b) == g.goal:
            return None
        frees = free_items(b)
        if not frees:
            raise PreconditionError("goal unreachable: no items left")
        if self.sample.weight_of(b) == 0:
            return frees[0]
        best = None
        best_score = None  # unnormalized: sum over states of weight * gain
        for i in frees:
            score = 0
            for s in g.alphabet:
                b_ext = extend(b, i, s)
                score += self.sample.weight_of(b_ext) * (g.value(b_ext) - g.value(b))
            # strict > keeps the lowest-index maximizer
            if best is None or score * self.costs[best] > best_score * self.costs[i]:
                best, best_score = i, score
        return best


def adaptive_greedy(g: UtilityFunction, sample, costs) -> AdaptiveGreedyStrategy:
    """Greedy policy for the given utility; the approximation guarantee
    needs the utility to be adaptive submodular w.r.t. the sample
    distribution (not enforced; a checker is available)."""
    return AdaptiveGreedyStrategy(g, sample, costs)


def scenario_adaptive_greedy(instance: ScenarioInstance) -> SuffixedStrategy:
    """Greedy policy on the weight-elimination combination, then a fixed
    index-order suffix wherever the original goal is still unmet."""
    combined = scenario_weight_utility(instance.utility, instance.sample)
    base = AdaptiveGreedyStrategy(combined, instance.sample, instance.costs)
    return SuffixedStrategy(base, instance.utility)
