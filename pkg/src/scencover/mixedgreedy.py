"""Recursive two-stage backbone tree builder and its scenario wrapper.

Each invocation anchors a worst-case state per free item, budgets the work
with a greedy budget search, then grows a backbone path in two greedy stages:
first removing sample mass from the backbone as cheaply as possible, then
raising utility along the anchor states.  Subtrees for off-anchor states are
built recursively; a final recursive call continues below the backbone.

Strategies are available both as explicit decision trees and as online
policies that never materialize the tree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .budgeted import find_budget
from .core import (
    UNKNOWN,
    CostVector,
    Leaf,
    Node,
    PreconditionError,
    ScenarioInstance,
    WeightedSample,
    empty_partial,
    extend,
    free_items,
)
from .minsum import full_cost_schedule, make_job, residual_mass_function, schedule_cost
from .oracle import (
    DEFAULT_LIMITS,
    OracleBudgetError,
    OracleLimits,
    fixed_order_completion,
    optimal_tree,
)
from .utility import UtilityFunction, marginal, worst_state


class Strategy:
    """Adaptive policy: observed partial realization -> next item or None."""

    def next_item(self, b):
        raise NotImplementedError


def materialize(strategy: Strategy, alphabet, n: int):
    """Expand a policy into an explicit decision tree."""

    def build(b):
        i = strategy.next_item(b)
        if i is None:
            return Leaf()
        return Node(i, {s: build(extend(b, i, s)) for s in alphabet})

    return build(empty_partial(n))


def execute_online(strategy: Strategy, reveal, costs: CostVector):
    """Walk a policy against a state oracle without building the tree.

    `reveal(item)` returns the item's state.  Returns (items queried in
    order, total cost, terminal partial realization).
    """
    b = empty_partial(len(costs))
    chosen = []
    total = Fraction(0)
    while True:
        i = strategy.next_item(b)
        if i is None:
            return tuple(chosen), total, b
        chosen.append(i)
        total += costs[i]
        b = extend(b, i, reveal(i))


def worst_case_realization(g: UtilityFunction, b) -> dict:
    """Anchor state (minimum gain, alphabet order on ties) per free item."""
    return {i: worst_state(g, b, i) for i in free_items(b)}


def weight_removal_function(instance: ScenarioInstance, b, sigma: dict):
    """Stage-1 objective: weight of consistent rows that deviate from the
    anchor realization on at least one item of the argument set."""
    rows, _ = instance.sample.consistent_rows(b)

    def h(r: frozenset) -> int:
        return sum(w for a, w in rows if any(a[i] != sigma[i] for i in r))

    return h


def _memoized(fn):
    cache: dict = {}

    def wrapped(r: frozenset):
        v = cache.get(r)
        if v is None:
            v = fn(r)
            cache[r] = v
        return v

    return wrapped


@dataclass(frozen=True)
class InvocationTrace:
    """Record of the decisions of one invocation of the recursive builder."""

    entry: tuple
    sigma: dict
    budget: Fraction
    stage1_items: tuple
    stage2_items: tuple
    stage1_exit: str  # "budget", "goal", "exhausted", or "skipped"
    stage2_exit: str  # "budget", "goal", "exhausted", "empty", or "skipped"
    final: tuple
    entry_value: int
    final_value: int

    @property
    def plan(self):
        return self.stage1_items + self.stage2_items


def invocation_plan(instance: ScenarioInstance, b) -> InvocationTrace:
    """Compute the full backbone of one invocation.

    The backbone of an invocation is a pure function of its entry partial
    realization: the anchor realization, budget, and both greedy stages do
    not depend on observed states.
    """
    g = instance.utility
    costs = instance.costs
    gb = g.value(b)
    if gb >= g.goal:
        raise PreconditionError("goal already reached at %r" % (b,))
    frees = free_items(b)
    if not frees:
        raise PreconditionError(
            "no free items at %r but utility %d < goal %d" % (b, gb, g.goal)
        )
    sigma = worst_case_realization(g, b)

    def anchored_gain(u: frozenset) -> int:
        cur = b
        for i in u:
            cur = extend(cur, i, sigma[i])
        return g.value(cur) - gb

    budget = find_budget(frees, _memoized(anchored_gain), costs)
    eligible = sorted(i for i in frees if costs[i] <= budget)

    cur = b
    stage1: list[int] = []
    rows_b, wb = instance.sample.consistent_rows(b)
    if wb == 0:
        # no consistent mass: removing weight is pointless, go straight to
        # the utility stage
        stage1_exit = "skipped"
    else:
        h = _memoized(weight_removal_function(instance, b, sigma))
        chosen: frozenset = frozenset()
        spent = Fraction(0)
        while True:
            best = None
            best_gain = None
            for i in eligible:
                gain = h(chosen | {i}) - h(chosen)
                if best is None or gain * costs[best] > best_gain * costs[i]:
                    best, best_gain = i, gain
            stage1.append(best)
            eligible.remove(best)
            chosen = chosen | {best}
            spent += costs[best]
            cur = extend(cur, best, sigma[best])
            if spent >= budget:
                stage1_exit = "budget"
                break
            if g.value(cur) == g.goal:
                stage1_exit = "goal"
                break
            if not eligible:
                stage1_exit = "exhausted"
                break

    stage2: list[int] = []
    if stage1_exit == "goal":
        stage2_exit = "skipped"
    elif not eligible:
        stage2_exit = "empty"
    else:
        spent2 = Fraction(0)
        while True:
            best = None
            best_gain = None
            for i in eligible:
                gain = marginal(g, cur, i, sigma[i])
                if best is None or gain * costs[best] > best_gain * costs[i]:
                    best, best_gain = i, gain
            stage2.append(best)
            eligible.remove(best)
            spent2 += costs[best]
            cur = extend(cur, best, sigma[best])
            if spent2 >= budget:
                stage2_exit = "budget"
                break
            if g.value(cur) == g.goal:
                stage2_exit = "goal"
                break
            if not eligible:
                stage2_exit = "exhausted"
                break

    return InvocationTrace(
        entry=b,
        sigma=sigma,
        budget=budget,
        stage1_items=tuple(stage1),
        stage2_items=tuple(stage2),
        stage1_exit=stage1_exit,
        stage2_exit=stage2_exit,
        final=cur,
        entry_value=gb,
        final_value=g.value(cur),
    )


def mixed_greedy(instance: ScenarioInstance, b=None, traces: list | None = None):
    """Build the full decision tree for the instance (explicit form).

    `traces`, if given, collects the InvocationTrace of every invocation in
    construction order.  The returned tree reaches the goal on every full
    realization, not only on sample rows.
    """
    g = instance.utility
    if b is None:
        b = empty_partial(instance.n)
    if g.value(b) == g.goal:
        return Leaf()
    trace = invocation_plan(instance, b)
    if traces is not None:
        traces.append(trace)

    chain = []  # (node, anchor state) per backbone node
    cur = b
    for i in trace.plan:
        s_i = trace.sigma[i]
        children = {
            s: mixed_greedy(instance, extend(cur, i, s), traces)
            for s in instance.alphabet
            if s != s_i
        }
        node = Node(i, children)
        chain.append((node, s_i))
        cur = extend(cur, i, s_i)
    tail = mixed_greedy(instance, cur, traces)
    for (node, s_i), nxt in zip(chain, [c for c, _ in chain[1:]] + [tail]):
        node.children[s_i] = nxt
    return chain[0][0]


class MixedGreedyStrategy(Strategy):
    """Online form of the tree builder: replays invocation plans lazily,
    descending into a fresh invocation whenever an observed state leaves
    the current backbone."""

    def __init__(self, instance: ScenarioInstance):
        self.instance = instance
        self._plans: dict = {}

    def _plan(self, frame) -> InvocationTrace:
        trace = self._plans.get(frame)
        if trace is None:
            trace = invocation_plan(self.instance, frame)
            self._plans[frame] = trace
        return trace

    def next_item(self, b):
        g = self.instance.utility
        frame = empty_partial(self.instance.n)
        while True:
            if g.value(frame) == g.goal:
                return None
            trace = self._plan(frame)
            cur = frame
            descended = False
            for i in trace.plan:
                s_i = trace.sigma[i]
                if b[i] == UNKNOWN:
                    return i
                if b[i] == s_i:
                    cur = extend(cur, i, s_i)
                else:
                    frame = extend(cur, i, b[i])
                    descended = True
                    break
            if not descended:
                frame = cur


class SuffixedStrategy(Strategy):
    """Run a base strategy, then query remaining items in ascending index
    order until the wrapped utility reaches its goal."""

    def __init__(self, base: Strategy, utility: UtilityFunction):
        self.base = base
        self.utility = utility

    def next_item(self, b):
        i = self.base.next_item(b)
        if i is not None:
            return i
        if self.utility.value(b) < self.utility.goal:
            frees = free_items(b)
            if not frees:
                raise PreconditionError("goal unreachable: no items left")
            return frees[0]
        return None


def combined_count_instance(instance: ScenarioInstance) -> ScenarioInstance:
    """Same sample and costs, utility OR-combined with row-count elimination."""
    from .utility import scenario_count_utility

    return ScenarioInstance(
        scenario_count_utility(instance.utility, instance.sample),
        instance.sample,
        instance.costs,
        instance.alphabet,
    )


def scenario_mixed_greedy(instance: ScenarioInstance) -> SuffixedStrategy:
    """Backbone builder on the count-elimination combination, then a fixed
    index-order suffix on paths where the original goal is still unmet."""
    combined = combined_count_instance(instance)
    return SuffixedStrategy(MixedGreedyStrategy(combined), instance.utility)


def scenario_mixed_greedy_tree(instance: ScenarioInstance, traces=None):
    """Explicit-tree form of the scenario wrapper."""
    combined = combined_count_instance(instance)
    tree = mixed_greedy(combined, traces=traces)
    return _complete_leaves(tree, instance.utility, empty_partial(instance.n))


def _complete_leaves(tree, g: UtilityFunction, b):
    if isinstance(tree, Leaf):
        if g.value(b) < g.goal:
            return fixed_order_completion(g, b)
        return tree
    return Node(
        tree.item,
        {
            s: _complete_leaves(child, g, extend(b, tree.item, s))
            for s, child in tree.children.items()
        },
    )


class InducedUtility(UtilityFunction):
    """The original utility read through a fixed partial realization: free
    items are renumbered 0..n'-1, fixed items keep their observed states."""

    def __init__(self, g: UtilityFunction, b):
        self.base_utility = g
        self.fixed = b
        self.item_map = free_items(b)  # new index -> original index
        super().__init__(len(self.item_map), g.goal, g.alphabet)

    def _evaluate(self, d):
        merged = list(self.fixed)
        for j, s in enumerate(d):
            if s != UNKNOWN:
                merged[self.item_map[j]] = s
        return self.base_utility.value(tuple(merged))


def induced_instance(instance: ScenarioInstance, b) -> ScenarioInstance:
    """Sub-instance over the free items of b: consistent rows restricted and
    reweighted as-is, costs restricted, goal unchanged."""
    frees = free_items(b)
    rows, _ = instance.sample.consistent_rows(b)
    restricted = tuple(
        (tuple(a[i] for i in frees), w) for a, w in rows
    )
    return ScenarioInstance(
        InducedUtility(instance.utility, b),
        WeightedSample(restricted),
        CostVector(tuple(instance.costs[i] for i in frees)),
        instance.alphabet,
    )


@dataclass(frozen=True)
class BackboneAudit:
    """Replay of one invocation with its analysis quantities and checks."""

    trace: InvocationTrace
    reach_probabilities: tuple
    backbone_expected_cost: Fraction  # probability-weighted backbone cost
    stage1_cost: Fraction | None
    full_backbone_cost: Fraction | None
    optimal_cost: Fraction | None  # induced-instance optimum, None if skipped
    status: str  # "ok" or "skipped"

    @property
    def within_24_optimal(self):
        if self.status != "ok":
            return None
        return self.backbone_expected_cost <= 24 * self.optimal_cost

    @property
    def within_3_stage1(self):
        if self.stage1_cost is None:
            return None
        return self.full_backbone_cost <= 3 * self.stage1_cost


def stage_progress_holds(trace: InvocationTrace, goal: int) -> bool:
    """Final utility gained at least one ninth of the remaining distance."""
    remaining = goal - trace.entry_value
    return 9 * (trace.final_value - trace.entry_value) >= remaining


def backbone_audit(instance: ScenarioInstance, b=None,
                   limits: OracleLimits = DEFAULT_LIMITS) -> BackboneAudit:
    """Audit one invocation: reach probabilities, backbone cost, schedule
    costs, and the comparison against the induced-instance optimum."""
    if b is None:
        b = empty_partial(instance.n)
    trace = invocation_plan(instance, b)
    costs = instance.costs
    wb = instance.sample.weight_of(b)

    if wb == 0:
        probs = tuple(Fraction(0) for _ in trace.plan)
        return BackboneAudit(
            trace, probs, Fraction(0), None, None, Fraction(0), "ok"
        )

    probs = []
    cur = b
    c_y = Fraction(0)
    for i in trace.plan:
        p = Fraction(instance.sample.weight_of(cur), wb)
        probs.append(p)
        c_y += p * costs[i]
        cur = extend(cur, i, trace.sigma[i])

    h_p = residual_mass_function(instance, b, trace.sigma)
    job = make_job(_memoized(h_p), costs, scale=Fraction(1))
    stage1_sched = full_cost_schedule(trace.stage1_items, costs)
    backbone_sched = full_cost_schedule(trace.plan, costs)
    stage1_cost = schedule_cost(job, stage1_sched)
    full_cost = schedule_cost(job, backbone_sched)
    assert full_cost == c_y, "backbone cost must equal its schedule cost"

    try:
        _, opt = optimal_tree(induced_instance(instance, b), limits)
        status = "ok"
    except OracleBudgetError:
        opt = None
        status = "skipped"
    return BackboneAudit(
        trace, tuple(probs), c_y, stage1_cost, full_cost, opt, status
    )


def log_upper_bound(q: int) -> Fraction:
    """A rational strictly-not-below upper bound on the natural log of q."""
    if q < 1:
        raise PreconditionError("log bound needs q >= 1")
    return Fraction(math.nextafter(math.log(q), math.inf))


def ratio_ceiling(eta: Fraction, goal: int):
    """Guaranteed bound on expected-cost/optimal for the backbone builder:
    1 + 24 * ln(goal) / eta.  None when eta is 0 (the guarantee is vacuous).
    """
    if eta <= 0:
        return None
    return 1 + 24 * log_upper_bound(goal) / Fraction(eta)
