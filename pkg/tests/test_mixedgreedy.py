"""The two-stage backbone tree builder, its online form, and the audits."""

from fractions import Fraction

import pytest

from scencover.core import (
    UNKNOWN,
    CostVector,
    Leaf,
    Node,
    PreconditionError,
    ScenarioInstance,
    WeightedSample,
    empty_partial,
    enumerate_realizations,
    expected_cost,
    follow,
    validate_tree,
)
from scencover.mixedgreedy import (
    MixedGreedyStrategy,
    SuffixedStrategy,
    backbone_audit,
    execute_online,
    invocation_plan,
    log_upper_bound,
    materialize,
    mixed_greedy,
    ratio_ceiling,
    scenario_mixed_greedy,
    scenario_mixed_greedy_tree,
    induced_instance,
    weight_removal_function,
    worst_case_realization,
)
from scencover.oracle import optimal_tree
from scencover.utility import BINARY, KOfNUtility, TableUtility, worst_state
from conftest import instance_stream

U = UNKNOWN


def unit_costs(n):
    return CostVector((Fraction(1),) * n)


def test_worst_case_realization_constant():
    import itertools

    table = {b: 0 for b in itertools.product(("0", "1", U), repeat=2)}
    for a in itertools.product(("0", "1"), repeat=2):
        table[a] = 1
    g = TableUtility(table, 1, 2, BINARY)
    sigma = worst_case_realization(g, (U, U))
    assert sigma == {0: "0", 1: "0"}  # ties break on alphabet order


def test_worst_case_realization_k_of_n():
    g = KOfNUtility(3, 2)
    sigma = worst_case_realization(g, (U, U, U))
    for i in range(3):
        assert sigma[i] == worst_state(g, (U, U, U), i)


def test_worst_case_realization_single_free():
    g = KOfNUtility(2, 1)
    sigma = worst_case_realization(g, ("1", U))
    assert set(sigma) == {1}


def _two_item_instance():
    g = KOfNUtility(2, 1)
    sample = WeightedSample(((("0", "0"), 1), (("0", "1"), 2), (("1", "1"), 1)))
    return ScenarioInstance(g, sample, unit_costs(2), BINARY)


def test_weight_removal_function():
    inst = _two_item_instance()
    sigma = {0: "0", 1: "1"}
    h = weight_removal_function(inst, (U, U), sigma)
    assert h(frozenset()) == 0
    # rows deviating from sigma on {0,1}: (0,0) and (1,1) -> weight 2
    assert h(frozenset({0, 1})) == 2
    # sigma matching no row at all removes everything
    h_off = weight_removal_function(inst, (U, U), {0: "1", 1: "0"})
    assert h_off(frozenset({0, 1})) == inst.sample.total_weight
    # single-row sample lying exactly on sigma: nothing ever deviates
    solo = ScenarioInstance(
        KOfNUtility(2, 1), WeightedSample(((("0", "0"), 5),)),
        unit_costs(2), BINARY,
    )
    h_zero = weight_removal_function(solo, (U, U), {0: "0", 1: "0"})
    for r in (frozenset(), frozenset({0}), frozenset({0, 1})):
        assert h_zero(r) == 0


def test_mixed_greedy_goal_at_entry():
    inst = _two_item_instance()
    assert mixed_greedy(inst, b=("1", U)) == Leaf()


def test_mixed_greedy_single_item():
    g = KOfNUtility(1, 1)
    inst = ScenarioInstance(
        g, WeightedSample(((("1",), 1),)), unit_costs(1), BINARY
    )
    tree = mixed_greedy(inst)
    assert isinstance(tree, Node) and tree.item == 0
    assert all(isinstance(c, Leaf) for c in tree.children.values())


def test_invocation_backbone_items_within_budget():
    for _, inst, _ in instance_stream(25, base_seed=10, max_n=4, max_rows=6):
        traces: list = []
        mixed_greedy(inst, traces=traces)
        for trace in traces:
            for i in trace.plan:
                assert inst.costs[i] <= trace.budget
            if trace.stage1_exit == "budget":
                spent = sum((inst.costs[i] for i in trace.stage1_items),
                            Fraction(0))
                assert spent >= trace.budget


def test_invocation_plan_requires_unmet_goal():
    inst = _two_item_instance()
    with pytest.raises(PreconditionError):
        invocation_plan(inst, ("1", "0"))


def test_tree_has_no_repeated_items():
    for _, inst, _ in instance_stream(15, base_seed=60, max_n=4, max_rows=6):
        tree = mixed_greedy(inst)
        for a in enumerate_realizations(inst.alphabet, inst.n):
            follow(tree, a, inst.costs)  # raises on repeats


def test_online_matches_materialized():
    for _, inst, _ in instance_stream(20, base_seed=120, max_n=4, max_rows=6):
        tree = mixed_greedy(inst)
        policy = MixedGreedyStrategy(inst)
        for a in enumerate_realizations(inst.alphabet, inst.n):
            cost_t, term_t = follow(tree, a, inst.costs)
            items, cost_p, term_p = execute_online(
                policy, lambda i: a[i], inst.costs
            )
            assert cost_t == cost_p
            assert term_t == term_p


def test_induced_instance_identity_and_restriction():
    inst = _two_item_instance()
    same = induced_instance(inst, (U, U))
    for b in ((U, U), ("0", U), ("0", "1")):
        assert same.utility.value(b) == inst.utility.value(b)
    sub = induced_instance(inst, (U, "1"))
    assert sub.n == 1
    assert sub.sample.rows == ((("0",), 2), (("1",), 1))
    assert sub.utility.value(("0",)) == inst.utility.value(("0", "1"))
    empty = induced_instance(inst, ("0", "1"))
    assert empty.n == 0


def test_scenario_mixed_greedy_tree_valid():
    for _, inst, _ in instance_stream(15, base_seed=200, max_n=4, max_rows=6):
        tree = scenario_mixed_greedy_tree(inst)
        assert validate_tree(tree, inst).status == "ok"


def test_scenario_suffix_uses_index_order():
    # off-sample realizations may finish via the ascending-index suffix;
    # the policy remains valid everywhere
    for _, inst, _ in instance_stream(10, base_seed=260, max_n=3, max_rows=2):
        strategy = scenario_mixed_greedy(inst)
        tree = materialize(strategy, inst.alphabet, inst.n)
        assert validate_tree(tree, inst).status == "ok"


def test_backbone_audit_zero_mass_entry():
    # only item 2 matters; the entry partial realization is consistent with
    # no sample row, so every reach probability (and the backbone cost) is 0
    from scencover.utility import CoverageUtility

    covers = {(i, s): frozenset() for i in range(3) for s in BINARY}
    covers[(2, "0")] = covers[(2, "1")] = frozenset({0})
    g = CoverageUtility(covers, 1, 3, BINARY)
    inst = ScenarioInstance(
        g, WeightedSample(((("0", "0", "0"), 1),)), unit_costs(3), BINARY
    )
    audit = backbone_audit(inst, b=("1", U, U))
    assert audit.status == "ok"
    assert audit.backbone_expected_cost == 0
    assert all(p == 0 for p in audit.reach_probabilities)
    assert audit.optimal_cost == 0


def test_backbone_audit_examples():
    inst = _two_item_instance()
    audit = backbone_audit(inst)
    assert audit.status == "ok"
    assert audit.within_24_optimal
    assert audit.within_3_stage1 in (None, True)
    # single-row sample on the anchor path: every reach probability is 1
    g = KOfNUtility(2, 2)
    solo = ScenarioInstance(
        g, WeightedSample(((("0", "0"), 1),)), unit_costs(2), BINARY
    )
    audit_solo = backbone_audit(solo)
    trace = audit_solo.trace
    sigma_row = tuple(trace.sigma[i] for i in sorted(trace.sigma))
    if sigma_row == ("0", "0"):
        assert all(p == 1 for p in audit_solo.reach_probabilities)
        assert audit_solo.backbone_expected_cost == sum(
            (solo.costs[i] for i in trace.plan), Fraction(0)
        )


def test_mixed_greedy_ratio_on_desk_instance():
    for _, inst, _ in instance_stream(10, base_seed=333, max_n=4, max_rows=4):
        from scencover.utility import min_progress_ratio

        tree = mixed_greedy(inst)
        _, opt = optimal_tree(inst)
        try:
            eta = min_progress_ratio(inst.utility).floor
        except PreconditionError:
            continue
        ceiling = ratio_ceiling(eta, inst.goal)
        if ceiling is not None and opt > 0:
            assert expected_cost(tree, inst) / opt <= ceiling


def test_log_upper_bound():
    import math

    for q in (1, 2, 3, 10, 1000):
        ub = log_upper_bound(q)
        assert float(ub) >= math.log(q)
        assert float(ub) - math.log(q) < 1e-9
    with pytest.raises(PreconditionError):
        log_upper_bound(0)


def test_ratio_ceiling_vacuous_at_zero():
    assert ratio_ceiling(Fraction(0), 5) is None
    assert ratio_ceiling(Fraction(1, 9), 1) >= 1
