"""Shared seeded generators for the test suite.

Everything is derived deterministically from small integer seeds so failures
reproduce exactly.
"""

import random
from fractions import Fraction

from scencover.core import CostVector
from scencover.generate import random_instance, random_set_function

FAMILIES = ("coverage", "k_of_n", "or", "g_S", "g_W")


def seeded_instance(seed, max_n=5, max_states=3, max_rows=8,
                    families=FAMILIES):
    """One deterministic random instance.  Returns (instance, descriptor)."""
    rng = random.Random(seed)
    n = rng.randint(2, max_n)
    family = rng.choice(families)
    states = 2 if family == "k_of_n" else rng.randint(2, max_states)
    sample_size = rng.randint(1, max_rows)
    return random_instance(
        rng,
        n=n,
        num_states=states,
        sample_size=sample_size,
        family=family,
        universe_size=rng.randint(2, 5),
    )


def instance_stream(count, base_seed=0, **kwargs):
    """Deterministic sequence of (seed, instance, descriptor)."""
    for k in range(count):
        seed = base_seed + k
        instance, descriptor = seeded_instance(seed, **kwargs)
        yield seed, instance, descriptor


def seeded_budgeted(seed, max_items=12):
    """One deterministic budgeted problem: (items, f, costs, budget)."""
    rng = random.Random(seed)
    n = rng.randint(2, max_items)
    f = random_set_function(rng, n, universe_size=rng.randint(4, 10))
    costs = CostVector(
        tuple(Fraction(rng.randint(1, 8), rng.choice([1, 2])) for _ in range(n))
    )
    total = sum((costs[i] for i in range(n)), Fraction(0))
    budget = total * Fraction(rng.randint(1, 4), 4)
    return list(range(n)), f, costs, budget
