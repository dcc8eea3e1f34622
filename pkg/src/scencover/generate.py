"""Seeded random generation of instances and set functions for tests,
benchmarks, and the CLI generator.  Same seed, same output, always."""

from __future__ import annotations

import random
from fractions import Fraction

from .core import (
    CostVector,
    PreconditionError,
    ScenarioInstance,
    StateAlphabet,
    WeightedSample,
)
from .utility import (
    CoverageUtility,
    KOfNUtility,
    or_combine,
    scenario_count_utility,
    scenario_weight_utility,
)

#: Cost pool: small exact rationals including non-integers.
COST_POOL = (
    Fraction(1),
    Fraction(2),
    Fraction(3),
    Fraction(1, 2),
    Fraction(3, 2),
    Fraction(5, 2),
)


def default_alphabet(num_states: int) -> StateAlphabet:
    return StateAlphabet(tuple(str(k) for k in range(num_states)))


def random_costs(rng: random.Random, n: int, pool=COST_POOL) -> CostVector:
    return CostVector(tuple(rng.choice(pool) for _ in range(n)))


def random_sample(rng: random.Random, alphabet: StateAlphabet, n: int,
                  size: int, max_weight: int = 5) -> WeightedSample:
    space = len(alphabet) ** n
    if size < 1:
        raise PreconditionError("sample size must be at least 1")
    size = min(size, space)
    rows = set()
    while len(rows) < size:
        rows.add(tuple(rng.choice(alphabet.states) for _ in range(n)))
    return WeightedSample(
        tuple((a, rng.randint(1, max_weight)) for a in sorted(rows))
    )


def random_coverage_utility(rng: random.Random, n: int, alphabet: StateAlphabet,
                            universe_size: int = 4, extra_density: float = 0.3):
    """Coverage utility valid on every realization: each universe element
    gets an anchor item covering it in all states, plus random extra covers.

    Returns (utility, descriptor) where the descriptor is the serializable
    1-based form used by the instance file format.
    """
    covers = {(i, s): set() for i in range(n) for s in alphabet}
    for u in range(universe_size):
        anchor = rng.randrange(n)
        for s in alphabet:
            covers[(anchor, s)].add(u)
    for i in range(n):
        for s in alphabet:
            for u in range(universe_size):
                if rng.random() < extra_density:
                    covers[(i, s)].add(u)
    utility = CoverageUtility(covers, universe_size, n, alphabet)
    descriptor = {
        "kind": "coverage",
        "universe_size": universe_size,
        "covers": {
            str(i + 1): {s: sorted(covers[(i, s)]) for s in alphabet}
            for i in range(n)
        },
    }
    return utility, descriptor


def random_instance(rng: random.Random, n: int = 4, num_states: int = 2,
                    sample_size: int = 4, family: str = "coverage",
                    universe_size: int = 4, cost_pool=COST_POOL):
    """A full random instance of the requested utility family.

    Returns (instance, descriptor).  Families "g_S" and "g_W" wrap a random
    coverage utility with the respective elimination combination over the
    generated sample.
    """
    alphabet = default_alphabet(num_states)
    sample = random_sample(rng, alphabet, n, sample_size)
    costs = random_costs(rng, n, cost_pool)

    if family == "coverage":
        utility, descriptor = random_coverage_utility(
            rng, n, alphabet, universe_size
        )
    elif family == "k_of_n":
        if num_states != 2:
            raise PreconditionError("k_of_n requires the binary alphabet")
        k = rng.randint(1, n)
        utility, descriptor = KOfNUtility(n, k), {"kind": "k_of_n", "k": k}
    elif family == "or":
        u1, d1 = random_coverage_utility(rng, n, alphabet, universe_size)
        u2, d2 = random_coverage_utility(rng, n, alphabet, universe_size)
        utility = or_combine(u1, u2)
        descriptor = {"kind": "or", "left": d1, "right": d2}
    elif family in ("g_S", "g_W"):
        inner, inner_desc = random_coverage_utility(rng, n, alphabet, universe_size)
        wrap = scenario_count_utility if family == "g_S" else scenario_weight_utility
        utility = wrap(inner, sample)
        descriptor = {"kind": family, "inner": inner_desc}
    else:
        raise PreconditionError("unknown utility family %r" % family)

    return ScenarioInstance(utility, sample, costs, alphabet), descriptor


class BitmaskCoverage:
    """Weighted-coverage set function on bitmasks; f(empty) = 0, monotone
    and submodular.  Fast enough for exhaustive budgeted enumeration."""

    def __init__(self, masks: list[int], element_weights: list[int]):
        self.masks = list(masks)
        self.weights = list(element_weights)
        self._cache: dict = {}

    def __call__(self, r: frozenset) -> int:
        v = self._cache.get(r)
        if v is None:
            union = 0
            for i in r:
                union |= self.masks[i]
            v = sum(w for u, w in enumerate(self.weights) if union >> u & 1)
            self._cache[r] = v
        return v


def random_set_function(rng: random.Random, n: int, kind: str = "coverage",
                        universe_size: int = 8):
    """A random monotone submodular set function with f(empty) = 0 and
    f positive on the full ground set."""
    if kind == "modular":
        values = [rng.randint(1, 9) for _ in range(n)]
        masks = [1 << i for i in range(n)]
        return BitmaskCoverage(masks, values + [0] * max(0, n - len(values)))
    if kind != "coverage":
        raise PreconditionError("unknown set function kind %r" % kind)
    weights = [rng.randint(1, 5) for _ in range(universe_size)]
    masks = []
    for _ in range(n):
        mask = 0
        while mask == 0:
            mask = rng.getrandbits(universe_size)
        masks.append(mask)
    # make sure the union covers everything so f(N) is the full weight
    masks[rng.randrange(n)] |= (1 << universe_size) - 1
    return BitmaskCoverage(masks, weights)
