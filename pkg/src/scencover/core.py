"""Shared data model: realizations, weighted samples, costs, decision trees.

All arithmetic is exact: weights are positive integers, costs are positive
`Fraction`s, so every probability and expected cost is an exact rational.
Everything in this module is immutable after construction and all operations
are pure functions of their inputs.

Item indices are 0-based throughout the library; the file format used by the
CLI is 1-based (see `scencover.serialize`).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

#: Marker for an item whose state has not been observed yet.
UNKNOWN = "*"


class ScencoverError(Exception):
    """Base class for errors raised by this library."""


class PreconditionError(ScencoverError):
    """An operation was called with arguments violating its contract."""


class StructureError(ScencoverError):
    """A decision tree or instance is structurally malformed."""


@dataclass(frozen=True)
class StateAlphabet:
    """Ordered set of distinct state symbols.

    The ordering is fixed and used for all deterministic tie-breaking
    (argmin/argmax over states picks the earliest symbol on ties).
    """

    states: tuple[str, ...]

    def __post_init__(self):
        if len(self.states) < 2:
            raise PreconditionError("alphabet needs at least 2 states")
        if len(set(self.states)) != len(self.states):
            raise PreconditionError("alphabet states must be distinct")
        if UNKNOWN in self.states:
            raise PreconditionError("%r is reserved for unknown entries" % UNKNOWN)

    def __len__(self):
        return len(self.states)

    def __iter__(self):
        return iter(self.states)

    def __contains__(self, state):
        return state in self.states

    def index(self, state: str) -> int:
        return self.states.index(state)


def empty_partial(n: int) -> tuple[str, ...]:
    """The partial realization with no observed items."""
    return (UNKNOWN,) * n


def set_items(b: tuple[str, ...]) -> tuple[int, ...]:
    """Indices of observed items of b."""
    return tuple(i for i, s in enumerate(b) if s != UNKNOWN)


def free_items(b: tuple[str, ...]) -> tuple[int, ...]:
    """Indices of unobserved items of b."""
    return tuple(i for i, s in enumerate(b) if s == UNKNOWN)


def is_full(b: tuple[str, ...]) -> bool:
    return UNKNOWN not in b


def extend(b: tuple[str, ...], i: int, state: str) -> tuple[str, ...]:
    """Return b with position i set to `state`.  Position i must be unknown."""
    if not 0 <= i < len(b):
        raise PreconditionError("item index %d out of range for n=%d" % (i, len(b)))
    if b[i] != UNKNOWN:
        raise PreconditionError("position %d is already set to %r" % (i, b[i]))
    return b[:i] + (state,) + b[i + 1 :]


def is_extension(b2: tuple[str, ...], b1: tuple[str, ...]) -> bool:
    """True iff b2 agrees with b1 on every observed position of b1."""
    if len(b2) != len(b1):
        raise PreconditionError("length mismatch: %d vs %d" % (len(b2), len(b1)))
    return all(s1 == UNKNOWN or s1 == s2 for s1, s2 in zip(b1, b2))


def enumerate_realizations(alphabet: StateAlphabet, n: int):
    """All full realizations over the alphabet, in lexicographic order."""
    return itertools.product(alphabet.states, repeat=n)


def enumerate_partials(alphabet: StateAlphabet, n: int):
    """All partial realizations (unknown marker included), lexicographic."""
    return itertools.product(alphabet.states + (UNKNOWN,), repeat=n)


@dataclass(frozen=True)
class WeightedSample:
    """Distinct full realizations with positive integer weights."""

    rows: tuple[tuple[tuple[str, ...], int], ...]

    def __post_init__(self):
        seen = set()
        for a, w in self.rows:
            if UNKNOWN in a:
                raise PreconditionError("sample rows must be full realizations")
            if a in seen:
                raise PreconditionError("duplicate sample row %r" % (a,))
            seen.add(a)
            if not (isinstance(w, int) and w >= 1):
                raise PreconditionError("weights must be positive integers")

    @property
    def size(self) -> int:
        """Number of distinct rows (the sample's m)."""
        return len(self.rows)

    @property
    def total_weight(self) -> int:
        """Sum of all row weights (the sample's W)."""
        return sum(w for _, w in self.rows)

    @property
    def n(self) -> int:
        return len(self.rows[0][0]) if self.rows else 0

    def consistent_rows(self, b):
        """Rows extending b, together with their total weight."""
        if self.rows and len(b) != self.n:
            raise PreconditionError("dimension mismatch")
        rows = tuple((a, w) for a, w in self.rows if is_extension(a, b))
        return rows, sum(w for _, w in rows)

    def weight_of(self, b) -> int:
        """Total weight of rows extending b."""
        return self.consistent_rows(b)[1]

    def scaled(self, factor: int) -> "WeightedSample":
        return WeightedSample(tuple((a, w * factor) for a, w in self.rows))


@dataclass(frozen=True)
class CostVector:
    """Positive exact rational cost per item."""

    costs: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "costs", tuple(Fraction(c) for c in self.costs)
        )
        if any(c <= 0 for c in self.costs):
            raise PreconditionError("all costs must be positive")

    def __getitem__(self, i: int) -> Fraction:
        return self.costs[i]

    def __len__(self):
        return len(self.costs)

    def __iter__(self):
        return iter(self.costs)

    def total(self) -> Fraction:
        return sum(self.costs, Fraction(0))


class Leaf:
    """Terminal node of a decision tree; carries no label."""

    __slots__ = ()

    def __repr__(self):
        return "Leaf()"

    def __eq__(self, other):
        return isinstance(other, Leaf)

    def __hash__(self):
        return hash(Leaf)


class Node:
    """Internal decision-tree node: queries `item`, branches per state."""

    __slots__ = ("item", "children")

    def __init__(self, item: int, children: dict):
        self.item = item
        self.children = dict(children)

    def __repr__(self):
        return "Node(%d, %r)" % (self.item, self.children)

    def __eq__(self, other):
        return (
            isinstance(other, Node)
            and self.item == other.item
            and self.children == other.children
        )


def tree_size(tree) -> int:
    """Total node count (internal nodes and leaves)."""
    if isinstance(tree, Leaf):
        return 1
    return 1 + sum(tree_size(c) for c in tree.children.values())


def follow(tree, a: tuple[str, ...], costs: CostVector):
    """Walk the tree on realization a.

    Returns (path cost, terminal partial realization).  Raises
    StructureError on missing children or repeated items along the path.
    """
    b = empty_partial(len(a))
    total = Fraction(0)
    node = tree
    while isinstance(node, Node):
        i = node.item
        if b[i] != UNKNOWN:
            raise StructureError("item %d repeats on the path" % i)
        state = a[i]
        if state not in node.children:
            raise StructureError("node for item %d lacks a %r-child" % (i, state))
        total += costs[i]
        b = extend(b, i, state)
        node = node.children[state]
    if not isinstance(node, Leaf):
        raise StructureError("malformed tree node %r" % (node,))
    return total, b


@dataclass(frozen=True)
class ValidationReport:
    status: str  # "ok", "violations", or "unchecked"
    violations: tuple[str, ...] = ()
    checked: int = 0

    def __bool__(self):
        return self.status == "ok"


@dataclass(frozen=True)
class ScenarioInstance:
    """A full problem instance: utility with goal, weighted sample, costs."""

    utility: "object"  # UtilityFunction (see scencover.utility)
    sample: WeightedSample
    costs: CostVector
    alphabet: StateAlphabet

    def __post_init__(self):
        n = self.utility.n
        if len(self.costs) != n:
            raise PreconditionError("cost vector length != n")
        if self.sample.rows and self.sample.n != n:
            raise PreconditionError("sample row length != n")
        if self.utility.goal <= 0:
            raise PreconditionError("goal value must be positive")
        if self.utility.alphabet != self.alphabet:
            raise PreconditionError("utility alphabet differs from instance alphabet")
        for a, _ in self.sample.rows:
            if any(s not in self.alphabet for s in a):
                raise PreconditionError("sample row uses undeclared state")
            if self.utility.value(a) != self.utility.goal:
                raise PreconditionError(
                    "utility does not reach its goal on sample row %r" % (a,)
                )

    @property
    def n(self) -> int:
        return self.utility.n

    @property
    def goal(self) -> int:
        return self.utility.goal


def expected_cost(tree, instance: ScenarioInstance) -> Fraction:
    """Expected path cost of the tree under the sample distribution."""
    sample = instance.sample
    if not sample.rows:
        raise PreconditionError("expected cost undefined for an empty sample")
    total = Fraction(0)
    for a, w in sample.rows:
        kappa, _ = follow(tree, a, instance.costs)
        total += w * kappa
    return total / sample.total_weight


def validate_tree(tree, instance: ScenarioInstance, scope: str = "all",
                  enumeration_budget: int = 200_000) -> ValidationReport:
    """Check that every realization reaches a leaf with goal utility.

    scope="all" enumerates the full realization space; scope="sample"
    restricts the check to sample rows.  If the full space exceeds the
    enumeration budget the report status is "unchecked", never a silent pass.
    """
    g = instance.utility
    if scope == "sample":
        space: Iterable = (a for a, _ in instance.sample.rows)
        count = instance.sample.size
    elif scope == "all":
        count = len(instance.alphabet) ** instance.n
        if count > enumeration_budget:
            return ValidationReport("unchecked", ("enumeration budget exceeded",), 0)
        space = enumerate_realizations(instance.alphabet, instance.n)
    else:
        raise PreconditionError("unknown scope %r" % scope)

    violations = []
    checked = 0
    for a in space:
        checked += 1
        try:
            _, terminal = follow(tree, a, instance.costs)
        except StructureError as exc:
            violations.append("realization %r: %s" % (a, exc))
            continue
        if g.value(terminal) != g.goal:
            violations.append(
                "realization %r: terminal %r has utility %d < goal %d"
                % (a, terminal, g.value(terminal), g.goal)
            )
    status = "ok" if not violations else "violations"
    return ValidationReport(status, tuple(violations), checked)
