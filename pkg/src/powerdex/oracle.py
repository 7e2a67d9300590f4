"""Brute-force reference implementations by explicit enumeration.

These are the ground truth the fast reductions are tested against.  They
only ever call ``Model.evaluate`` on full instances, never the model's
expected-value engine, so agreement between the two is a real check.
Shipped in the library (not test-only) so external index implementations
can be validated via the CLI.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .core import (
    Coalition,
    Instance,
    PowerdexError,
    ProductDistribution,
    check_shared_space,
    subsets,
)
from .indices import BernoulliWeights, SimpleWeights
from .interaction import BernoulliInteractionWeights, InteractionWeights
from .models import Model


class BudgetExceededError(PowerdexError):
    """The instance is too large for exhaustive enumeration."""


@dataclass(frozen=True)
class OracleBudget:
    """Enumeration limits, enforced before any work starts."""

    max_features: int = 12
    max_outcomes: int = 1 << 20

    def check(self, model: Model) -> None:
        space = model.space
        if space.n > self.max_features:
            raise BudgetExceededError(
                f"{space.n} features exceed the oracle budget of {self.max_features}"
            )
        size = space.outcome_count()
        if size > self.max_outcomes:
            raise BudgetExceededError(
                f"{size} outcomes exceed the oracle budget of {self.max_outcomes}"
            )


DEFAULT_BUDGET = OracleBudget()

ConditionalTable = dict[int, Fraction]


def brute_expectation(
    model: Model, dist: ProductDistribution, budget: OracleBudget = DEFAULT_BUDGET
) -> Fraction:
    """E[F] by summing F(omega) * P(Y = omega) over every outcome."""
    budget.check(model)
    space = check_shared_space(model, dist)
    total = Fraction(0)
    for omega in space.outcomes():
        weight = Fraction(1)
        for i, v in enumerate(omega):
            weight *= dist.prob(i, v)
        if weight:
            total += weight * model.evaluate(Instance(space, omega))
    return total


def conditional_table(
    model: Model,
    dist: ProductDistribution,
    e: Instance,
    budget: OracleBudget = DEFAULT_BUDGET,
) -> ConditionalTable:
    """All 2^n conditional expectations E[F|S], keyed by coalition mask.

    One pass over the outcomes: omega contributes F(omega) times the
    probability of its off-coalition features to every S contained in
    the set of features where omega agrees with e.
    """
    budget.check(model)
    space = check_shared_space(model, dist, e)
    n = space.n
    table: ConditionalTable = {mask: Fraction(0) for mask in range(1 << n)}

    def spread(feature: int, mask: int, weight: Fraction, omega, value: Fraction):
        if feature == n:
            table[mask] += value * weight
            return
        p = dist.probs[feature][space.position(feature, omega[feature])]
        if p:
            spread(feature + 1, mask, weight * p, omega, value)
        if omega[feature] == e[feature]:
            spread(feature + 1, mask | 1 << feature, weight, omega, value)

    for omega in space.outcomes():
        spread(0, 0, Fraction(1), omega, model.evaluate(Instance(space, omega)))
    return table


def _table_or_compute(
    model, dist, e, budget, table: Optional[ConditionalTable]
) -> ConditionalTable:
    if table is None:
        return conditional_table(model, dist, e, budget)
    return table


def brute_simple_index(
    model: Model,
    dist: ProductDistribution,
    e: Instance,
    a: int,
    weights: SimpleWeights,
    budget: OracleBudget = DEFAULT_BUDGET,
    table: Optional[ConditionalTable] = None,
) -> Fraction:
    """The definitional sum over all 2^(n-1) coalitions avoiding feature a."""
    space = check_shared_space(model, dist, e)
    space.check_feature(a)
    if weights.n != space.n:
        raise ValueError(f"weights are for n={weights.n}, space has n={space.n}")
    table = _table_or_compute(model, dist, e, budget, table)
    bit = 1 << a
    total = Fraction(0)
    for s in subsets(Coalition.singleton(a).complement(space.n)):
        q = weights.q[len(s)]
        if q:
            total += q * (table[s.mask | bit] - table[s.mask])
    return total


def brute_bernoulli_index(
    model: Model,
    dist: ProductDistribution,
    e: Instance,
    a: int,
    weights: BernoulliWeights,
    budget: OracleBudget = DEFAULT_BUDGET,
    table: Optional[ConditionalTable] = None,
) -> Fraction:
    """The definitional sum with coalition probabilities from Bernoulli trials."""
    space = check_shared_space(model, dist, e)
    space.check_feature(a)
    if len(weights.theta) != space.n:
        raise ValueError(f"theta has {len(weights.theta)} entries for n={space.n}")
    table = _table_or_compute(model, dist, e, budget, table)
    rest = Coalition.singleton(a).complement(space.n)
    bit = 1 << a
    total = Fraction(0)
    for s in subsets(rest):
        q = Fraction(1)
        for i in rest:
            q *= weights.theta[i] if i in s else 1 - weights.theta[i]
        if q:
            total += q * (table[s.mask | bit] - table[s.mask])
    return total


def brute_interaction_index(
    model: Model,
    dist: ProductDistribution,
    e: Instance,
    a_set: Coalition,
    weights: Union[InteractionWeights, BernoulliInteractionWeights],
    budget: OracleBudget = DEFAULT_BUDGET,
    table: Optional[ConditionalTable] = None,
) -> Fraction:
    """Sum of Q_A(S) times the alternating-sum marginal m(A;S) over S in A^c."""
    space = check_shared_space(model, dist, e)
    a_set.check_within(space)
    if not a_set:
        raise ValueError("the interaction set must be nonempty")
    table = _table_or_compute(model, dist, e, budget, table)
    n = space.n
    m = len(a_set)
    complement = a_set.complement(n)

    if isinstance(weights, InteractionWeights):
        row = weights.row(m, n)

        def coalition_prob(s: Coalition) -> Fraction:
            return row[len(s)]

    else:
        theta = weights.theta
        if len(theta) != n:
            raise ValueError(f"theta has {len(theta)} entries for n={n}")

        def coalition_prob(s: Coalition) -> Fraction:
            q = Fraction(1)
            for i in complement:
                q *= theta[i] if i in s else 1 - theta[i]
            return q

    total = Fraction(0)
    for s in subsets(complement):
        q = coalition_prob(s)
        if not q:
            continue
        marginal = Fraction(0)
        for b in subsets(a_set):
            sign = -1 if (m - len(b)) % 2 else 1
            marginal += sign * table[s.mask | b.mask]
        total += q * marginal
    return total


def brute_coalition_sums(
    model: Model,
    dist: ProductDistribution,
    e: Instance,
    budget: OracleBudget = DEFAULT_BUDGET,
    table: Optional[ConditionalTable] = None,
) -> tuple[Fraction, ...]:
    """The n+1 sums of E[F|S] grouped by coalition size."""
    space = check_shared_space(model, dist, e)
    table = _table_or_compute(model, dist, e, budget, table)
    n = space.n
    sums = [Fraction(0)] * (n + 1)
    for mask, value in table.items():
        sums[mask.bit_count()] += value
    return tuple(sums)


def brute_coefficient_sums(
    model: Model,
    dist: ProductDistribution,
    e: Instance,
    a: int,
    budget: OracleBudget = DEFAULT_BUDGET,
    table: Optional[ConditionalTable] = None,
) -> tuple[Fraction, ...]:
    """The n sums of m(a;S) grouped by |S|, for cross-checking interpolation."""
    space = check_shared_space(model, dist, e)
    space.check_feature(a)
    table = _table_or_compute(model, dist, e, budget, table)
    n = space.n
    bit = 1 << a
    sums = [Fraction(0)] * n
    for s in subsets(Coalition.singleton(a).complement(n)):
        sums[len(s)] += table[s.mask | bit] - table[s.mask]
    return tuple(sums)
