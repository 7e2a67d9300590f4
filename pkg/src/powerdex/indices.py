"""Single-feature power indices.

Three computation paths, all exact:

* interpolation -- works for any cardinality-based weight vector; scales
  2n expected values at the integer nodes z = 0..n-1 and solves the
  Vandermonde system for the per-size marginal sums.
* bernoulli-direct -- two expected values, for indices whose coalition
  distribution factors into independent per-feature inclusion trials.
* closed-form -- the marginal preset, which needs no expectations at all.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Optional, Sequence, Union

from .core import (
    Coalition,
    Instance,
    ProductDistribution,
    WeightError,
    as_rational,
    bernoulli_mixture,
    check_shared_space,
    mixture_row,
    point_mass_row,
)
from .interpolation import vandermonde_solve
from .models import CountingModel, Model, conditional_expectation

PATH_INTERPOLATION = "interpolation"
PATH_BERNOULLI = "bernoulli-direct"
PATH_CLOSED_FORM = "closed-form"


@dataclass(frozen=True)
class SimpleWeights:
    """A cardinality-based coalition weight vector q_0..q_{n-1}.

    Validity demands q_k >= 0 and sum_k C(n-1,k) q_k = 1 exactly; there
    is no silent renormalization (use :meth:`normalized`).  ``preset``
    tags vectors built by the named constructors so higher layers can
    pick specialized computation paths.
    """

    n: int
    q: tuple[Fraction, ...]
    preset: Optional[str] = None
    theta: Optional[Fraction] = None  # binomial preset parameter

    def __post_init__(self):
        if self.n < 1:
            raise WeightError("weights need n >= 1")
        if len(self.q) != self.n:
            raise WeightError(f"{len(self.q)} weights for n={self.n}")
        total = Fraction(0)
        for k, qk in enumerate(self.q):
            if qk < 0:
                raise WeightError(f"q_{k} = {qk} is negative")
            total += comb(self.n - 1, k) * qk
        if total != 1:
            raise WeightError(f"weights sum to {total} under binomial counts, not 1")

    @classmethod
    def from_values(cls, values: Sequence) -> "SimpleWeights":
        q = tuple(as_rational(v) for v in values)
        return cls(len(q), q)

    @classmethod
    def normalized(cls, values: Sequence) -> "SimpleWeights":
        """Scale a nonnegative vector so the coalition weights sum to 1."""
        raw = [as_rational(v) for v in values]
        n = len(raw)
        total = sum(comb(n - 1, k) * v for k, v in enumerate(raw))
        if total <= 0:
            raise WeightError("cannot normalize: weights sum to zero")
        return cls(n, tuple(v / total for v in raw))

    @classmethod
    def shapley(cls, n: int) -> "SimpleWeights":
        q = tuple(
            Fraction(factorial(k) * factorial(n - 1 - k), factorial(n)) for k in range(n)
        )
        return cls(n, q, preset="shapley")

    @classmethod
    def banzhaf(cls, n: int) -> "SimpleWeights":
        q = (Fraction(1, 2 ** (n - 1)),) * n
        return cls(n, q, preset="banzhaf")

    @classmethod
    def binomial(cls, n: int, theta) -> "SimpleWeights":
        theta = as_rational(theta)
        if not 0 < theta < 1:
            raise WeightError(f"binomial parameter must lie in (0, 1), got {theta}")
        q = tuple(theta**k * (1 - theta) ** (n - 1 - k) for k in range(n))
        return cls(n, q, preset="binomial", theta=theta)

    @classmethod
    def dictatorial(cls, n: int) -> "SimpleWeights":
        q = (Fraction(1),) + (Fraction(0),) * (n - 1)
        return cls(n, q, preset="dictatorial")

    @classmethod
    def marginal(cls, n: int) -> "SimpleWeights":
        q = (Fraction(0),) * (n - 1) + (Fraction(1),)
        return cls(n, q, preset="marginal")


@dataclass(frozen=True)
class BernoulliWeights:
    """Per-feature inclusion probabilities defining the coalition distribution."""

    theta: tuple[Fraction, ...]

    def __init__(self, theta: Sequence):
        values = tuple(as_rational(t) for t in theta)
        for i, t in enumerate(values):
            if t < 0 or t > 1:
                raise WeightError(f"theta_{i} = {t} outside [0, 1]")
        object.__setattr__(self, "theta", values)

    @classmethod
    def constant(cls, n: int, theta) -> "BernoulliWeights":
        return cls([as_rational(theta)] * n)


IndexScheme = Union[SimpleWeights, BernoulliWeights]


@dataclass(frozen=True)
class AttributionReport:
    """Per-feature index values plus the provenance of the computation."""

    values: tuple[Fraction, ...]
    scheme: IndexScheme
    path: str
    engine_calls: tuple[int, ...]  # expected-value calls, per feature

    @property
    def total_engine_calls(self) -> int:
        return sum(self.engine_calls)


def marginal_contribution(
    model: Model,
    dist: ProductDistribution,
    e: Instance,
    a: int,
    coalition: Coalition,
) -> Fraction:
    """Change in conditional expectation when feature a joins the coalition."""
    space = check_shared_space(model, dist, e)
    space.check_feature(a)
    coalition.check_within(space)
    if a in coalition:
        raise ValueError(f"feature {a} is already in the coalition")
    joined = coalition.with_member(a)
    return conditional_expectation(model, dist, e, joined) - conditional_expectation(
        model, dist, e, coalition
    )


def interpolate_coefficients(
    model: Model, dist: ProductDistribution, e: Instance, a: int
) -> tuple[Fraction, ...]:
    """Per-size sums of feature a's marginal contributions, exactly.

    Entry k is the sum of m(a;S) over the coalitions of size k avoiding
    a.  Obtained from 2n expected values: at each node z in 0..n-1 the
    difference between pinning feature a to e_a and leaving it free,
    under the z-mixture of the remaining features, scaled by (1+z)^(n-1),
    is the value of the generating polynomial at z.
    """
    space = check_shared_space(model, dist, e)
    space.check_feature(a)
    n = space.n
    nodes = [Fraction(z) for z in range(n)]
    values = []
    pinned_row = point_mass_row(space, a, e[a])
    free_row = dist.probs[a]
    hits = [space.position(i, e[i]) for i in range(n)]
    for z in nodes:
        rows = [
            pinned_row if i == a else mixture_row(dist.probs[i], hits[i], z)
            for i in range(n)
        ]
        pinned = ProductDistribution._from_trusted_rows(space, tuple(rows))
        rows[a] = free_row
        free = ProductDistribution._from_trusted_rows(space, tuple(rows))
        gap = model.expected_value(pinned) - model.expected_value(free)
        values.append((1 + z) ** (n - 1) * gap)
    return vandermonde_solve(nodes, values)


def marginal_index(
    model: Model, dist: ProductDistribution, e: Instance, a: int
) -> Fraction:
    """Closed form for the marginal preset: F(e) minus the a-averaged prediction.

    Needs one model evaluation per value of feature a's domain and no
    expected-value engine calls.
    """
    space = check_shared_space(model, dist, e)
    space.check_feature(a)
    averaged = Fraction(0)
    for value, p in zip(space.domains[a], dist.probs[a]):
        if p:
            averaged += p * model.evaluate(e.replaced(a, value))
    return model.evaluate(e) - averaged


def compute_simple_index(
    model: Model,
    dist: ProductDistribution,
    e: Instance,
    a: int,
    weights: SimpleWeights,
) -> Fraction:
    """Cardinality-based index of feature a under the given weight vector.

    General path: interpolation (2n engine calls).  The marginal preset
    short-circuits to its closed form.
    """
    space = check_shared_space(model, dist, e)
    if weights.n != space.n:
        raise WeightError(f"weights are for n={weights.n}, space has n={space.n}")
    if weights.preset == "marginal":
        return marginal_index(model, dist, e, a)
    coefficients = interpolate_coefficients(model, dist, e, a)
    return sum(
        (qk * ck for qk, ck in zip(weights.q, coefficients) if qk), Fraction(0)
    )


def compute_bernoulli_index(
    model: Model,
    dist: ProductDistribution,
    e: Instance,
    a: int,
    weights: BernoulliWeights,
) -> Fraction:
    """Bernoulli index of feature a as a difference of two expected values.

    The input theta_a is ignored: the two expectations pin it to 1 and 0.
    """
    space = check_shared_space(model, dist, e)
    space.check_feature(a)
    if len(weights.theta) != space.n:
        raise WeightError(f"theta has {len(weights.theta)} entries for n={space.n}")
    mixed = bernoulli_mixture(dist, e, weights.theta)
    rows = list(mixed.probs)
    rows[a] = point_mass_row(space, a, e[a])
    pinned = ProductDistribution._from_trusted_rows(space, tuple(rows))
    rows[a] = dist.probs[a]
    free = ProductDistribution._from_trusted_rows(space, tuple(rows))
    return model.expected_value(pinned) - model.expected_value(free)


def _bernoulli_equivalent(weights: SimpleWeights) -> Optional[BernoulliWeights]:
    if weights.preset == "banzhaf":
        return BernoulliWeights.constant(weights.n, Fraction(1, 2))
    if weights.preset == "binomial":
        return BernoulliWeights.constant(weights.n, weights.theta)
    return None


def attribute_all(
    model: Model,
    dist: ProductDistribution,
    e: Instance,
    scheme: IndexScheme,
    threads: int = 1,
) -> AttributionReport:
    """All n per-feature indices, routed through the cheapest valid path.

    Presets with a two-expectation equivalent (banzhaf, binomial) take
    the bernoulli-direct path; the marginal preset takes its closed
    form; everything else interpolates.  Per-feature work is independent
    and may be spread over ``threads`` workers; exact arithmetic makes
    the result identical regardless of scheduling.
    """
    space = check_shared_space(model, dist, e)
    n = space.n
    if isinstance(scheme, BernoulliWeights):
        if len(scheme.theta) != n:
            raise WeightError(f"theta has {len(scheme.theta)} entries for n={n}")
        path = PATH_BERNOULLI
        compute = lambda counted, a: compute_bernoulli_index(counted, dist, e, a, scheme)
    elif isinstance(scheme, SimpleWeights):
        if scheme.n != n:
            raise WeightError(f"weights are for n={scheme.n}, space has n={n}")
        direct = _bernoulli_equivalent(scheme)
        if scheme.preset == "marginal":
            path = PATH_CLOSED_FORM
            compute = lambda counted, a: marginal_index(counted, dist, e, a)
        elif direct is not None:
            path = PATH_BERNOULLI
            compute = lambda counted, a: compute_bernoulli_index(counted, dist, e, a, direct)
        else:
            path = PATH_INTERPOLATION
            compute = lambda counted, a: compute_simple_index(counted, dist, e, a, scheme)
    else:
        raise TypeError(f"unsupported scheme {scheme!r}")

    def one_feature(a: int) -> tuple[Fraction, int]:
        counted = CountingModel(model)
        value = compute(counted, a)
        return value, counted.expected_value_calls

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one_feature, range(n)))
    else:
        results = [one_feature(a) for a in range(n)]
    values = tuple(value for value, _ in results)
    calls = tuple(count for _, count in results)
    return AttributionReport(values=values, scheme=scheme, path=path, engine_calls=calls)
