"""Feature spaces, instances, coalitions, and exact product distributions.

Every probability, weight, and result in this library is a
:class:`fractions.Fraction`.  Nothing is ever rounded; equality checks
between computation paths are therefore meaningful as exact equalities.
"""

from __future__ import annotations

import decimal
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Iterator, Mapping, Sequence

Rational = Fraction
Value = Hashable


class PowerdexError(Exception):
    """Base class for all domain errors raised by this library."""


class SpaceMismatchError(PowerdexError):
    """Two objects bound to different feature spaces were combined."""


class WeightError(PowerdexError):
    """A weight scheme violates its normalization or range constraints."""


def parse_rational(text: str) -> Fraction:
    """Parse the rational literal grammar: "p/q" (q > 0), integer, or decimal string.

    Decimal strings convert exactly ("0.25" -> 1/4).
    """
    if not isinstance(text, str):
        raise ValueError(f"rational literal must be a string, got {type(text).__name__}")
    s = text.strip()
    if "/" in s:
        num_s, _, den_s = s.partition("/")
        try:
            num = int(num_s)
            den = int(den_s)
        except ValueError:
            raise ValueError(f"invalid rational literal {text!r}") from None
        if den <= 0:
            raise ValueError(f"invalid rational literal {text!r}: denominator must be positive")
        return Fraction(num, den)
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"invalid rational literal {text!r}") from None


def format_rational(x: Fraction) -> str:
    """Format a rational as "p" or "p/q"; parse_rational(format_rational(x)) == x."""
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def decimal_string(x: Fraction, significant_digits: int = 12) -> str:
    """Advisory decimal rendering, round-half-even to the given significant digits."""
    with decimal.localcontext() as ctx:
        ctx.prec = significant_digits
        ctx.rounding = decimal.ROUND_HALF_EVEN
        d = decimal.Decimal(x.numerator) / decimal.Decimal(x.denominator)
    return str(d)


def as_rational(value) -> Fraction:
    """Coerce ints, Fractions, or literal strings to an exact Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise ValueError(f"cannot interpret {value!r} as a rational")


@dataclass(frozen=True)
class FeatureSpace:
    """The feature index set and one finite value domain per feature.

    Domain values are opaque tokens; their position in the declared
    sequence is the stable ordering used everywhere (serialization,
    probability rows, table layouts).
    """

    domains: tuple[tuple[Value, ...], ...]

    def __init__(self, domains: Sequence[Sequence[Value]]):
        object.__setattr__(self, "domains", tuple(tuple(d) for d in domains))
        if self.n < 1:
            raise ValueError("a feature space needs at least one feature")
        positions = []
        for i, domain in enumerate(self.domains):
            if not domain:
                raise ValueError(f"feature {i} has an empty domain")
            index = {v: pos for pos, v in enumerate(domain)}
            if len(index) != len(domain):
                raise ValueError(f"feature {i} has duplicate domain values")
            positions.append(index)
        object.__setattr__(self, "_positions", tuple(positions))

    @property
    def n(self) -> int:
        return len(self.domains)

    def position(self, feature: int, value: Value) -> int:
        """Index of a value within its feature's domain ordering."""
        try:
            return self._positions[feature][value]
        except KeyError:
            raise ValueError(f"value {value!r} is not in the domain of feature {feature}") from None

    def outcome_count(self) -> int:
        total = 1
        for domain in self.domains:
            total *= len(domain)
        return total

    def outcomes(self) -> Iterator[tuple[Value, ...]]:
        """All full assignments, last feature varying fastest."""
        return itertools.product(*self.domains)

    def check_feature(self, feature: int) -> None:
        if not 0 <= feature < self.n:
            raise ValueError(f"feature index {feature} out of range for n={self.n}")


@dataclass(frozen=True)
class Instance:
    """A fixed full assignment, the reference point being explained."""

    space: FeatureSpace
    values: tuple[Value, ...]

    def __init__(self, space: FeatureSpace, values: Sequence[Value]):
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "values", tuple(values))
        if len(self.values) != space.n:
            raise ValueError(f"instance has {len(self.values)} values for {space.n} features")
        for i, v in enumerate(self.values):
            space.position(i, v)  # raises on unknown value

    def __getitem__(self, feature: int) -> Value:
        return self.values[feature]

    def replaced(self, feature: int, value: Value) -> "Instance":
        vals = list(self.values)
        vals[feature] = value
        return Instance(self.space, vals)


@dataclass(frozen=True, order=True)
class Coalition:
    """A subset of feature indices with bitset semantics."""

    mask: int = 0

    def __post_init__(self):
        if self.mask < 0:
            raise ValueError("coalition mask must be nonnegative")

    @classmethod
    def from_members(cls, members: Iterable[int]) -> "Coalition":
        mask = 0
        for i in members:
            if i < 0:
                raise ValueError(f"feature index {i} is negative")
            mask |= 1 << i
        return cls(mask)

    @classmethod
    def singleton(cls, feature: int) -> "Coalition":
        return cls.from_members([feature])

    @classmethod
    def full(cls, n: int) -> "Coalition":
        return cls((1 << n) - 1)

    def __contains__(self, feature: int) -> bool:
        return bool(self.mask >> feature & 1)

    def __iter__(self) -> Iterator[int]:
        mask = self.mask
        i = 0
        while mask:
            if mask & 1:
                yield i
            mask >>= 1
            i += 1

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __bool__(self) -> bool:
        return self.mask != 0

    def __or__(self, other: "Coalition") -> "Coalition":
        return Coalition(self.mask | other.mask)

    def __and__(self, other: "Coalition") -> "Coalition":
        return Coalition(self.mask & other.mask)

    def __sub__(self, other: "Coalition") -> "Coalition":
        return Coalition(self.mask & ~other.mask)

    def with_member(self, feature: int) -> "Coalition":
        return Coalition(self.mask | 1 << feature)

    def complement(self, n: int) -> "Coalition":
        return Coalition(((1 << n) - 1) & ~self.mask)

    def issubset(self, other: "Coalition") -> bool:
        return self.mask & ~other.mask == 0

    def members(self) -> tuple[int, ...]:
        return tuple(self)

    def check_within(self, space: FeatureSpace) -> None:
        if self.mask >> space.n:
            raise ValueError(f"coalition {sorted(self)} exceeds the space's {space.n} features")


def all_coalitions(n: int) -> Iterator[Coalition]:
    """All 2^n coalitions over n features, in ascending mask order."""
    for mask in range(1 << n):
        yield Coalition(mask)


def subsets(coalition: Coalition) -> Iterator[Coalition]:
    """All subsets of a coalition (submask enumeration, ascending)."""
    mask = coalition.mask
    sub = 0
    while True:
        yield Coalition(sub)
        if sub == mask:
            return
        sub = (sub - mask) & mask


@dataclass(frozen=True)
class ProductDistribution:
    """Independent per-feature marginals, stored as exact probability rows.

    Row i is aligned with ``space.domains[i]``.  Zero probabilities are
    permitted; conditioning is product substitution, never Bayes, so no
    division by a marginal probability ever occurs.
    """

    space: FeatureSpace
    probs: tuple[tuple[Fraction, ...], ...]

    def __init__(self, space: FeatureSpace, probs: Sequence[Sequence[Fraction]]):
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "probs", tuple(tuple(row) for row in probs))
        if len(self.probs) != space.n:
            raise ValueError(f"{len(self.probs)} probability rows for {space.n} features")
        for i, (row, domain) in enumerate(zip(self.probs, space.domains)):
            if len(row) != len(domain):
                raise ValueError(f"feature {i}: {len(row)} probabilities for {len(domain)} values")
            total = Fraction(0)
            for p in row:
                if not isinstance(p, Fraction):
                    raise ValueError(f"feature {i}: probabilities must be Fractions")
                if p < 0 or p > 1:
                    raise ValueError(f"feature {i}: probability {p} outside [0, 1]")
                total += p
            if total != 1:
                raise ValueError(f"feature {i}: probabilities sum to {total}, not 1")

    @classmethod
    def _from_trusted_rows(
        cls, space: FeatureSpace, probs: tuple[tuple[Fraction, ...], ...]
    ) -> "ProductDistribution":
        # skips validation; callers must supply exact probability rows
        # (internally constructed mixtures and point masses qualify)
        dist = object.__new__(cls)
        object.__setattr__(dist, "space", space)
        object.__setattr__(dist, "probs", probs)
        return dist

    @classmethod
    def uniform(cls, space: FeatureSpace) -> "ProductDistribution":
        return cls(space, [[Fraction(1, len(d))] * len(d) for d in space.domains])

    @classmethod
    def from_mappings(
        cls, space: FeatureSpace, marginals: Sequence[Mapping[Value, Fraction]]
    ) -> "ProductDistribution":
        rows = []
        for i, mapping in enumerate(marginals):
            domain = space.domains[i]
            if set(mapping) != set(domain):
                raise ValueError(f"feature {i}: marginal keys do not match the domain")
            rows.append([as_rational(mapping[v]) for v in domain])
        return cls(space, rows)

    @classmethod
    def point_mass(cls, e: Instance) -> "ProductDistribution":
        space = e.space
        rows = []
        for i, domain in enumerate(space.domains):
            pos = space.position(i, e[i])
            rows.append([Fraction(1) if k == pos else Fraction(0) for k in range(len(domain))])
        return cls(space, rows)

    def prob(self, feature: int, value: Value) -> Fraction:
        return self.probs[feature][self.space.position(feature, value)]

    def with_rows(self, replacements: Mapping[int, Sequence[Fraction]]) -> "ProductDistribution":
        rows = list(self.probs)
        for i, row in replacements.items():
            rows[i] = tuple(row)
        return ProductDistribution(self.space, rows)


def check_shared_space(*objects) -> FeatureSpace:
    spaces = [obj.space for obj in objects]
    first = spaces[0]
    for other in spaces[1:]:
        if other != first:
            raise SpaceMismatchError("objects are bound to different feature spaces")
    return first


def point_mass_row(space: FeatureSpace, feature: int, value: Value) -> tuple[Fraction, ...]:
    pos = space.position(feature, value)
    size = len(space.domains[feature])
    return tuple(Fraction(1) if k == pos else Fraction(0) for k in range(size))


def mixture_row(
    row: Sequence[Fraction], hit: int, z: Fraction
) -> tuple[Fraction, ...]:
    # blend (z*delta + p) / (1+z); hit is the position of e_i in the domain
    denom = 1 + z
    return tuple((z + p) / denom if k == hit else p / denom for k, p in enumerate(row))


def bernoulli_row(
    row: Sequence[Fraction], hit: int, theta: Fraction
) -> tuple[Fraction, ...]:
    # blend theta*delta + (1-theta)*p
    rest = 1 - theta
    return tuple(theta + rest * p if k == hit else rest * p for k, p in enumerate(row))


def mixture_distribution(
    dist: ProductDistribution, e: Instance, z: Fraction
) -> ProductDistribution:
    """Blend every marginal toward the point mass at e with weight z/(1+z).

    The new marginal of feature i is (z*delta_i + P(Y_i = .)) / (1+z),
    where delta_i is the indicator of e_i.  z = 0 returns the input
    distribution unchanged.
    """
    z = as_rational(z)
    if z < 0:
        raise ValueError(f"mixture parameter must be >= 0, got {z}")
    space = check_shared_space(dist, e)
    rows = tuple(
        mixture_row(dist.probs[i], space.position(i, e[i]), z)
        for i in range(space.n)
    )
    return ProductDistribution._from_trusted_rows(space, rows)


def bernoulli_mixture(
    dist: ProductDistribution, e: Instance, theta: Sequence[Fraction]
) -> ProductDistribution:
    """Per-feature blends theta_i*delta_i + (1-theta_i)*P(Y_i = .).

    theta_i = 1 degenerates feature i at e_i; theta_i = 0 leaves it
    unchanged.
    """
    space = check_shared_space(dist, e)
    thetas = [as_rational(t) for t in theta]
    if len(thetas) != space.n:
        raise ValueError(f"{len(thetas)} mixing weights for {space.n} features")
    for i, t in enumerate(thetas):
        if t < 0 or t > 1:
            raise ValueError(f"mixing weight for feature {i} is {t}, outside [0, 1]")
    rows = tuple(
        bernoulli_row(dist.probs[i], space.position(i, e[i]), thetas[i])
        for i in range(space.n)
    )
    return ProductDistribution._from_trusted_rows(space, rows)


def condition(
    dist: ProductDistribution, e: Instance, coalition: Coalition
) -> ProductDistribution:
    """Replace the marginals of coalition members by point masses at e."""
    space = check_shared_space(dist, e)
    coalition.check_within(space)
    rows = list(dist.probs)
    for i in coalition:
        rows[i] = point_mass_row(space, i, e[i])
    return ProductDistribution._from_trusted_rows(space, tuple(rows))
