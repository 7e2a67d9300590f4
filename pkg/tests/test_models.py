import random
from fractions import Fraction

import pytest

from powerdex import (
    AdditiveModel,
    Coalition,
    EnsembleModel,
    FeatureSpace,
    Instance,
    ProductDistribution,
    SpaceMismatchError,
    TableModel,
    TreeModel,
    conditional_expectation,
)
from powerdex.models import Leaf, Split

from corpus import (
    and_space,
    and_table_model,
    and_tree_model,
    ones_instance,
    random_distribution,
    random_instance,
    random_space,
    random_tree_model,
)


@pytest.fixture
def and2():
    space = and_space(2)
    return space, and_table_model(space), ProductDistribution.uniform(space)


def test_table_evaluate(and2):
    space, model, _ = and2
    assert model.evaluate(Instance(space, ("1", "1"))) == 1
    assert model.evaluate(Instance(space, ("1", "0"))) == 0


def test_additive_evaluate():
    space = FeatureSpace([("0", "1")])
    model = AdditiveModel(space, Fraction(1), [[Fraction(0), Fraction(1)]])
    assert model.evaluate(Instance(space, ("1",))) == 2
    assert model.evaluate(Instance(space, ("0",))) == 1


def test_tree_evaluate():
    space = and_space(2)
    model = and_tree_model(space)
    assert model.evaluate(Instance(space, ("1", "0"))) == 0
    assert model.evaluate(Instance(space, ("1", "1"))) == 1


def test_expected_value_and(and2):
    space, model, dist = and2
    assert model.expected_value(dist) == Fraction(1, 4)


def test_expected_value_point_mass(and2):
    space, model, _ = and2
    for omega in space.outcomes():
        e = Instance(space, omega)
        assert model.expected_value(ProductDistribution.point_mass(e)) == model.evaluate(e)


def test_ensemble_expected_value(and2):
    space, model, dist = and2
    ensemble = EnsembleModel([(Fraction(2), model), (Fraction(3), and_tree_model(space))])
    assert ensemble.expected_value(dist) == Fraction(5, 4)
    assert ensemble.evaluate(Instance(space, ("1", "1"))) == 5


def test_conditional_expectation_and(and2):
    space, model, dist = and2
    e = ones_instance(space)
    assert conditional_expectation(model, dist, e, Coalition.singleton(0)) == Fraction(1, 2)
    assert conditional_expectation(model, dist, e, Coalition.full(2)) == 1
    assert conditional_expectation(model, dist, e, Coalition()) == Fraction(1, 4)


def test_full_conditioning_returns_the_prediction():
    rng = random.Random(11)
    space = random_space(rng, 4)
    dist = random_distribution(rng, space)
    e = random_instance(rng, space)
    for model in (
        random_tree_model(rng, space),
        TableModel.tabulate(random_tree_model(rng, space)),
    ):
        assert conditional_expectation(model, dist, e, Coalition.full(4)) == model.evaluate(e)


def test_space_mismatch_rejected(and2):
    _, model, _ = and2
    other = ProductDistribution.uniform(and_space(3))
    with pytest.raises(SpaceMismatchError):
        model.expected_value(other)
    with pytest.raises(SpaceMismatchError):
        model.evaluate(ones_instance(and_space(3)))


def test_table_size_guard():
    space = FeatureSpace([("0", "1")] * 25)  # 2^25 > 2^24
    with pytest.raises(ValueError):
        TableModel(space, [])


def test_tree_totality_enforced():
    space = and_space(2)
    with pytest.raises(ValueError):
        TreeModel(space, Split(0, (Leaf(Fraction(1)),)))  # one child for two values


def test_tree_repeated_feature_rejected():
    space = and_space(2)
    inner = Split(0, (Leaf(Fraction(0)), Leaf(Fraction(1))))
    with pytest.raises(ValueError):
        TreeModel(space, Split(0, (inner, Leaf(Fraction(0)))))


def test_tree_shared_nodes_rejected():
    space = and_space(2)
    shared = Leaf(Fraction(1))
    with pytest.raises(ValueError):
        TreeModel(space, Split(0, (shared, shared)))


def test_tree_matches_table_enumeration():
    rng = random.Random(4179)
    for trial in range(25):
        n = rng.randint(2, 10)
        space = random_space(rng, n)
        if space.outcome_count() > 1 << 16:
            continue
        tree = random_tree_model(rng, space, max_depth=4)
        table = TableModel.tabulate(tree)
        dist = random_distribution(rng, space)
        assert tree.expected_value(dist) == table.expected_value(dist), trial


def test_and_conditioning_is_monotone():
    # agreeing features only raise the AND model's conditional expectation
    for n in (2, 3, 5):
        space = and_space(n)
        model = and_table_model(space)
        dist = ProductDistribution.uniform(space)
        e = ones_instance(space)
        coalition = Coalition()
        previous = conditional_expectation(model, dist, e, coalition)
        for feature in range(n):
            coalition = coalition.with_member(feature)
            current = conditional_expectation(model, dist, e, coalition)
            assert current >= previous
            previous = current


def test_expected_value_linear_in_each_marginal():
    rng = random.Random(140)
    space = random_space(rng, 4)
    model = random_tree_model(rng, space)
    d1 = random_distribution(rng, space)
    d2 = random_distribution(rng, space)
    alpha = Fraction(2, 7)
    for feature in range(4):
        blended_row = tuple(
            alpha * p + (1 - alpha) * q
            for p, q in zip(d1.probs[feature], d2.probs[feature])
        )
        blended = d1.with_rows({feature: blended_row})
        other = d1.with_rows({feature: d2.probs[feature]})
        assert model.expected_value(blended) == alpha * model.expected_value(d1) + (
            1 - alpha
        ) * model.expected_value(other)


def test_ensemble_equals_weighted_component_sum():
    rng = random.Random(99)
    space = random_space(rng, 5)
    models = [random_tree_model(rng, space) for _ in range(3)]
    weights = [Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(3)]
    ensemble = EnsembleModel(list(zip(weights, models)))
    for _ in range(5):
        dist = random_distribution(rng, space)
        expected = sum(
            (w * m.expected_value(dist) for w, m in zip(weights, models)), Fraction(0)
        )
        assert ensemble.expected_value(dist) == expected
