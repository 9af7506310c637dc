from fractions import Fraction

import pytest

from src.errors import ArgumentError, DomainError
from src.model import (CLASSIFICATION, REGRESSION, DecisionTree, Edge, ExplanationProblem, FeatureSpace, Node,
                       TabularModel, validate_model)
from src.synth import RandomSpec, random_problem


def binary_tree(edges):
    space = FeatureSpace(((0, 1), (0, 1)))
    return DecisionTree(space, CLASSIFICATION, 'root', {'root': Node(1, edges)}, {'a': 0, 'b': 1})


def test_space_normalises_domains():
    space = FeatureSpace(((2, 0, 1, 1), (1, 0)))
    assert space.domains == ((0, 1, 2), (0, 1))
    assert space.size == 6
    assert space.subspace_size([2]) == 2
    assert list(space.features) == [1, 2]


def test_space_rejects_empty_domain():
    with pytest.raises(ArgumentError):
        FeatureSpace(((0, 1), ()))


def test_point_outside_domain_is_domain_error(running):
    with pytest.raises(DomainError):
        running.model.evaluate((3, 0, 0))
    with pytest.raises(DomainError):
        running.model.evaluate((0, 0))


def test_neighbourhood_varies_only_free_features():
    space = FeatureSpace(((0, 1, 2), (0, 1)))
    assert list(space.neighbourhood((2, 1), [1])) == [(0, 1), (1, 1), (2, 1)]
    assert list(space.neighbourhood((2, 1), [])) == [(2, 1)]


def test_running_example_model(running):
    assert validate_model(running.model) == []
    assert running.q == 1
    assert running.model.evaluate((1, 0, 2)) == 0
    assert not running.similar((1, 0, 2))
    assert running.similar((2, 1, 2))


def test_constant_model_is_reported():
    space = FeatureSpace(((0, 1),))
    model = TabularModel(space, CLASSIFICATION, {(0,): 1, (1,): 1})
    assert "model is constant" in validate_model(model)


def test_partial_table_is_reported():
    space = FeatureSpace(((0, 1), (0, 1)))
    model = TabularModel(space, CLASSIFICATION, {(0, 0): 0, (0, 1): 1, (1, 0): 1})
    assert any("not total" in issue for issue in validate_model(model))


def test_overlapping_literals_are_reported():
    tree = binary_tree((Edge(frozenset({0, 1}), 'a'), Edge(frozenset({0}), 'b')))
    assert any(issue.startswith("overlapping literals at node") for issue in validate_model(tree))


def test_missing_literals_are_reported():
    tree = binary_tree((Edge(frozenset({0}), 'a'),))
    issues = validate_model(tree)
    assert any(issue.startswith("missing literals at node") for issue in issues)
    assert any("unreachable" in issue for issue in issues)


def test_tree_paths_partition_the_space():
    _, problem = random_problem(RandomSpec(m=4, domain_sizes=(3, 2, 3, 2)), seed=11)
    tree = problem.model
    consistent = [p for p in tree.paths if p.consistent]
    for point in tree.space.points():
        hits = [p for p in consistent if all(p.admits(i, x) for i, x in enumerate(point, start=1))]
        assert len(hits) == 1
        assert hits[0].value == tree.evaluate(point)


def test_tree_and_its_table_agree():
    _, problem = random_problem(RandomSpec(m=5), seed=3)
    table = problem.model.to_tabular()
    assert validate_model(table) == []
    assert all(table.evaluate(x) == problem.model.evaluate(x) for x in table.space.points())


def test_problem_rejects_wrong_target(running):
    with pytest.raises(ArgumentError):
        ExplanationProblem(running.model, (2, 1, 2), 0)


def test_classification_needs_zero_delta(running):
    with pytest.raises(ArgumentError):
        ExplanationProblem.create(running.model, (2, 1, 2), delta=Fraction(1, 2))


def test_regression_similarity_uses_delta():
    space = FeatureSpace(((0, 1, 2),))
    model = TabularModel(space, REGRESSION, {(0,): Fraction(0), (1,): Fraction(1, 5), (2,): Fraction(3, 5)})
    problem = ExplanationProblem.create(model, (0,), delta=Fraction(3, 10))
    assert problem.similar((1,))
    assert not problem.similar((2,))


def test_radius_defaults_to_m(running):
    assert running.radius == 3
    assert ExplanationProblem.create(running.model, (2, 1, 2), epsilon=1).radius == 1


def test_shared_leaves_are_allowed():
    space = FeatureSpace(((0, 1), (0, 1)))
    nodes = {'root': Node(1, (Edge(frozenset({0}), 'zero'), Edge(frozenset({1}), 'n2'))),
             'n2': Node(2, (Edge(frozenset({0}), 'zero'), Edge(frozenset({1}), 'one')))}
    tree = DecisionTree(space, CLASSIFICATION, 'root', nodes, {'zero': 0, 'one': 1})
    assert validate_model(tree) == []
    assert tree.evaluate((1, 0)) == 0
    assert len(tree.paths) == 3


def test_cycles_are_reported():
    space = FeatureSpace(((0, 1), (0, 1)))
    nodes = {'root': Node(1, (Edge(frozenset({0}), 'zero'), Edge(frozenset({1}), 'n2'))),
             'n2': Node(2, (Edge(frozenset({0}), 'zero'), Edge(frozenset({1}), 'root')))}
    tree = DecisionTree(space, CLASSIFICATION, 'root', nodes, {'zero': 0})
    assert "cycle through node 'root'" in validate_model(tree)


def test_shared_node_checked_on_every_path():
    space = FeatureSpace(((0, 1),))
    nodes = {'root': Node(1, (Edge(frozenset({0}), 'a'), Edge(frozenset({1}), 'a'))),
             'a': Node(1, (Edge(frozenset({0}), 'zero'),))}
    tree = DecisionTree(space, CLASSIFICATION, 'root', nodes, {'zero': 0})
    assert "missing literals at node 'a': feature 1 values [1]" in validate_model(tree)
