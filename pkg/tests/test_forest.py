from fractions import Fraction

import pytest

from src.errors import ArgumentError
from src.forest import CXpForest, build_forest
from src.model import REGRESSION, ExplanationProblem, FeatureSpace, TabularModel

TRIANGLE = (frozenset({1, 2}), frozenset({1, 3}), frozenset({2, 3}))


@pytest.fixture
def forest():
    return CXpForest(TRIANGLE, (1, 4, 2), 3)


def test_characteristic_function(forest):
    assert forest.chi(set()) == 0
    assert forest.chi({1}) == Fraction(5, 3)
    assert forest.chi({2}) == 1
    assert forest.chi({3}) == 2
    for S in ({1, 2}, {1, 3}, {2, 3}, {1, 2, 3}):
        assert forest(S) == Fraction(7, 3)
    assert forest.total() == Fraction(7, 3)


def test_weights_follow_their_cxp():
    shuffled = CXpForest((TRIANGLE[2], TRIANGLE[0], TRIANGLE[1]), (2, 1, 4), 3)
    assert shuffled.cxps == TRIANGLE
    assert shuffled.weights == (1, 4, 2)


def test_built_forest_of_running_example(running, forest):
    assert build_forest(running, 'count') == forest
    ratio = build_forest(running, 'ratio')
    assert ratio.weights == (Fraction(1, 6), Fraction(4, 9), Fraction(1, 3))
    assert build_forest(running, 'unweighted').weights == (1, 1, 1)


@pytest.mark.parametrize("cxps, weights", [
    ((), ()),
    (({1, 2}, {1}), (1, 1)),
    (({1, 2},), (-1,)),
    (({1, 4},), (1,)),
    (({1},), (1, 2)),
])
def test_invalid_forests(cxps, weights):
    with pytest.raises(ArgumentError):
        CXpForest(tuple(frozenset(y) for y in cxps), weights, 3)


def test_membership_and_relevance():
    forest = CXpForest((frozenset({1}), frozenset({2, 3})), (1, 5), 4)
    assert forest.membership(2) == (1,)
    assert forest.membership(4) == ()
    assert forest.relevant_features() == frozenset({1, 2, 3})


def test_document_form(forest):
    doc = forest.to_dict()
    assert doc == {'m': 3, 'cxps': [[1, 2], [1, 3], [2, 3]], 'weights': ['1', '4', '2']}
    assert CXpForest.from_dict(doc) == forest


def test_scaled_and_unweighted(forest):
    assert forest.scaled(Fraction(1, 2)).weights == (Fraction(1, 2), 2, 1)
    assert forest.unweighted().chi({1}) == Fraction(2, 3)


def test_dot_has_one_cluster_per_tree(forest):
    dot = forest.to_dot()
    assert dot.startswith('digraph cxp_forest {')
    assert dot.count('subgraph cluster_') == 3
    assert 'w2 = 4' in dot


def test_no_forest_without_cxps():
    space = FeatureSpace(((0, 1, 2),))
    model = TabularModel(space, REGRESSION, {x: Fraction(x[0], 5) for x in space.points()})
    problem = ExplanationProblem.create(model, (0,), delta=1)
    with pytest.raises(ArgumentError, match="no CXps"):
        build_forest(problem)
