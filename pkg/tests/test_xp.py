import time
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.errors import ArgumentError, MethodError, ResourceError
from src.model import CLASSIFICATION, REGRESSION, ExplanationProblem, FeatureSpace, TabularModel
from src.synth import gadget_dt
from src.xp import (XpFamily, enumerate_axps, enumerate_cxps, is_antichain, is_axp, is_cxp, is_waxp, is_wcxp,
                    minimal_hitting_sets, minimal_sets, relevant_features)
from tests.conftest import CORPUS_SEEDS, corpus_problem

TRIANGLE = (frozenset({1, 2}), frozenset({1, 3}), frozenset({2, 3}))

families = st.lists(st.frozensets(st.integers(1, 6), min_size=1, max_size=4), min_size=1, max_size=6)


def first_feature_model():
    space = FeatureSpace(((0, 1), (0, 1)))
    model = TabularModel(space, CLASSIFICATION, {x: x[0] for x in space.points()})
    return ExplanationProblem.create(model, (1, 0))


def flat_regression():
    """y = x1/5 with a tolerance that covers every output"""
    space = FeatureSpace(((0, 1, 2),))
    model = TabularModel(space, REGRESSION, {x: Fraction(x[0], 5) for x in space.points()})
    return ExplanationProblem.create(model, (0,), delta=1)


def test_weak_explanations_of_running_example(running):
    assert is_waxp(running, {1, 2})
    assert not is_waxp(running, {1})
    assert is_wcxp(running, {1, 2})
    assert not is_wcxp(running, set())
    assert not is_wcxp(running, {3})


def test_minimality_checks(running):
    assert is_axp(running, {2, 3})
    assert not is_axp(running, {1, 2, 3})
    assert is_cxp(running, {1, 3})
    assert not is_cxp(running, {1, 2, 3})


def test_features_outside_range_are_rejected(running):
    with pytest.raises(ArgumentError):
        is_waxp(running, {4})


def test_running_example_families(running):
    cxps = enumerate_cxps(running, 'brute')
    axps = enumerate_axps(running, 'brute')
    assert cxps.sets == TRIANGLE
    assert axps.sets == TRIANGLE
    assert enumerate_axps(running, 'mhs_dual').sets == TRIANGLE
    assert relevant_features(running) == frozenset({1, 2, 3})


def test_irrelevant_feature_stays_out():
    problem = first_feature_model()
    assert enumerate_cxps(problem).sets == (frozenset({1}),)
    assert enumerate_axps(problem).sets == (frozenset({1}),)
    assert relevant_features(problem) == frozenset({1})


def test_dt_paths_needs_a_tree(running):
    with pytest.raises(MethodError):
        enumerate_cxps(running, 'dt_paths')
    with pytest.raises(MethodError):
        enumerate_cxps(running, 'sat')


def test_subset_cap(running):
    with pytest.raises(ResourceError):
        enumerate_cxps(running, 'brute', cap_subsets=2)


def test_gadget_one():
    _, problem = gadget_dt(1)
    assert enumerate_cxps(problem, 'dt_paths').sets == (frozenset({1, 2}), frozenset({2, 3}))
    assert enumerate_axps(problem).sets == (frozenset({1, 3}), frozenset({2}))
    assert enumerate_axps(problem, 'brute').sets == enumerate_axps(problem).sets


def test_gadget_two(gadget2):
    assert enumerate_cxps(gadget2).sets == (frozenset({1, 2}), frozenset({2, 5}), frozenset({3, 4}),
                                            frozenset({4, 6}))
    assert enumerate_axps(gadget2).sets == (frozenset({1, 3, 5, 6}), frozenset({1, 4, 5}),
                                            frozenset({2, 3, 6}), frozenset({2, 4}))


@pytest.mark.parametrize("k", range(1, 11))
def test_gadget_family_sizes(k):
    _, problem = gadget_dt(k)
    start = time.perf_counter()
    cxps = enumerate_cxps(problem, 'dt_paths')
    elapsed = time.perf_counter() - start
    assert len(cxps) == 2 * k
    assert elapsed < 1.0
    assert len(minimal_hitting_sets(cxps.sets)) == 2 ** k


def test_brute_force_refuses_large_gadget():
    _, problem = gadget_dt(10)
    with pytest.raises(ResourceError):
        enumerate_axps(problem, 'brute')


def test_hitting_sets_of_bad_families():
    with pytest.raises(ArgumentError):
        minimal_hitting_sets([])
    with pytest.raises(ArgumentError):
        minimal_hitting_sets([{1}, set()])


def test_hitting_sets_of_disjoint_pairs():
    assert minimal_hitting_sets([{1, 2}, {3}]) == (frozenset({1, 3}), frozenset({2, 3}))


@given(families)
def test_hitting_sets_hit_everything_minimally(family):
    hitting = minimal_hitting_sets(family)
    assert is_antichain(hitting)
    for h in hitting:
        assert all(h & s for s in family)
        assert all(not all((h - {e}) & s for s in family) for e in h)


@given(families)
@settings(max_examples=60)
def test_hitting_set_duality(family):
    assert minimal_hitting_sets(minimal_hitting_sets(family)) == minimal_sets(family)


@pytest.mark.parametrize("seed", CORPUS_SEEDS)
def test_duality_on_corpus(seed):
    problem = corpus_problem(seed)
    cxps = enumerate_cxps(problem, 'brute')
    axps = enumerate_axps(problem, 'brute')
    assert is_antichain(cxps.sets) and is_antichain(axps.sets)
    assert minimal_hitting_sets(cxps.sets) == axps.sets
    assert minimal_hitting_sets(axps.sets) == cxps.sets
    if problem.model.kind == 'dt':
        assert enumerate_cxps(problem, 'dt_paths').sets == cxps.sets


def test_no_distinguishable_output():
    problem = flat_regression()
    assert enumerate_cxps(problem).sets == ()
    assert enumerate_axps(problem).sets == (frozenset(),)
    assert enumerate_axps(problem, 'brute').sets == (frozenset(),)
    assert relevant_features(problem) == frozenset()


def test_empty_explanation_only_as_sole_axp():
    with pytest.raises(ArgumentError):
        XpFamily('cxp', (frozenset(),), 2)
    with pytest.raises(ArgumentError):
        XpFamily('axp', (frozenset(), frozenset({1})), 2)
