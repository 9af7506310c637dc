from fractions import Fraction
from math import sqrt

import pytest

from src.adv import compute_weights, cover_count, enumerate_aexs, l0_distance, sample_hits
from src.errors import ArgumentError, MethodError, ResourceError
from src.model import ExplanationProblem
from src.synth import RUNNING_EXAMPLE_AEXS, gadget_dt
from src.xp import enumerate_cxps
from tests.conftest import CORPUS_SEEDS, corpus_problem


def test_l0_distance():
    assert l0_distance((2, 1, 2), (1, 0, 2)) == 2
    assert l0_distance((0, 0), (0, 0)) == 0
    with pytest.raises(ArgumentError):
        l0_distance((0,), (0, 1))


def test_running_example_aexs(running):
    aexs = enumerate_aexs(running)
    assert set(aexs.points) == set(RUNNING_EXAMPLE_AEXS)
    assert len(enumerate_aexs(running, 2)) == 7
    assert len(enumerate_aexs(running, 1)) == 0
    assert len(enumerate_aexs(running, 0)) == 0


def test_gadget_aexs():
    _, problem = gadget_dt(1)
    assert set(enumerate_aexs(problem).points) == {(0, 0, 0), (0, 0, 1), (1, 0, 0)}


def test_running_example_cover(running):
    measures = compute_weights(running, enumerate_cxps(running), 'count')
    assert [w.count for w in measures] == [1, 4, 2]
    assert [w.ratio for w in measures] == [Fraction(1, 6), Fraction(4, 9), Fraction(1, 3)]
    assert [w.weight('ratio') for w in measures] == [Fraction(1, 6), Fraction(4, 9), Fraction(1, 3)]
    assert [w.space for w in measures] == [6, 9, 6]
    assert all(w.ratio * w.space == w.count for w in measures)
    assert all(w.weight('unweighted') == 1 for w in measures)


def test_cover_requires_a_cxp(running):
    with pytest.raises(ArgumentError):
        cover_count(running, {1, 2, 3})
    with pytest.raises(MethodError):
        cover_count(running, {1, 2}, 'dt_restrict')


def test_small_radius_zeroes_the_weight(running):
    narrow = ExplanationProblem.create(running.model, running.v, epsilon=1)
    measure = cover_count(narrow, {1, 2})
    assert measure.count == 0 and measure.truncated


def test_space_cap_applies(running):
    with pytest.raises(ResourceError):
        cover_count(running, {1, 3}, 'brute', cap_space=5)


def test_gadget_counts_on_tree(gadget2):
    measures = compute_weights(gadget2, enumerate_cxps(gadget2), 'count', method='dt_restrict')
    assert [w.count for w in measures] == [1, 1, 1, 1]


def test_sampling_is_reproducible(running):
    Y = frozenset({1, 3})
    assert sample_hits(running, Y, 500, seed=7, index=1) == sample_hits(running, Y, 500, seed=7, index=1)
    measures = compute_weights(running, enumerate_cxps(running), 'sampled', samples=200, seed=3)
    again = compute_weights(running, enumerate_cxps(running), 'sampled', samples=200, seed=3)
    assert [w.sampled_hits for w in measures] == [w.sampled_hits for w in again]
    assert all(w.samples == 200 and w.seed == 3 for w in measures)


def test_sampled_ratio_stays_within_three_sigma(running):
    cxps = enumerate_cxps(running)
    samples = 5000
    inside = total = 0
    for seed in range(100):
        for w in compute_weights(running, cxps, 'sampled', samples=samples, seed=seed):
            p = float(w.ratio)
            sigma = sqrt(p * (1 - p) / samples)
            inside += abs(float(w.sampled_ratio) - p) <= 3 * sigma
            total += 1
    assert inside >= 0.95 * total


def test_sampled_weight_needs_samples(running):
    measure = cover_count(running, {1, 2})
    with pytest.raises(ArgumentError):
        measure.weight('sampled')
    with pytest.raises(ArgumentError):
        compute_weights(running, enumerate_cxps(running), 'sampled', samples=0)


@pytest.mark.parametrize("seed", CORPUS_SEEDS)
def test_tree_count_matches_brute_force(seed):
    problem = corpus_problem(seed)
    if problem.model.kind != 'dt':
        pytest.skip("tabular model")
    for Y in enumerate_cxps(problem):
        fast = cover_count(problem, Y, 'dt_restrict')
        slow = cover_count(problem, Y, 'brute')
        assert fast.count == slow.count


@pytest.mark.parametrize("seed", range(0, 200, 5))
def test_covers_are_disjoint(seed):
    problem = corpus_problem(seed)
    seen = set()
    for Y in enumerate_cxps(problem):
        covered = {x for x in problem.space.neighbourhood(problem.v, Y) if not problem.similar(x)}
        assert len(covered) == cover_count(problem, Y).count
        assert not covered & seen
        assert all(l0_distance(x, problem.v) == len(Y) for x in covered)
        seen |= covered
