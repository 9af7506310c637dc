import pytest

from src.errors import ArgumentError, MethodError
from src.model import REGRESSION, validate_model
from src.synth import RandomSpec, gadget_dt, random_problem, relabel_outputs, relabel_problem, running_example
from src.xp import enumerate_cxps


def test_running_example_self_check_passes():
    model, problem = running_example()
    assert problem.v == (2, 1, 2)
    assert sum(1 for x in model.space.points() if model.evaluate(x) == 0) == 7


@pytest.mark.parametrize("k", [1, 3, 6])
def test_gadget_tree_is_valid(k):
    tree, problem = gadget_dt(k)
    assert validate_model(tree) == []
    assert problem.m == 3 * k
    assert problem.v == (1,) * (3 * k)
    assert problem.q == 1
    assert len(tree.paths) == 4 * k + 1


def test_gadget_needs_positive_k():
    with pytest.raises(ArgumentError):
        gadget_dt(0)


@pytest.mark.parametrize("kind", ['dt', 'tabular'])
def test_random_problems_are_deterministic(kind):
    spec = RandomSpec(m=5, domain_sizes=(2, 3, 2, 3, 2), model_kind=kind)
    first, _ = random_problem(spec, seed=42)
    second, _ = random_problem(spec, seed=42)
    assert first == second
    assert validate_model(first) == []


def test_random_regression_problem():
    spec = RandomSpec(m=4, task=REGRESSION)
    model, problem = random_problem(spec, seed=9)
    assert model.task == REGRESSION
    assert problem.delta == spec.delta
    assert len(enumerate_cxps(problem)) >= 1


def test_random_spec_checks_domain_sizes():
    with pytest.raises(ArgumentError):
        random_problem(RandomSpec(m=3, domain_sizes=(2, 2)), seed=0)
    with pytest.raises(ArgumentError):
        random_problem(RandomSpec(model_kind='forest'), seed=0)


def test_relabel_keeps_explanations(running):
    swapped = relabel_problem(running, {0: 1, 1: 0})
    assert swapped.q == 0
    assert enumerate_cxps(swapped).sets == enumerate_cxps(running).sets


def test_relabel_needs_a_bijection(running):
    with pytest.raises(ArgumentError):
        relabel_outputs(running.model, {0: 1, 1: 1})
    with pytest.raises(ArgumentError):
        relabel_outputs(running.model, {0: 1})


def test_relabel_refuses_regression():
    model, _ = random_problem(RandomSpec(m=3, task=REGRESSION), seed=1)
    with pytest.raises(MethodError):
        relabel_outputs(model, {})


@pytest.mark.parametrize("seed", range(10))
def test_three_class_cyclic_relabel_keeps_cxps(seed):
    spec = RandomSpec(m=4, domain_sizes=(2, 3, 2, 3), num_classes=3)
    model, problem = random_problem(spec, seed)
    labels = set(model.leaves.values())
    assert labels <= {0, 1, 2}
    shifted = relabel_problem(problem, {0: 1, 1: 2, 2: 0})
    assert shifted.q == (problem.q + 1) % 3
    assert enumerate_cxps(shifted).sets == enumerate_cxps(problem).sets


def test_three_classes_appear():
    spec = RandomSpec(m=5, model_kind='tabular', num_classes=3)
    model, _ = random_problem(spec, seed=0)
    assert model.outputs() == {0, 1, 2}


def test_class_count_must_be_at_least_two():
    with pytest.raises(ArgumentError):
        random_problem(RandomSpec(num_classes=1), seed=0)
