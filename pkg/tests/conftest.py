"""Shared fixtures: the running example, gadget trees and a seeded random corpus"""

import pytest

from src.synth import RandomSpec, gadget_dt, random_problem, running_example

CORPUS_SEEDS = range(200)


def corpus_spec(seed: int) -> RandomSpec:
    """Vary size, domains, model kind and task with the seed"""
    m = 3 + seed % 4
    sizes = tuple(2 + (seed + i) % 2 for i in range(m))
    kind = 'tabular' if seed % 3 == 0 else 'dt'
    task = 'regression' if seed % 7 == 0 else 'classification'
    classes = 3 if seed % 5 == 1 else 2
    return RandomSpec(m=m, domain_sizes=sizes, model_kind=kind, task=task, leaf_bias=0.5, num_classes=classes)


def corpus_problem(seed: int):
    return random_problem(corpus_spec(seed), seed)[1]


@pytest.fixture(scope='session')
def running():
    return running_example()[1]


@pytest.fixture(scope='session')
def gadget2():
    return gadget_dt(2)[1]
