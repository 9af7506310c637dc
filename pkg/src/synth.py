"""
Fixtures and synthetic model families

Everything here is deterministic: the random generators take an explicit
seed and draw from numpy's PCG64.
"""

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Tuple

import numpy as np

from src.adv import compute_weights
from src.errors import ArgumentError, ConstructionError, MethodError
from src.model import (CLASSIFICATION, REGRESSION, DecisionTree, Edge, ExplanationProblem, FeatureSpace,
                       Model, Node, TabularModel, validate_model)
from src.xp import enumerate_cxps

logger = logging.getLogger(__name__)

RUNNING_EXAMPLE_AEXS = ((1, 0, 2), (0, 1, 0), (0, 1, 1), (1, 1, 0), (1, 1, 1), (2, 0, 0), (2, 0, 1))
REGRESSION_OUTPUTS = (Fraction(0), Fraction(1, 5), Fraction(3, 5), Fraction(1))
MAX_ATTEMPTS = 20


def gadget_dt(k: int) -> Tuple[DecisionTree, ExplanationProblem]:
    """
    Chain of k three-feature gadgets over binary features

    Gadget i tests x_{2i-1}, x_{2i} and y_i (feature 2k+i):
    x_{2i-1}=0 gives class x_{2i}; x_{2i-1}=1, x_{2i}=0 gives class y_i;
    x_{2i-1}=x_{2i}=1 moves on to gadget i+1, or class 1 after the last one.
    The instance is all ones.
    """
    if k < 1:
        raise ArgumentError("gadget count k must be >= 1")
    m = 3 * k
    nodes: Dict[str, Node] = {}
    leaves: Dict[str, int] = {}
    counter = itertools.count()

    def leaf(value):
        name = f"leaf{next(counter)}"
        leaves[name] = value
        return name

    def split(feature, on_zero, on_one):
        return Node(feature, (Edge(frozenset({0}), on_zero), Edge(frozenset({1}), on_one)))

    for i in range(k, 0, -1):
        onward = f"g{i + 1}" if i < k else leaf(1)
        nodes[f"y{i}"] = split(2 * k + i, leaf(0), leaf(1))
        nodes[f"g{i}_free"] = split(2 * i, leaf(0), leaf(1))
        nodes[f"g{i}_set"] = split(2 * i, f"y{i}", onward)
        nodes[f"g{i}"] = split(2 * i - 1, f"g{i}_free", f"g{i}_set")

    tree = DecisionTree(FeatureSpace(((0, 1),) * m), CLASSIFICATION, "g1", nodes, leaves)
    return tree, ExplanationProblem.create(tree, (1,) * m)


def running_example() -> Tuple[TabularModel, ExplanationProblem]:
    """
    Three-feature classifier with instance ((2,1,2), 1)

    Class 0 exactly at seven adversarial points, class 1 elsewhere. The
    construction is checked against its known CXps and cover counts.
    """
    space = FeatureSpace(((0, 1, 2), (0, 1), (0, 1, 2)))
    table = {x: 0 if x in RUNNING_EXAMPLE_AEXS else 1 for x in space.points()}
    model = TabularModel(space, CLASSIFICATION, table)
    problem = ExplanationProblem.create(model, (2, 1, 2))

    cxps = enumerate_cxps(problem, 'brute')
    counts = [w.count for w in compute_weights(problem, cxps, 'count')]
    expected = (frozenset({1, 2}), frozenset({1, 3}), frozenset({2, 3}))
    if cxps.sets != expected or counts != [1, 4, 2]:
        raise ConstructionError(f"running example self-check failed: CXps {cxps.to_dict()['sets']}, counts {counts}")
    return model, problem


@dataclass(frozen=True)
class RandomSpec:
    """
    Shape of a random problem; ``domain_sizes`` defaults to binary features

    Binary classifiers put class 1 at a leaf with probability ``leaf_bias``;
    with more classes every label is equally likely.
    """

    m: int = 6
    domain_sizes: Optional[Tuple[int, ...]] = None
    model_kind: str = 'dt'
    leaf_bias: float = 0.5
    task: str = CLASSIFICATION
    max_depth: Optional[int] = None
    delta: Fraction = Fraction(1, 5)
    num_classes: int = 2

    def domains(self) -> Tuple[Tuple[int, ...], ...]:
        sizes = self.domain_sizes or (2,) * self.m
        if len(sizes) != self.m or any(s < 1 for s in sizes):
            raise ArgumentError(f"need {self.m} positive domain sizes, got {sizes}")
        return tuple(tuple(range(s)) for s in sizes)


def _random_output(rng, spec: RandomSpec):
    if spec.task == REGRESSION:
        return REGRESSION_OUTPUTS[rng.integers(len(REGRESSION_OUTPUTS))]
    if spec.num_classes > 2:
        return int(rng.integers(spec.num_classes))
    return int(rng.random() < spec.leaf_bias)


def _random_tree(rng, spec: RandomSpec, space: FeatureSpace) -> DecisionTree:
    max_depth = spec.m if spec.max_depth is None else spec.max_depth
    nodes, leaves = {}, {}
    counter = itertools.count()

    def grow(domains, depth):
        name = next(counter)
        splittable = [i for i in space.features if len(domains[i]) > 1]
        if not splittable or depth >= max_depth or (depth > 0 and rng.random() < 0.2):
            leaves[name] = _random_output(rng, spec)
            return name
        feature = splittable[rng.integers(len(splittable))]
        values = rng.permutation(sorted(domains[feature]))
        blocks = int(rng.integers(2, len(values) + 1))
        cuts = sorted(rng.choice(np.arange(1, len(values)), size=blocks - 1, replace=False))
        edges = []
        for block in np.split(values, cuts):
            part = frozenset(int(x) for x in block)
            edges.append(Edge(part, grow({**domains, feature: part}, depth + 1)))
        nodes[name] = Node(feature, tuple(edges))
        return name

    root = grow({i: frozenset(space.domain(i)) for i in space.features}, 0)
    return DecisionTree(space, spec.task, root, nodes, leaves)


def random_problem(spec: RandomSpec, seed: int) -> Tuple[Model, ExplanationProblem]:
    """Deterministic non-constant random model with a uniformly drawn instance"""
    if spec.model_kind not in ('dt', 'tabular'):
        raise ArgumentError(f"model kind must be 'dt' or 'tabular', got {spec.model_kind!r}")
    if spec.num_classes < 2:
        raise ArgumentError(f"need at least two classes, got {spec.num_classes}")
    rng = np.random.default_rng(seed)
    space = FeatureSpace(spec.domains())
    for attempt in range(MAX_ATTEMPTS):
        if spec.model_kind == 'dt':
            model = _random_tree(rng, spec, space)
        else:
            model = TabularModel(space, spec.task, {x: _random_output(rng, spec) for x in space.points()})
        if validate_model(model):
            logger.debug(f"Discarding degenerate model (attempt {attempt + 1})")
            continue
        v = tuple(int(d[rng.integers(len(d))]) for d in space.domains)
        delta = spec.delta if spec.task == REGRESSION else 0
        problem = ExplanationProblem.create(model, v, delta=delta)
        if all(problem.similar_output(y) for y in model.outputs()):
            logger.debug(f"Discarding model with no distinguishable output (attempt {attempt + 1})")
            continue
        return model, problem
    raise ArgumentError(f"no non-constant model after {MAX_ATTEMPTS} attempts (seed {seed})")


def relabel_outputs(model: Model, mapping: Dict[int, int]) -> Model:
    """Apply a bijection to the class labels of a classifier"""
    if model.task != CLASSIFICATION:
        raise MethodError("only classification outputs can be relabelled")
    labels = set(model.table.values()) if isinstance(model, TabularModel) else set(model.leaves.values())
    missing = labels - set(mapping)
    if missing:
        raise ArgumentError(f"mapping does not cover classes {sorted(missing)}")
    if len({mapping[c] for c in labels}) != len(labels):
        raise ArgumentError("mapping is not a bijection on the class set")
    if isinstance(model, TabularModel):
        return TabularModel(model.space, model.task, {x: mapping[y] for x, y in model.table.items()})
    return DecisionTree(model.space, model.task, model.root, model.nodes,
                        {leaf: mapping[y] for leaf, y in model.leaves.items()})


def relabel_problem(problem: ExplanationProblem, mapping: Dict[int, int]) -> ExplanationProblem:
    """Relabel the model and move the target class along with it"""
    model = relabel_outputs(problem.model, mapping)
    return ExplanationProblem(model, problem.v, mapping[problem.q], problem.delta, problem.epsilon)
