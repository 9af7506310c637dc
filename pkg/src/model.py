"""
Feature spaces, models and explanation problems

Features are numbered 1..m everywhere a feature index is visible; a point
is a plain tuple whose position i-1 holds the value of feature i.
"""

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from operator import mul
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Tuple, Union

from src.errors import ArgumentError, DomainError

logger = logging.getLogger(__name__)

CLASSIFICATION = 'classification'
REGRESSION = 'regression'
TASKS = (CLASSIFICATION, REGRESSION)

Point = Tuple[int, ...]
Output = Union[int, Fraction]


def _product(values: Iterable[int]) -> int:
    return reduce(mul, values, 1)


@dataclass(frozen=True)
class FeatureSpace:
    """Finite product space D_1 x ... x D_m"""

    domains: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        domains = tuple(tuple(sorted(set(d))) for d in self.domains)
        if not domains:
            raise ArgumentError("feature space needs at least one feature")
        for i, d in enumerate(domains, start=1):
            if not d:
                raise ArgumentError(f"domain of feature {i} is empty")
        object.__setattr__(self, 'domains', domains)

    @property
    def m(self) -> int:
        return len(self.domains)

    @property
    def features(self) -> range:
        return range(1, self.m + 1)

    def domain(self, i: int) -> Tuple[int, ...]:
        if not 1 <= i <= self.m:
            raise ArgumentError(f"feature index {i} outside 1..{self.m}")
        return self.domains[i - 1]

    @property
    def size(self) -> int:
        return _product(len(d) for d in self.domains)

    def subspace_size(self, free: Iterable[int]) -> int:
        """Number of points obtained by varying only the ``free`` features"""
        return _product(len(self.domain(i)) for i in free)

    def contains(self, point) -> bool:
        return (len(point) == self.m
                and all(x in d for x, d in zip(point, self.domains)))

    def check(self, point) -> Point:
        point = tuple(point)
        if len(point) != self.m:
            raise DomainError(f"point {point} has {len(point)} values, expected {self.m}")
        for i, (x, d) in enumerate(zip(point, self.domains), start=1):
            if x not in d:
                raise DomainError(f"value {x} of feature {i} is outside its domain {list(d)}")
        return point

    def points(self) -> Iterator[Point]:
        return itertools.product(*self.domains)

    def neighbourhood(self, v: Point, free: Iterable[int]) -> Iterator[Point]:
        """All points equal to ``v`` outside ``free``, in lexicographic order"""
        free = set(free)
        axes = [d if i in free else (x,) for i, (x, d) in enumerate(zip(v, self.domains), start=1)]
        return itertools.product(*axes)


@dataclass(frozen=True)
class TabularModel:
    """Model given as an explicit table over the whole feature space"""

    space: FeatureSpace
    task: str
    table: Dict[Point, Output] = field(compare=True)

    kind = 'tabular'

    def evaluate(self, point) -> Output:
        point = self.space.check(point)
        try:
            return self.table[point]
        except KeyError:
            raise DomainError(f"no table entry for point {point}") from None

    def outputs(self) -> set:
        return set(self.table.values())


@dataclass(frozen=True)
class Edge:
    values: FrozenSet[int]
    child: object


@dataclass(frozen=True)
class Node:
    feature: int
    edges: Tuple[Edge, ...]


@dataclass(frozen=True)
class TreePath:
    """Root-to-leaf path with the effective literal of every tested feature"""

    leaf: object
    value: Output
    literals: Dict[int, FrozenSet[int]]

    @property
    def consistent(self) -> bool:
        return all(self.literals.values())

    def admits(self, i: int, x: int) -> bool:
        return i not in self.literals or x in self.literals[i]


@dataclass(frozen=True)
class DecisionTree:
    """Multi-way decision tree whose edges carry explicit value sets"""

    space: FeatureSpace
    task: str
    root: object
    nodes: Dict[object, Node]
    leaves: Dict[object, Output]

    kind = 'dt'

    def evaluate(self, point) -> Output:
        point = self.space.check(point)
        current = self.root
        for _ in range(len(self.nodes) + 1):
            if current in self.leaves:
                return self.leaves[current]
            node = self.nodes.get(current)
            if node is None:
                raise DomainError(f"tree references missing node {current!r}")
            x = point[node.feature - 1]
            for edge in node.edges:
                if x in edge.values:
                    current = edge.child
                    break
            else:
                raise DomainError(f"no edge at node {current!r} for feature {node.feature} = {x}")
        raise DomainError("tree contains a cycle")

    @cached_property
    def paths(self) -> List[TreePath]:
        """Every root-to-leaf path; literals are intersected along the path"""
        found = []
        stack = [(self.root, {})]
        while stack:
            current, literals = stack.pop()
            if current in self.leaves:
                found.append(TreePath(current, self.leaves[current], literals))
                continue
            node = self.nodes[current]
            domain = literals.get(node.feature, frozenset(self.space.domain(node.feature)))
            for edge in reversed(node.edges):
                narrowed = dict(literals)
                narrowed[node.feature] = domain & edge.values
                stack.append((edge.child, narrowed))
        return found

    def outputs(self) -> set:
        return {p.value for p in self.paths if p.consistent}

    def to_tabular(self) -> TabularModel:
        """Exhaustive expansion of the tree into a table"""
        table = {point: self.evaluate(point) for point in self.space.points()}
        return TabularModel(self.space, self.task, table)


Model = Union[TabularModel, DecisionTree]


def validate_model(model: Model) -> List[str]:
    """
    Check the structural invariants of a model

    Returns:
        list of human-readable violations, empty when the model is sound
    """
    issues = []
    if model.task not in TASKS:
        issues.append(f"unknown task {model.task!r}")

    if isinstance(model, TabularModel):
        outside = [p for p in model.table if not model.space.contains(p)]
        if outside:
            issues.append(f"table has {len(outside)} rows outside the feature space, e.g. {outside[0]}")
        missing = model.space.size - (len(model.table) - len(outside))
        if missing:
            first = next(p for p in model.space.points() if p not in model.table)
            issues.append(f"table is not total: {missing} points missing, e.g. {first}")
        if len(model.outputs()) <= 1:
            issues.append("model is constant")
        return issues

    issues.extend(_validate_tree(model))
    if not issues and len(model.outputs()) <= 1:
        issues.append("model is constant")
    return issues


def _validate_tree(tree: DecisionTree) -> List[str]:
    """
    Walk every root-to-leaf path of the tree

    Nodes and leaves may be shared between parents; a node may not be its
    own ancestor. Literal coverage is checked against the domain narrowed
    along each incoming path.
    """
    issues = []

    def report(issue):
        if issue not in issues:
            issues.append(issue)

    if tree.root not in tree.nodes and tree.root not in tree.leaves:
        return [f"root {tree.root!r} is neither a node nor a leaf"]

    seen = set()
    stack = [(tree.root, {}, frozenset())]
    while stack:
        current, domains, ancestors = stack.pop()
        if current in ancestors:
            report(f"cycle through node {current!r}")
            continue
        seen.add(current)
        if current in tree.leaves:
            continue
        node = tree.nodes.get(current)
        if node is None:
            report(f"edge points to missing node {current!r}")
            continue
        if not 1 <= node.feature <= tree.space.m:
            report(f"node {current!r} tests unknown feature {node.feature}")
            continue

        full = frozenset(tree.space.domain(node.feature))
        domain = domains.get(node.feature, full)
        stray = set().union(*(e.values for e in node.edges)) - full
        if stray:
            report(f"literal values outside domain at node {current!r}: {sorted(stray)}")

        covered = set()
        for edge in node.edges:
            part = edge.values & domain
            overlap = covered & part
            if overlap:
                report(f"overlapping literals at node {current!r}: "
                       f"feature {node.feature} values {sorted(overlap)}")
            covered |= part
            narrowed = dict(domains)
            narrowed[node.feature] = part
            stack.append((edge.child, narrowed, ancestors | {current}))

        missing = domain - covered
        if missing:
            report(f"missing literals at node {current!r}: "
                   f"feature {node.feature} values {sorted(missing)}")

    unreachable = (set(tree.nodes) | set(tree.leaves)) - seen
    if unreachable:
        issues.append(f"{len(unreachable)} nodes or leaves are unreachable from the root")
    return issues


@dataclass(frozen=True)
class ExplanationProblem:
    """
    Explanation problem E = (M, (v, q)) with its similarity threshold

    ``delta`` is the regression tolerance (0 for classification) and
    ``epsilon`` the l0 radius used for adversarial examples (None means m).
    """

    model: Model
    v: Point
    q: Output
    delta: Fraction = Fraction(0)
    epsilon: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, 'v', self.model.space.check(self.v))
        object.__setattr__(self, 'delta', Fraction(self.delta))
        actual = self.model.evaluate(self.v)
        if actual != self.q:
            raise ArgumentError(f"target output {self.q} differs from model output {actual} at {self.v}")
        if self.delta < 0:
            raise ArgumentError("delta must be nonnegative")
        if self.model.task == CLASSIFICATION and self.delta != 0:
            raise ArgumentError("delta must be 0 for classification models")
        if self.epsilon is not None and self.epsilon < 0:
            raise ArgumentError("epsilon must be nonnegative")

    @classmethod
    def create(cls, model: Model, point, delta=0, epsilon: Optional[int] = None):
        """Build a problem whose target output is the model's own prediction"""
        point = model.space.check(point)
        return cls(model, point, model.evaluate(point), Fraction(delta), epsilon)

    @property
    def space(self) -> FeatureSpace:
        return self.model.space

    @property
    def m(self) -> int:
        return self.model.space.m

    @property
    def features(self) -> FrozenSet[int]:
        return frozenset(self.model.space.features)

    @property
    def radius(self) -> int:
        return self.m if self.epsilon is None else self.epsilon

    def similar_output(self, value: Output) -> bool:
        if self.model.task == CLASSIFICATION:
            return value == self.q
        return abs(Fraction(value) - Fraction(self.q)) <= self.delta

    def similar(self, point) -> bool:
        """Similarity predicate: same class, or output within delta"""
        return self.similar_output(self.model.evaluate(point))
