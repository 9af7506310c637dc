"""
Adversarial examples and the AEx cover of each CXp
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Tuple

import numpy as np

from config import WEIGHT_MODES, config
from src.errors import ArgumentError, MethodError, ResourceError
from src.model import DecisionTree, ExplanationProblem, Point
from src.storage import fraction_to_str
from src.xp import FeatureSet, XpFamily, is_cxp

logger = logging.getLogger(__name__)


def l0_distance(x: Iterable[int], y: Iterable[int]) -> int:
    """Number of coordinates where the two points differ"""
    x, y = tuple(x), tuple(y)
    if len(x) != len(y):
        raise ArgumentError(f"points have different arity: {len(x)} vs {len(y)}")
    return sum(a != b for a, b in zip(x, y))


@dataclass(frozen=True)
class AexSet:
    points: Tuple[Point, ...]
    epsilon: int

    def __len__(self):
        return len(self.points)

    def __contains__(self, point):
        return tuple(point) in self.points


def enumerate_aexs(problem: ExplanationProblem, epsilon: Optional[int] = None,
                   cap_space: Optional[int] = None) -> AexSet:
    """All points within l0 radius epsilon of v whose output is distinguishable"""
    epsilon = problem.radius if epsilon is None else epsilon
    if epsilon < 0:
        raise ArgumentError("epsilon must be nonnegative")
    cap = config.CAP_SPACE if cap_space is None else cap_space
    if problem.space.size > cap:
        raise ResourceError(f"feature space of {problem.space.size} points exceeds the cap of {cap}")
    points = tuple(x for x in problem.space.points()
                   if l0_distance(x, problem.v) <= epsilon and not problem.similar(x))
    logger.debug(f"Found {len(points)} AExs within radius {epsilon}")
    return AexSet(points, epsilon)


@dataclass(frozen=True)
class CoverMeasure:
    """How many AExs one CXp covers, exactly and optionally by sampling"""

    cxp: FeatureSet
    count: int
    space: int
    sampled_hits: Optional[int] = None
    samples: Optional[int] = None
    seed: Optional[int] = None
    truncated: bool = False

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.count, self.space)

    @property
    def sampled_ratio(self) -> Optional[Fraction]:
        if self.samples is None:
            return None
        return Fraction(self.sampled_hits, self.samples)

    def weight(self, mode: str) -> Fraction:
        """Weight of the CXp under one of the weight modes"""
        if mode == 'count':
            return Fraction(self.count)
        if mode == 'ratio':
            return self.ratio
        if mode == 'sampled':
            if self.samples is None:
                raise ArgumentError(f"no sampled weight recorded for CXp {sorted(self.cxp)}")
            return self.sampled_ratio
        if mode == 'unweighted':
            return Fraction(1)
        raise ArgumentError(f"unknown weight mode {mode!r}")

    def to_dict(self):
        doc = {'cxp': sorted(self.cxp), 'count': str(self.count), 'ratio': fraction_to_str(self.ratio)}
        if self.samples is not None:
            doc['sampled'] = {'ratio': fraction_to_str(self.sampled_ratio),
                              'samples': self.samples, 'seed': self.seed}
        if self.truncated:
            doc['truncated'] = True
        return doc


def _count_brute(problem: ExplanationProblem, Y: FeatureSet, cap_space: Optional[int]) -> int:
    cap = config.CAP_SPACE if cap_space is None else cap_space
    size = problem.space.subspace_size(Y)
    if size > cap:
        raise ResourceError(f"restricted space of {size} points exceeds the cap of {cap}")
    return sum(not problem.similar(x) for x in problem.space.neighbourhood(problem.v, Y))


def _count_tree(problem: ExplanationProblem, Y: FeatureSet) -> int:
    """
    Count distinguishable points of the Y-restricted space path by path

    Paths partition the feature space, so the surviving distinguishable
    paths partition the distinguishable part of the restricted space.
    """
    tree = problem.model
    total = 0
    for path in tree.paths:
        if not path.consistent or problem.similar_output(path.value):
            continue
        fixed = problem.features - Y
        if not all(path.admits(i, problem.v[i - 1]) for i in fixed):
            continue
        points = 1
        for i in Y:
            points *= len(path.literals[i]) if i in path.literals else len(problem.space.domain(i))
        total += points
    return total


def cover_count(problem: ExplanationProblem, Y: Iterable[int], method: str = 'auto',
                check: bool = True, cap_space: Optional[int] = None) -> CoverMeasure:
    """
    Number of AExs covered by CXp Y

    Args:
        method: 'brute' scans the Y-restricted space, 'dt_restrict' counts on
            the tree paths, 'auto' picks dt_restrict for trees
        check: confirm first that Y really is a CXp
    """
    Y = frozenset(Y)
    if method == 'auto':
        method = 'dt_restrict' if isinstance(problem.model, DecisionTree) else 'brute'
    if method not in ('brute', 'dt_restrict'):
        raise MethodError(f"unknown cover counting method {method!r}")
    if method == 'dt_restrict' and not isinstance(problem.model, DecisionTree):
        raise MethodError("dt_restrict counting needs a decision tree model")
    if check and not is_cxp(problem, Y, cap_space):
        raise ArgumentError(f"{sorted(Y)} is not a CXp of the problem")

    space = problem.space.subspace_size(Y)
    if problem.radius < len(Y):
        logger.warning(f"⚠️ epsilon={problem.radius} is below |Y|={len(Y)}; weight of {sorted(Y)} set to 0")
        return CoverMeasure(Y, 0, space, truncated=True)

    if method == 'brute':
        count = _count_brute(problem, Y, cap_space)
    else:
        count = _count_tree(problem, Y)
    return CoverMeasure(Y, count, space)


def sample_hits(problem: ExplanationProblem, Y: FeatureSet, samples: int, seed: int, index: int) -> int:
    """
    Distinguishable hits among uniform draws from the Y-restricted space

    Each CXp gets its own PCG64 stream derived from (seed, index).
    """
    rng = np.random.default_rng(np.random.SeedSequence((seed, index)))
    features = sorted(Y)
    draws = {i: rng.integers(0, len(problem.space.domain(i)), size=samples) for i in features}
    hits = 0
    base = list(problem.v)
    for k in range(samples):
        point = list(base)
        for i in features:
            point[i - 1] = problem.space.domain(i)[draws[i][k]]
        hits += not problem.similar(point)
    return hits


def compute_weights(problem: ExplanationProblem, cxps: XpFamily, mode: str = 'count',
                    samples: Optional[int] = None, seed: Optional[int] = None,
                    method: str = 'auto', cap_space: Optional[int] = None) -> List[CoverMeasure]:
    """One cover measure per CXp, in the family's canonical order"""
    if mode not in WEIGHT_MODES:
        raise ArgumentError(f"weight mode must be one of {WEIGHT_MODES}, got {mode!r}")
    samples = config.SAMPLES if samples is None else samples
    seed = config.SEED if seed is None else seed
    if mode == 'sampled' and samples < 1:
        raise ArgumentError("sampled weights need at least one sample")

    measures = []
    for index, Y in enumerate(cxps.sets):
        measure = cover_count(problem, Y, method, check=False, cap_space=cap_space)
        if mode == 'sampled':
            hits = 0 if measure.truncated else sample_hits(problem, Y, samples, seed, index)
            measure = CoverMeasure(Y, measure.count, measure.space, hits, samples, seed, measure.truncated)
        logger.debug(f"CXp {sorted(Y)}: {measure.count}/{measure.space} AExs")
        measures.append(measure)
    return measures
