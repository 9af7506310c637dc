"""
Abductive and contrastive explanations

WAXp and WCXp are both monotone (supersets of a weak explanation are weak
explanations), so the brute-force enumerators scan subsets by increasing
cardinality and keep every hit that contains no earlier hit.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple

from pysat.examples.hitman import Hitman

from config import config
from src.errors import ArgumentError, MethodError, ResourceError
from src.model import DecisionTree, ExplanationProblem

logger = logging.getLogger(__name__)

FeatureSet = FrozenSet[int]

AXP = 'axp'
CXP = 'cxp'


def canonical(sets: Iterable[Iterable[int]]) -> Tuple[FeatureSet, ...]:
    """Deduplicate and sort a family lexicographically by sorted members"""
    unique = {frozenset(s) for s in sets}
    return tuple(sorted(unique, key=lambda s: tuple(sorted(s))))


def minimal_sets(sets: Iterable[FeatureSet]) -> Tuple[FeatureSet, ...]:
    """Keep only the subset-minimal members of a family"""
    ordered = sorted({frozenset(s) for s in sets}, key=len)
    kept: List[FeatureSet] = []
    for s in ordered:
        if not any(k <= s for k in kept):
            kept.append(s)
    return canonical(kept)


def is_antichain(sets: Sequence[FeatureSet]) -> bool:
    """True iff no member is a subset of another"""
    return all(not (a <= b or b <= a) for a, b in itertools.combinations(sets, 2))


@dataclass(frozen=True)
class XpFamily:
    """All AXps or all CXps of one problem, in canonical order"""

    kind: str
    sets: Tuple[FeatureSet, ...]
    m: int

    def __post_init__(self):
        if self.kind not in (AXP, CXP):
            raise ArgumentError(f"explanation kind must be 'axp' or 'cxp', got {self.kind!r}")
        object.__setattr__(self, 'sets', canonical(self.sets))
        for s in self.sets:
            # The empty AXp occurs alone, when no output is distinguishable.
            if not s and self.kind == AXP and len(self.sets) == 1:
                continue
            if not s or min(s) < 1 or max(s) > self.m:
                raise ArgumentError(f"explanation {sorted(s)} is empty or out of range 1..{self.m}")

    def __len__(self):
        return len(self.sets)

    def __iter__(self):
        return iter(self.sets)

    def containing(self, j: int) -> List[FeatureSet]:
        """Members that contain feature j"""
        return [s for s in self.sets if j in s]

    def features(self) -> FeatureSet:
        return frozenset().union(*self.sets)

    def to_dict(self):
        return {'kind': self.kind, 'sets': [sorted(s) for s in self.sets]}


def _check_space(problem: ExplanationProblem, free: Iterable[int], cap_space: Optional[int]):
    cap = config.CAP_SPACE if cap_space is None else cap_space
    size = problem.space.subspace_size(free)
    if size > cap:
        raise ResourceError(f"free space of {size} points exceeds the cap of {cap}")


def _check_subsets(problem: ExplanationProblem, cap_subsets: Optional[int]):
    cap = config.CAP_SUBSETS if cap_subsets is None else cap_subsets
    if problem.m > cap:
        raise ResourceError(f"subset scan over m={problem.m} features exceeds the cap of m<={cap}")


def _as_set(problem: ExplanationProblem, S: Iterable[int]) -> FeatureSet:
    S = frozenset(S)
    if not S <= problem.features:
        raise ArgumentError(f"features {sorted(S - problem.features)} are outside 1..{problem.m}")
    return S


def is_waxp(problem: ExplanationProblem, S: Iterable[int], cap_space: Optional[int] = None) -> bool:
    """True iff fixing S to the instance values keeps every output similar"""
    S = _as_set(problem, S)
    free = problem.features - S
    _check_space(problem, free, cap_space)
    return all(problem.similar(x) for x in problem.space.neighbourhood(problem.v, free))


def is_wcxp(problem: ExplanationProblem, S: Iterable[int], cap_space: Optional[int] = None) -> bool:
    """True iff freeing S (all else fixed) can produce a distinguishable output"""
    S = _as_set(problem, S)
    _check_space(problem, S, cap_space)
    return any(not problem.similar(x) for x in problem.space.neighbourhood(problem.v, S))


def is_axp(problem: ExplanationProblem, S: Iterable[int], cap_space: Optional[int] = None) -> bool:
    S = _as_set(problem, S)
    return (is_waxp(problem, S, cap_space)
            and all(not is_waxp(problem, S - {i}, cap_space) for i in S))


def is_cxp(problem: ExplanationProblem, S: Iterable[int], cap_space: Optional[int] = None) -> bool:
    S = _as_set(problem, S)
    return (bool(S) and is_wcxp(problem, S, cap_space)
            and all(not is_wcxp(problem, S - {i}, cap_space) for i in S))


def _scan_minimal(problem: ExplanationProblem, predicate, cap_subsets, cap_space) -> Tuple[FeatureSet, ...]:
    _check_subsets(problem, cap_subsets)
    found: List[FeatureSet] = []
    features = sorted(problem.features)
    for size in range(problem.m + 1):
        for combo in itertools.combinations(features, size):
            S = frozenset(combo)
            if any(f <= S for f in found):
                continue
            if predicate(problem, S, cap_space):
                found.append(S)
    return canonical(found)


def _cxps_from_paths(problem: ExplanationProblem) -> Tuple[FeatureSet, ...]:
    tree = problem.model
    candidates = []
    for path in tree.paths:
        if not path.consistent or problem.similar_output(path.value):
            continue
        candidates.append(frozenset(i for i, lit in path.literals.items()
                                    if problem.v[i - 1] not in lit))
    logger.debug(f"{len(candidates)} distinguishable paths out of {len(tree.paths)}")
    return minimal_sets(candidates)


def enumerate_cxps(problem: ExplanationProblem, method: str = 'auto',
                   cap_subsets: Optional[int] = None, cap_space: Optional[int] = None) -> XpFamily:
    """
    Enumerate every CXp of the problem

    Args:
        method: 'brute' scans all subsets, 'dt_paths' reads the CXps off the
            paths of a decision tree, 'auto' picks dt_paths for trees
    """
    if method == 'auto':
        method = 'dt_paths' if isinstance(problem.model, DecisionTree) else 'brute'
    if method == 'brute':
        sets = _scan_minimal(problem, is_wcxp, cap_subsets, cap_space)
    elif method == 'dt_paths':
        if not isinstance(problem.model, DecisionTree):
            raise MethodError("dt_paths enumeration needs a decision tree model")
        sets = _cxps_from_paths(problem)
    else:
        raise MethodError(f"unknown CXp enumeration method {method!r}")
    logger.debug(f"Enumerated {len(sets)} CXps with {method}")
    return XpFamily(CXP, sets, problem.m)


def enumerate_axps(problem: ExplanationProblem, method: str = 'mhs_dual',
                   cap_subsets: Optional[int] = None, cap_space: Optional[int] = None) -> XpFamily:
    """
    Enumerate every AXp of the problem

    Args:
        method: 'brute' scans all subsets, 'mhs_dual' takes the minimal
            hitting sets of the CXps
    """
    if method == 'brute':
        sets = _scan_minimal(problem, is_waxp, cap_subsets, cap_space)
    elif method == 'mhs_dual':
        cxps = enumerate_cxps(problem, 'auto', cap_subsets, cap_space)
        if cxps.sets:
            sets = minimal_hitting_sets(cxps.sets)
        else:
            logger.warning("⚠️ No CXps: every output is similar to the target, the only AXp is empty")
            sets = (frozenset(),)
    else:
        raise MethodError(f"unknown AXp enumeration method {method!r}")
    logger.debug(f"Enumerated {len(sets)} AXps with {method}")
    return XpFamily(AXP, sets, problem.m)


def minimal_hitting_sets(family: Iterable[Iterable[int]]) -> Tuple[FeatureSet, ...]:
    """
    All subset-minimal sets intersecting every member of ``family``

    Hitman returns hitting sets in order of increasing size; blocking each
    one forbids its supersets, so every set returned is subset-minimal.
    """
    family = [sorted(set(s)) for s in family]
    if not family:
        raise ArgumentError("cannot compute hitting sets of an empty family")
    if any(not s for s in family):
        raise ArgumentError("an empty set cannot be hit")

    found = []
    with Hitman(bootstrap_with=family, htype='sorted') as hitman:
        while True:
            hset = hitman.get()
            if hset is None:
                break
            found.append(frozenset(hset))
            hitman.block(hset)
    logger.debug(f"{len(found)} minimal hitting sets of {len(family)} sets")
    return canonical(found)


def relevant_features(problem: ExplanationProblem, cxps: Optional[XpFamily] = None,
                      cap_subsets: Optional[int] = None, cap_space: Optional[int] = None) -> FeatureSet:
    """
    Features occurring in some AXp

    The union of all AXps equals the union of all CXps, so the cheaper CXp
    family is used.
    """
    if cxps is None:
        cxps = enumerate_cxps(problem, 'auto', cap_subsets, cap_space)
    return cxps.features()
