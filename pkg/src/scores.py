"""
Feature importance scores

AxFi scores are the Shapley and Banzhaf values of the CXp-Forest's
characteristic function, evaluated in closed form. The exhaustive engines
evaluate the power-index sums directly for any set function and serve as an
oracle; FFA, WFFA, Responsibility, Deegan-Packel and exact SHAP are the
baselines.
"""

import itertools
import logging
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction
from math import factorial
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Tuple

import numpy as np
import pandas as pd

from config import config
from src.errors import ArgumentError, ResourceError
from src.forest import CXpForest
from src.model import CLASSIFICATION, ExplanationProblem
from src.storage import fraction_to_str, parse_fraction
from src.xp import XpFamily, relevant_features

logger = logging.getLogger(__name__)

AXFI_SHAPLEY = 'axfi_shapley'
AXFI_BANZHAF = 'axfi_banzhaf'
SHAPLEY_EXHAUSTIVE = 'shapley_exhaustive'
BANZHAF_EXHAUSTIVE = 'banzhaf_exhaustive'
FFA = 'ffa'
WFFA = 'wffa'
RESPONSIBILITY = 'responsibility'
DEEGAN_PACKEL_CXP = 'deegan_packel_cxp'
SHAP_EXACT = 'shap_exact'

METHODS = (AXFI_SHAPLEY, AXFI_BANZHAF, SHAPLEY_EXHAUSTIVE, BANZHAF_EXHAUSTIVE,
           FFA, WFFA, RESPONSIBILITY, DEEGAN_PACKEL_CXP, SHAP_EXACT)

CharFunction = Callable[[FrozenSet[int]], object]


def render_decimal(value, places: Optional[int] = None) -> float:
    """Round half-even to ``places`` decimals for display"""
    places = config.DECIMAL_PLACES if places is None else places
    value = Fraction(value)
    with localcontext() as ctx:
        ctx.prec = 60
        exact = Decimal(value.numerator) / Decimal(value.denominator)
        return float(exact.quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_EVEN))


@dataclass(frozen=True)
class ScoreVector:
    """Exact per-feature scores of one method; values[0] belongs to feature 1"""

    method: str
    values: Tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, 'values', tuple(Fraction(v) for v in self.values))

    @property
    def m(self) -> int:
        return len(self.values)

    def __getitem__(self, j: int) -> Fraction:
        return self.values[j - 1]

    def total(self) -> Fraction:
        return sum(self.values, Fraction(0))

    def to_dict(self, places: Optional[int] = None):
        return {'method': self.method,
                'values': [fraction_to_str(v) for v in self.values],
                'decimal': [render_decimal(v, places) for v in self.values]}

    def to_frame(self, places: Optional[int] = None) -> pd.DataFrame:
        return scores_table([self], places)

    @classmethod
    def from_dict(cls, doc) -> 'ScoreVector':
        return cls(doc['method'], tuple(parse_fraction(v) for v in doc['values']))


def scores_table(vectors: Iterable[ScoreVector], places: Optional[int] = None) -> pd.DataFrame:
    """Feature-by-method table of rounded scores"""
    vectors = list(vectors)
    table = pd.DataFrame({v.method: [render_decimal(x, places) for x in v.values] for v in vectors})
    table.index = pd.RangeIndex(1, len(table) + 1, name='feature')
    return table


def _check_exhaustive(m: int, cap_exhaustive: Optional[int]):
    cap = config.CAP_EXHAUSTIVE if cap_exhaustive is None else cap_exhaustive
    if m > cap:
        raise ResourceError(f"exhaustive power index over m={m} features exceeds the cap of m<={cap}")


def _power_index(char: CharFunction, m: int, coefficient: Callable[[int], Fraction],
                 method: str, cap_exhaustive: Optional[int]) -> ScoreVector:
    _check_exhaustive(m, cap_exhaustive)
    features = range(1, m + 1)
    value = {}
    for size in range(m + 1):
        for combo in itertools.combinations(features, size):
            S = frozenset(combo)
            value[S] = Fraction(char(S))

    scores = []
    for i in features:
        total = Fraction(0)
        for S, v in value.items():
            if i not in S:
                total += coefficient(len(S)) * (value[S | {i}] - v)
        scores.append(total)
    return ScoreVector(method, tuple(scores))


def shapley_exhaustive(char: CharFunction, m: int, cap_exhaustive: Optional[int] = None,
                       method: str = SHAPLEY_EXHAUSTIVE) -> ScoreVector:
    """Shapley value of every feature by summing over all coalitions"""
    def coefficient(s):
        return Fraction(factorial(s) * factorial(m - s - 1), factorial(m))
    return _power_index(char, m, coefficient, method, cap_exhaustive)


def banzhaf_exhaustive(char: CharFunction, m: int, cap_exhaustive: Optional[int] = None,
                       method: str = BANZHAF_EXHAUSTIVE) -> ScoreVector:
    """Banzhaf index of every feature by summing over all coalitions"""
    uniform = Fraction(1, 2 ** (m - 1))
    return _power_index(char, m, lambda s: uniform, method, cap_exhaustive)


def axfi_shapley(forest: CXpForest) -> ScoreVector:
    """Each CXp's weight is shared equally among its members"""
    scores = [Fraction(0)] * forest.m
    for y, w in zip(forest.cxps, forest.weights):
        for j in y:
            scores[j - 1] += w / len(y)
    return ScoreVector(AXFI_SHAPLEY, tuple(s / forest.n for s in scores))


def axfi_banzhaf(forest: CXpForest) -> ScoreVector:
    """Each CXp gives every member its weight halved once per other member"""
    scores = [Fraction(0)] * forest.m
    for y, w in zip(forest.cxps, forest.weights):
        for j in y:
            scores[j - 1] += w / 2 ** (len(y) - 1)
    return ScoreVector(AXFI_BANZHAF, tuple(s / forest.n for s in scores))


def gamma(forest: CXpForest) -> Fraction:
    """Constant the Banzhaf-like scores always sum to"""
    total = sum((w * len(y) / 2 ** (len(y) - 1) for y, w in zip(forest.cxps, forest.weights)), Fraction(0))
    return total / forest.n


def _require(family: XpFamily, kind: str):
    if family.kind != kind:
        raise ArgumentError(f"expected a {kind} family, got {family.kind}")
    if not len(family):
        raise ArgumentError(f"{kind} family is empty")


def ffa(axps: XpFamily) -> ScoreVector:
    """Fraction of AXps containing each feature"""
    _require(axps, 'axp')
    total = len(axps)
    return ScoreVector(FFA, tuple(Fraction(len(axps.containing(j)), total) for j in range(1, axps.m + 1)))


def wffa(axps: XpFamily) -> ScoreVector:
    """Like FFA, but an AXp of size k counts 1/k towards each of its members"""
    _require(axps, 'axp')
    total = len(axps)
    return ScoreVector(WFFA, tuple(sum((Fraction(1, len(s) * total) for s in axps.containing(j)), Fraction(0))
                                   for j in range(1, axps.m + 1)))


def responsibility(axps: XpFamily) -> ScoreVector:
    """1 / size of the smallest AXp containing the feature, 0 when there is none"""
    _require(axps, 'axp')
    values = []
    for j in range(1, axps.m + 1):
        sizes = [len(s) for s in axps.containing(j)]
        values.append(Fraction(1, min(sizes)) if sizes else Fraction(0))
    return ScoreVector(RESPONSIBILITY, tuple(values))


def deegan_packel_cxp(cxps: XpFamily) -> ScoreVector:
    """Deegan-Packel index over the CXps: each CXp splits one unit among its members"""
    _require(cxps, 'cxp')
    n = len(cxps)
    return ScoreVector(DEEGAN_PACKEL_CXP, tuple(sum((Fraction(1, len(y)) for y in cxps.containing(j)), Fraction(0)) / n
                                                for j in range(1, cxps.m + 1)))


def expected_value_table(problem: ExplanationProblem, cap_space: Optional[int] = None) -> np.ndarray:
    """
    Model outputs over the whole space as an object array of exact values

    Classification outputs become the indicator of the target class.
    """
    cap = config.CAP_SPACE if cap_space is None else cap_space
    space = problem.space
    if space.size > cap:
        raise ResourceError(f"feature space of {space.size} points exceeds the cap of {cap}")
    table = np.empty(tuple(len(d) for d in space.domains), dtype=object)
    for point in space.points():
        output = problem.model.evaluate(point)
        if problem.model.task == CLASSIFICATION:
            output = Fraction(int(output == problem.q))
        index = tuple(d.index(x) for d, x in zip(space.domains, point))
        table[index] = Fraction(output)
    return table


def shap_exact(problem: ExplanationProblem, cap_space: Optional[int] = None,
               cap_exhaustive: Optional[int] = None) -> ScoreVector:
    """Shapley values of E[model | x_S = v_S] under the uniform product distribution"""
    _check_exhaustive(problem.m, cap_exhaustive)
    table = expected_value_table(problem, cap_space)
    anchor = [d.index(x) for d, x in zip(problem.space.domains, problem.v)]

    def expectation(S):
        selector = tuple(anchor[i - 1] if i in S else slice(None) for i in problem.space.features)
        block = np.asarray(table[selector], dtype=object)
        return Fraction(block.sum()) / block.size

    return shapley_exhaustive(expectation, problem.m, cap_exhaustive, method=SHAP_EXACT)


@dataclass(frozen=True)
class PropertyResult:
    passed: bool
    witness: object = None
    informational: bool = False


def _w(value):
    """JSON-friendly witness values"""
    if isinstance(value, Fraction):
        return fraction_to_str(value)
    if isinstance(value, (list, tuple)):
        return [_w(v) for v in value]
    if isinstance(value, dict):
        return {k: _w(v) for k, v in value.items()}
    return value


@dataclass
class PropertyReport:
    results: Dict[str, PropertyResult] = field(default_factory=dict)

    def add(self, name: str, passed: bool, witness=None, informational: bool = False):
        self.results[name] = PropertyResult(bool(passed), _w(witness), informational)

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.results.values() if not r.informational)

    def failures(self) -> List[str]:
        return [name for name, r in self.results.items() if not r.passed and not r.informational]

    def to_dict(self):
        return {name: {'passed': r.passed, 'witness': r.witness, 'informational': r.informational}
                for name, r in self.results.items()}

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([{'property': name, 'passed': r.passed, 'informational': r.informational,
                              'witness': r.witness} for name, r in self.results.items()])


def _monotonicity_witness(groups: Dict[int, FrozenSet], vectors: List[ScoreVector]):
    """First (i, j) with groups[i] <= groups[j] but some score(i) > score(j)"""
    for i, j in itertools.permutations(groups, 2):
        if groups[i] <= groups[j]:
            for vector in vectors:
                if vector[i] > vector[j]:
                    return {'i': i, 'j': j, 'method': vector.method, 'score_i': vector[i], 'score_j': vector[j]}
    return None


def check_properties(forest: CXpForest, problem: Optional[ExplanationProblem] = None,
                     axps: Optional[XpFamily] = None, cap_subsets: Optional[int] = None,
                     cap_space: Optional[int] = None) -> PropertyReport:
    """
    Evaluate the axioms of both AxFi scores on one forest

    AXp-minimal monotonicity and plain efficiency of the Banzhaf-like score
    are reported as informational: neither holds in general. Relevancy
    needs the problem; the AXps are used for it when given, otherwise the
    CXps are enumerated under the given caps.
    """
    report = PropertyReport()
    phi_s, phi_b = axfi_shapley(forest), axfi_banzhaf(forest)
    both = [phi_s, phi_b]
    empty, full = frozenset(), frozenset(forest.features)

    expected = forest.chi(full) - forest.chi(empty)
    report.add('efficiency_shapley', phi_s.total() == expected, {'sum': phi_s.total(), 'expected': expected})
    report.add('gamma_efficiency_banzhaf', phi_b.total() == gamma(forest),
               {'sum': phi_b.total(), 'gamma': gamma(forest)})
    report.add('banzhaf_plain_efficiency', phi_b.total() == expected,
               {'sum': phi_b.total(), 'expected': expected}, informational=True)

    nulls = [j for j in forest.features if not forest.membership(j)]
    bad = [j for j in nulls if phi_s[j] != 0 or phi_b[j] != 0]
    report.add('null_player', not bad, {'features': bad} if bad else None)

    signature = {}
    for j in forest.features:
        key = tuple(sorted((len(forest.cxps[k]), forest.weights[k]) for k in forest.membership(j)))
        signature.setdefault(key, []).append(j)
    asym = next(([g[0], g[k]] for g in signature.values() for k in range(1, len(g))
                 if any(v[g[0]] != v[g[k]] for v in both)), None)
    report.add('symmetry', asym is None, {'features': asym} if asym else None)

    membership = {j: frozenset(forest.membership(j)) for j in forest.features}
    witness = _monotonicity_witness(membership, both)
    report.add('cxp_minimal_monotonicity', witness is None, witness)

    if problem is not None:
        if axps is not None:
            relevant = axps.features()
        else:
            relevant = relevant_features(problem, cap_subsets=cap_subsets, cap_space=cap_space)
        positive_s = {j for j in forest.features if phi_s[j] > 0}
        positive_b = {j for j in forest.features if phi_b[j] > 0}
        report.add('relevancy', positive_s == relevant and positive_b == relevant,
                   {'relevant': sorted(relevant), 'positive': sorted(positive_s)})

    ones = forest.unweighted()
    summed = forest.with_weights([w + 1 for w in forest.weights])
    additive = all(
        score(summed).values == tuple(a + b for a, b in zip(score(forest).values, score(ones).values))
        for score in (axfi_shapley, axfi_banzhaf))
    report.add('additivity', additive)

    doubled = forest.scaled(2)
    report.add('scale_covariance',
               all(score(doubled).values == tuple(2 * v for v in score(forest).values)
                   for score in (axfi_shapley, axfi_banzhaf)))

    small = all(len(y) <= 2 for y in forest.cxps)
    report.add('shapley_equals_banzhaf_small_cxps', not small or phi_s.values == phi_b.values,
               None if small else 'some CXp has more than two features')

    if axps is not None:
        groups = {j: frozenset(axps.containing(j)) for j in forest.features}
        witness = _monotonicity_witness(groups, [phi_s])
        report.add('axp_minimal_monotonicity', witness is None, witness, informational=True)

    if not report.all_passed:
        logger.warning(f"⚠️ Property checks failed: {', '.join(report.failures())}")
    return report
