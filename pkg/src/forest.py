"""
CXp-Forest: the characteristic function built from the CXps and their weights
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Tuple

from config import config
from src.adv import compute_weights
from src.errors import ArgumentError
from src.model import ExplanationProblem
from src.storage import fraction_to_str, parse_fraction
from src.xp import FeatureSet, enumerate_cxps, is_antichain

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CXpForest:
    """
    CXps Y_1..Y_n with nonnegative weights w_1..w_n over features 1..m

    chi(S) = (1/n) * sum of w_i over the CXps that S intersects.
    """

    cxps: Tuple[FeatureSet, ...]
    weights: Tuple[Fraction, ...]
    m: int

    def __post_init__(self):
        cxps = tuple(frozenset(y) for y in self.cxps)
        weights = tuple(Fraction(w) for w in self.weights)
        if not cxps:
            raise ArgumentError("a CXp-Forest needs at least one CXp")
        if len(weights) != len(cxps):
            raise ArgumentError(f"{len(cxps)} CXps but {len(weights)} weights")
        if any(not y for y in cxps):
            raise ArgumentError("CXps must be non-empty")
        if any(min(y) < 1 or max(y) > self.m for y in cxps):
            raise ArgumentError(f"CXp members must lie in 1..{self.m}")
        if not is_antichain(cxps):
            raise ArgumentError("CXps must be pairwise incomparable")
        if any(w < 0 for w in weights):
            raise ArgumentError("weights must be nonnegative")

        # Canonical CXp order fixes which weight belongs to which tree.
        order = sorted(range(len(cxps)), key=lambda k: tuple(sorted(cxps[k])))
        object.__setattr__(self, 'cxps', tuple(cxps[k] for k in order))
        object.__setattr__(self, 'weights', tuple(weights[k] for k in order))

    @property
    def n(self) -> int:
        return len(self.cxps)

    @property
    def features(self) -> range:
        return range(1, self.m + 1)

    def chi(self, S: Iterable[int]) -> Fraction:
        """Mean weight over the CXps that intersect S; raises ArgumentError outside 1..m"""
        S = frozenset(S)
        if S and (min(S) < 1 or max(S) > self.m):
            raise ArgumentError(f"feature set {sorted(S)} is outside 1..{self.m}")
        return sum((w for y, w in zip(self.cxps, self.weights) if y & S), Fraction(0)) / self.n

    def __call__(self, S: Iterable[int]) -> Fraction:
        return self.chi(S)

    def total(self) -> Fraction:
        """chi(F), i.e. the mean weight"""
        return sum(self.weights, Fraction(0)) / self.n

    def membership(self, j: int) -> Tuple[int, ...]:
        """Indices of the CXps that contain feature j"""
        return tuple(k for k, y in enumerate(self.cxps) if j in y)

    def relevant_features(self) -> FeatureSet:
        return frozenset().union(*self.cxps)

    def with_weights(self, weights: Sequence) -> 'CXpForest':
        """Same CXps with new weights, given in canonical CXp order"""
        return CXpForest(self.cxps, tuple(weights), self.m)

    def scaled(self, c) -> 'CXpForest':
        """Every weight multiplied by c"""
        c = Fraction(c)
        return self.with_weights([w * c for w in self.weights])

    def unweighted(self) -> 'CXpForest':
        return self.with_weights([1] * self.n)

    def to_dict(self):
        return {'m': self.m,
                'cxps': [sorted(y) for y in self.cxps],
                'weights': [fraction_to_str(w) for w in self.weights]}

    @classmethod
    def from_dict(cls, doc) -> 'CXpForest':
        return cls(tuple(frozenset(y) for y in doc['cxps']),
                   tuple(parse_fraction(w) for w in doc['weights']),
                   doc['m'])

    def to_dot(self) -> str:
        """
        Graphviz rendering with one binary tree per CXp

        Each member feature is a test node; its right edge (feature in S) goes
        to a 1-leaf and its left edge to the next member or a final 0-leaf.
        """
        lines = ['digraph cxp_forest {', '  node [fontname="Helvetica"];']
        for k, (y, w) in enumerate(zip(self.cxps, self.weights), start=1):
            members = sorted(y)
            lines.append(f'  subgraph cluster_{k} {{')
            lines.append(f'    label="Y{k} = {{{", ".join(map(str, members))}}}, w{k} = {fraction_to_str(w)}";')
            for pos, j in enumerate(members):
                node = f't{k}_{pos}'
                lines.append(f'    {node} [label="{j}", shape=circle];')
                lines.append(f'    {node}_in [label="1", shape=box];')
                lines.append(f'    {node} -> {node}_in [label="in S"];')
                nxt = f't{k}_{pos + 1}' if pos + 1 < len(members) else f't{k}_out'
                lines.append(f'    {node} -> {nxt} [label="not in S"];')
            lines.append(f'    t{k}_out [label="0", shape=box];')
            lines.append('  }')
        lines.append('}')
        return '\n'.join(lines) + '\n'


def build_forest(problem: ExplanationProblem, weight_mode: Optional[str] = None,
                 samples: Optional[int] = None, seed: Optional[int] = None,
                 cxp_method: str = 'auto', count_method: str = 'auto',
                 cap_subsets: Optional[int] = None, cap_space: Optional[int] = None) -> CXpForest:
    """Enumerate the CXps of a problem and weight each by its AEx cover"""
    weight_mode = config.WEIGHT_MODE if weight_mode is None else weight_mode
    cxps = enumerate_cxps(problem, cxp_method, cap_subsets, cap_space)
    if not cxps.sets:
        raise ArgumentError("no CXps: every output is similar to the target, so no feature can change it "
                            "and the CXp-Forest is undefined")
    if weight_mode == 'unweighted':
        weights = [Fraction(1)] * len(cxps)
    else:
        measures = compute_weights(problem, cxps, weight_mode, samples, seed, count_method, cap_space)
        weights = [measure.weight(weight_mode) for measure in measures]
    logger.info(f"🌲 Built CXp-Forest with n={len(cxps)} trees ({weight_mode} weights)")
    return CXpForest(cxps.sets, tuple(weights), problem.m)
