"""
Feature rankings and rank-biased overlap between them
"""

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, Optional, Sequence, Tuple

import pandas as pd

from config import config
from src.errors import ArgumentError
from src.scores import ScoreVector, render_decimal
from src.storage import fraction_to_str

logger = logging.getLogger(__name__)

TRANSFORMS = ('identity', 'absolute')
TIE_RULES = ('index',)


@dataclass(frozen=True)
class Ranking:
    """Features ordered from most to least important"""

    ordered: Tuple[int, ...]
    method: str = ''

    def __post_init__(self):
        ordered = tuple(self.ordered)
        if sorted(ordered) != list(range(1, len(ordered) + 1)):
            raise ArgumentError(f"ranking {list(ordered)} is not a permutation of 1..{len(ordered)}")
        object.__setattr__(self, 'ordered', ordered)

    def __len__(self):
        return len(self.ordered)

    def __iter__(self):
        return iter(self.ordered)


def ranking(scores: ScoreVector, transform: str = 'identity', tie_rule: str = 'index') -> Ranking:
    """Sort features by (transformed) score, best first; ties go to the lower index"""
    if transform not in TRANSFORMS:
        raise ArgumentError(f"transform must be one of {TRANSFORMS}, got {transform!r}")
    if tie_rule not in TIE_RULES:
        raise ArgumentError(f"tie rule must be one of {TIE_RULES}, got {tie_rule!r}")
    key = abs if transform == 'absolute' else (lambda x: x)
    ordered = sorted(range(1, scores.m + 1), key=lambda j: (-key(scores[j]), j))
    label = scores.method if transform == 'identity' else f"{scores.method}_abs"
    return Ranking(tuple(ordered), label)


def rbo(a: Sequence[int], b: Sequence[int], p=None, d: Optional[int] = None) -> Fraction:
    """
    Truncated rank-biased overlap

    (1 - p) * sum_{k=1..d} p^(k-1) * |a[:k] & b[:k]| / k, with the sum stopping
    at the shorter ranking when it has fewer than d entries.
    """
    p = config.RBO_PERSISTENCE if p is None else Fraction(p)
    d = config.RBO_DEPTH if d is None else d
    if not 0 < p < 1:
        raise ArgumentError(f"persistence must lie strictly between 0 and 1, got {p}")
    if d < 1:
        raise ArgumentError(f"depth must be >= 1, got {d}")
    if isinstance(a, Ranking) and isinstance(b, Ranking) and set(a) != set(b):
        raise ArgumentError("rankings cover different features")
    a, b = list(a), list(b)

    depth = min(d, len(a), len(b))
    seen_a, seen_b = set(), set()
    total = Fraction(0)
    for k in range(1, depth + 1):
        seen_a.add(a[k - 1])
        seen_b.add(b[k - 1])
        total += p ** (k - 1) * Fraction(len(seen_a & seen_b), k)
    return (1 - p) * total


@dataclass
class RboReport:
    p: Fraction
    d: int
    pairs: Dict[Tuple[str, str], Fraction] = field(default_factory=dict)

    def to_dict(self):
        return {'persistence': fraction_to_str(self.p), 'depth': self.d,
                'pairs': [{'a': a, 'b': b, 'rbo': fraction_to_str(v), 'decimal': render_decimal(v)}
                          for (a, b), v in self.pairs.items()]}

    def to_frame(self, places: Optional[int] = None) -> pd.DataFrame:
        """Symmetric method-by-method matrix of rounded values"""
        names = list(dict.fromkeys(itertools.chain.from_iterable(self.pairs)))
        matrix = pd.DataFrame(index=names, columns=names, dtype=float)
        for name in names:
            matrix.loc[name, name] = render_decimal(1 - self.p ** self.d, places)
        for (a, b), v in self.pairs.items():
            matrix.loc[a, b] = matrix.loc[b, a] = render_decimal(v, places)
        return matrix


def rbo_report(rankings: Iterable[Ranking], p=None, d: Optional[int] = None) -> RboReport:
    """RBO of every pair of rankings, in input order"""
    p = config.RBO_PERSISTENCE if p is None else Fraction(p)
    d = config.RBO_DEPTH if d is None else d
    rankings = list(rankings)
    names = [r.method for r in rankings]
    if len(set(names)) != len(names):
        raise ArgumentError(f"ranking names must be unique, got {names}")
    report = RboReport(p, d)
    for a, b in itertools.combinations(rankings, 2):
        report.pairs[(a.method, b.method)] = rbo(a, b, p, d)
    logger.info(f"📊 Compared {len(rankings)} rankings ({len(report.pairs)} pairs) at p={p}, d={d}")
    return report
