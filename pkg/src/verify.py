"""
Invariant suite run by the ``verify`` command
"""

import itertools
import logging
from typing import List, Optional

import pandas as pd

from src.adv import compute_weights, cover_count, enumerate_aexs, l0_distance
from src.errors import ResourceError
from src.forest import CXpForest
from src.model import CLASSIFICATION, DecisionTree, ExplanationProblem, TabularModel, validate_model
from src.scores import (axfi_banzhaf, axfi_shapley, banzhaf_exhaustive, check_properties,
                        deegan_packel_cxp, shapley_exhaustive)
from src.synth import relabel_problem
from src.xp import (XpFamily, enumerate_axps, enumerate_cxps, is_antichain, is_waxp, is_wcxp,
                    minimal_hitting_sets)

logger = logging.getLogger(__name__)

PASS, FAIL, SKIP = 'pass', 'fail', 'skip'

# Largest m for which every subset is tested for WCXp/WAXp complementarity
COMPLEMENT_MAX_M = 10


class InvariantSuite:
    """Runs every cross-check that applies to one explanation problem"""

    def __init__(self, problem: ExplanationProblem, cap_subsets: Optional[int] = None,
                 cap_space: Optional[int] = None, cap_exhaustive: Optional[int] = None):
        self.problem = problem
        self.cap_subsets = cap_subsets
        self.cap_space = cap_space
        self.cap_exhaustive = cap_exhaustive
        self.rows: List[dict] = []
        self.cxps: Optional[XpFamily] = None
        self.axps: Optional[XpFamily] = None
        self.forest: Optional[CXpForest] = None

    def _record(self, check: str, status: str, detail: str = ''):
        self.rows.append({'check': check, 'status': status, 'detail': detail})
        if status == FAIL:
            logger.error(f"❌ {check}: {detail}")
        elif status == SKIP:
            logger.warning(f"⚠️ {check} skipped: {detail}")
        else:
            logger.debug(f"✅ {check}")

    def _guarded(self, check: str, fn):
        """Run one check; cap overruns turn into skips"""
        try:
            passed, detail = fn()
        except ResourceError as e:
            self._record(check, SKIP, str(e))
            return
        self._record(check, PASS if passed else FAIL, detail)

    def check_model(self):
        """Structural validation of the model; later checks are skipped when it fails"""
        issues = validate_model(self.problem.model)
        self._record('model_valid', FAIL if issues else PASS, '; '.join(issues))

    def check_families(self):
        """Enumerate both families and cross-check them against duality and brute force"""
        p = self.problem
        self.cxps = enumerate_cxps(p, 'auto', self.cap_subsets, self.cap_space)
        self.axps = enumerate_axps(p, 'mhs_dual', self.cap_subsets, self.cap_space)
        self._record('antichains', PASS if is_antichain(self.cxps.sets) and is_antichain(self.axps.sets) else FAIL,
                     f"|C|={len(self.cxps)}, |A|={len(self.axps)}")
        if self.cxps.sets:
            self._guarded('cxp_duality', lambda: (
                minimal_hitting_sets(self.axps.sets) == self.cxps.sets,
                'minimal hitting sets of the AXps are the CXps'))
        else:
            self._record('cxp_duality', PASS if self.axps.sets == (frozenset(),) else FAIL,
                         'no CXps, so the empty set must be the only AXp')

        def axp_duality():
            brute = enumerate_axps(p, 'brute', self.cap_subsets, self.cap_space)
            return brute.sets == self.axps.sets, f"brute force found {len(brute)} AXps"
        self._guarded('axp_duality', axp_duality)

        if isinstance(p.model, DecisionTree):
            def paths_vs_brute():
                brute = enumerate_cxps(p, 'brute', self.cap_subsets, self.cap_space)
                return brute.sets == self.cxps.sets, f"brute force found {len(brute)} CXps"
            self._guarded('dt_paths_vs_brute', paths_vs_brute)

    def check_complement(self):
        """S is a WCXp exactly when its complement is not a WAXp"""
        p = self.problem
        if p.m > COMPLEMENT_MAX_M:
            self._record('wcxp_waxp_complement', SKIP, f"m={p.m} > {COMPLEMENT_MAX_M}")
            return

        def complement():
            features = sorted(p.features)
            for size in range(p.m + 1):
                for combo in itertools.combinations(features, size):
                    S = frozenset(combo)
                    if is_wcxp(p, S, self.cap_space) == is_waxp(p, p.features - S, self.cap_space):
                        return False, f"mismatch at S={sorted(S)}"
            return True, ''
        self._guarded('wcxp_waxp_complement', complement)

    def check_covers(self):
        """Covered AEx sets are pairwise disjoint and tree counts match brute force"""
        p = self.problem

        def covers():
            aexs = enumerate_aexs(p, p.m, self.cap_space)
            covered = {}
            for Y in self.cxps:
                covered[Y] = {x for x in p.space.neighbourhood(p.v, Y) if not p.similar(x)}
            for a, b in itertools.combinations(covered, 2):
                if covered[a] & covered[b]:
                    return False, f"CXps {sorted(a)} and {sorted(b)} share AExs"
            for Y, points in covered.items():
                if any(l0_distance(x, p.v) != len(Y) for x in points):
                    return False, f"a point covered by {sorted(Y)} agrees with v on a member"
            exact = [x for x in aexs.points
                     if frozenset(i for i in p.features if x[i - 1] != p.v[i - 1]) in covered]
            total = sum(len(points) for points in covered.values())
            return total == len(exact), f"{total} covered AExs out of {len(aexs)}"
        self._guarded('cover_disjointness', covers)

        if isinstance(p.model, DecisionTree):
            def restrict_vs_brute():
                for Y in self.cxps:
                    fast = cover_count(p, Y, 'dt_restrict', check=False)
                    slow = cover_count(p, Y, 'brute', check=False, cap_space=self.cap_space)
                    if fast.count != slow.count:
                        return False, f"CXp {sorted(Y)}: {fast.count} vs {slow.count}"
                return True, ''
            self._guarded('dt_restrict_vs_brute', restrict_vs_brute)

    def check_scores(self):
        """Properties of the count-weighted forest and the closed forms against the oracles"""
        p = self.problem
        weights = [w.weight('count') for w in compute_weights(p, self.cxps, 'count', cap_space=self.cap_space)]
        self.forest = CXpForest(self.cxps.sets, tuple(weights), p.m)

        report = check_properties(self.forest, p, self.axps, self.cap_subsets, self.cap_space)
        self._record('properties', PASS if report.all_passed else FAIL, ', '.join(report.failures()))

        def closed_form():
            shapley = shapley_exhaustive(self.forest.chi, p.m, self.cap_exhaustive)
            banzhaf = banzhaf_exhaustive(self.forest.chi, p.m, self.cap_exhaustive)
            ok = (shapley.values == axfi_shapley(self.forest).values
                  and banzhaf.values == axfi_banzhaf(self.forest).values)
            return ok, ''
        self._guarded('closed_form_vs_exhaustive', closed_form)

        unweighted = axfi_shapley(self.forest.unweighted()).values
        self._record('unweighted_deegan_packel',
                     PASS if unweighted == deegan_packel_cxp(self.cxps).values else FAIL)

    def check_relabelling(self):
        """A cyclic shift of the class labels leaves CXps, weights and scores unchanged"""
        p = self.problem
        if p.model.task != CLASSIFICATION:
            self._record('relabel_invariance', SKIP, 'regression model')
            return
        model = p.model
        classes = sorted(set(model.table.values()) if isinstance(model, TabularModel) else set(model.leaves.values()))
        mapping = dict(zip(classes, classes[1:] + classes[:1]))
        other = relabel_problem(p, mapping)

        def invariance():
            cxps = enumerate_cxps(other, 'auto', self.cap_subsets, self.cap_space)
            weights = [w.weight('count') for w in compute_weights(other, cxps, 'count', cap_space=self.cap_space)]
            forest = CXpForest(cxps.sets, tuple(weights), other.m)
            same = (cxps.sets == self.cxps.sets and forest.weights == self.forest.weights
                    and axfi_shapley(forest) == axfi_shapley(self.forest)
                    and axfi_banzhaf(forest) == axfi_banzhaf(self.forest))
            return same, f"classes relabelled by {mapping}"
        self._guarded('relabel_invariance', invariance)

    def run(self) -> pd.DataFrame:
        """Run every check in order and return the report"""
        logger.info("=" * 80)
        logger.info("🔍 VERIFYING INVARIANTS")
        logger.info("=" * 80)
        self.check_model()
        if self.rows[-1]['status'] == FAIL:
            return self.report()
        self.check_families()
        self.check_complement()
        if not self.cxps.sets:
            self._record('scores', SKIP, 'no distinguishable output, so there is no CXp-Forest to score')
            return self._summarise()
        self.check_covers()
        self.check_scores()
        self.check_relabelling()
        return self._summarise()

    def _summarise(self) -> pd.DataFrame:
        report = self.report()
        counts = report['status'].value_counts()
        logger.info(f"  - pass: {counts.get(PASS, 0)}")
        logger.info(f"  - fail: {counts.get(FAIL, 0)}")
        logger.info(f"  - skip: {counts.get(SKIP, 0)}")
        return report

    def report(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows, columns=['check', 'status', 'detail'])

    @property
    def passed(self) -> bool:
        return all(row['status'] != FAIL for row in self.rows)


def run_suite(problem: ExplanationProblem, cap_subsets: Optional[int] = None, cap_space: Optional[int] = None,
              cap_exhaustive: Optional[int] = None) -> InvariantSuite:
    """Run every applicable check; ``suite.report()`` holds the table"""
    suite = InvariantSuite(problem, cap_subsets, cap_space, cap_exhaustive)
    suite.run()
    return suite
