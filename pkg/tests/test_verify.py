from fractions import Fraction

import pytest

from src.model import REGRESSION, ExplanationProblem, FeatureSpace, TabularModel
from src.synth import RandomSpec, gadget_dt, random_problem
from src.verify import FAIL, PASS, SKIP, InvariantSuite, run_suite
from tests.conftest import corpus_problem


def statuses(report):
    return dict(zip(report['check'], report['status']))


def test_running_example_passes_everything(running):
    suite = InvariantSuite(running)
    report = suite.run()
    assert suite.passed
    assert list(report.columns) == ['check', 'status', 'detail']
    status = statuses(report)
    assert status['cover_disjointness'] == PASS
    assert status['wcxp_waxp_complement'] == PASS
    assert status['relabel_invariance'] == PASS
    assert len(suite.cxps) == 3 and len(suite.axps) == 3


def test_large_gadget_skips_brute_force():
    _, problem = gadget_dt(8)
    suite = InvariantSuite(problem)
    status = statuses(suite.run())
    assert suite.passed
    assert len(suite.axps) == 256
    assert status['axp_duality'] == SKIP
    assert status['dt_restrict_vs_brute'] == PASS
    assert FAIL not in status.values()


@pytest.mark.parametrize("seed", range(0, 200, 7))
def test_corpus_passes(seed):
    suite = InvariantSuite(corpus_problem(seed))
    suite.run()
    assert suite.passed, suite.report().query("status == 'fail'").to_dict(orient='records')


def test_three_class_model_is_relabelled():
    _, problem = random_problem(RandomSpec(m=4, model_kind='tabular', num_classes=3), seed=2)
    suite = run_suite(problem)
    status = statuses(suite.report())
    assert status['relabel_invariance'] == PASS
    assert suite.passed


def test_model_without_cxps():
    space = FeatureSpace(((0, 1, 2),))
    model = TabularModel(space, REGRESSION, {x: Fraction(x[0], 5) for x in space.points()})
    suite = run_suite(ExplanationProblem.create(model, (0,), delta=1))
    status = statuses(suite.report())
    assert suite.passed
    assert status['cxp_duality'] == PASS
    assert status['scores'] == SKIP
