"""
Command implementations behind the CLI

Every command is a pure function of its RunConfig: it returns a
CommandResult holding the JSON payload, an optional pandas table for the
CSV view, and whether the command succeeded.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional, Tuple

import pandas as pd

from config import WEIGHT_MODES, config
from src.adv import compute_weights
from src.compare import TRANSFORMS, Ranking, ranking, rbo_report
from src.errors import ArgumentError, SchemaError
from src.forest import build_forest
from src.scores import (AXFI_BANZHAF, AXFI_SHAPLEY, BANZHAF_EXHAUSTIVE, DEEGAN_PACKEL_CXP, FFA, METHODS,
                        RESPONSIBILITY, SHAP_EXACT, SHAPLEY_EXHAUSTIVE, WFFA, ScoreVector, axfi_banzhaf,
                        axfi_shapley, banzhaf_exhaustive, check_properties, deegan_packel_cxp, ffa, gamma,
                        render_decimal, responsibility, scores_table, shap_exact, shapley_exhaustive, wffa)
from src.storage import fraction_to_str, load_problem, read_json, save_problem
from src.synth import RandomSpec, gadget_dt, random_problem, running_example
from src.verify import run_suite
from src.xp import enumerate_axps, enumerate_cxps, relevant_features

logger = logging.getLogger(__name__)

COMMANDS = ('explain', 'weights', 'scores', 'compare', 'gen', 'verify')
FORMATS = ('json', 'csv')
GENERATORS = ('running', 'gadget', 'random')
AXP_METHODS = (FFA, WFFA, RESPONSIBILITY)


@dataclass
class RunConfig:
    """Validated command-line settings; unset values fall back to config"""

    command: str
    model: Optional[str] = None
    instance: Optional[str] = None
    weight_mode: str = config.WEIGHT_MODE
    samples: int = config.SAMPLES
    seed: int = config.SEED
    epsilon: Optional[int] = None
    delta: Optional[Fraction] = None
    persistence: Fraction = config.RBO_PERSISTENCE
    depth: int = config.RBO_DEPTH
    methods: Tuple[str, ...] = (AXFI_SHAPLEY, AXFI_BANZHAF)
    format: str = 'json'
    cap_subsets: int = config.CAP_SUBSETS
    cap_space: int = config.CAP_SPACE
    cap_exhaustive: int = config.CAP_EXHAUSTIVE
    places: int = config.DECIMAL_PLACES
    score_files: Tuple[str, ...] = ()
    transform: str = 'identity'
    generator: str = 'running'
    k: int = 2
    m: int = 6
    domain_size: int = 2
    kind: str = 'dt'
    task: str = 'classification'
    leaf_bias: float = 0.5
    num_classes: int = 2
    out_model: Optional[str] = None
    out_instance: Optional[str] = None

    def validate(self):
        """Check every flag before any computation starts"""
        errors = []
        if self.command not in COMMANDS:
            errors.append(f"unknown command {self.command!r}")
        if self.command in ('explain', 'weights', 'scores', 'verify'):
            if not self.model or not self.instance:
                errors.append("--model and --instance are required")
        if self.weight_mode not in WEIGHT_MODES:
            errors.append(f"--weight-mode must be one of {', '.join(WEIGHT_MODES)}")
        if self.samples < 1:
            errors.append("--samples must be >= 1")
        if self.seed < 0:
            errors.append("--seed must be >= 0")
        if self.epsilon is not None and self.epsilon < 0:
            errors.append("--epsilon must be >= 0")
        if self.delta is not None and self.delta < 0:
            errors.append("--delta must be >= 0")
        if not 0 < self.persistence < 1:
            errors.append("--persistence must lie strictly between 0 and 1")
        if self.depth < 1:
            errors.append("--depth must be >= 1")
        unknown = [m for m in self.methods if m not in METHODS]
        if unknown:
            errors.append(f"unknown methods {unknown}; choose from {', '.join(METHODS)}")
        if self.format not in FORMATS:
            errors.append(f"--format must be one of {', '.join(FORMATS)}")
        if min(self.cap_subsets, self.cap_space, self.cap_exhaustive) < 1:
            errors.append("caps must be >= 1")
        if self.transform not in TRANSFORMS:
            errors.append(f"--transform must be one of {', '.join(TRANSFORMS)}")
        if self.command == 'compare' and len(self.score_files) < 1:
            errors.append("compare needs at least one score file")
        if self.command == 'gen':
            if self.generator not in GENERATORS:
                errors.append(f"--generator must be one of {', '.join(GENERATORS)}")
            if not self.out_model or not self.out_instance:
                errors.append("--out-model and --out-instance are required")
            if self.k < 1 or self.m < 1 or self.domain_size < 1:
                errors.append("--k, --m and --domain-size must be >= 1")
            if self.num_classes < 2:
                errors.append("--num-classes must be >= 2")
        if errors:
            raise ArgumentError("invalid arguments: " + "; ".join(errors))
        return self

    @property
    def caps(self):
        return {'cap_subsets': self.cap_subsets, 'cap_space': self.cap_space}


@dataclass
class CommandResult:
    payload: object
    table: Optional[pd.DataFrame] = None
    ok: bool = True


def _problem(run: RunConfig):
    return load_problem(run.model, run.instance, delta=run.delta, epsilon=run.epsilon)


def cmd_explain(run: RunConfig) -> CommandResult:
    """AXps, CXps and relevant features of one instance"""
    problem = _problem(run)
    cxps = enumerate_cxps(problem, 'auto', **run.caps)
    axps = enumerate_axps(problem, 'mhs_dual', **run.caps)
    relevant = relevant_features(problem, cxps)
    logger.info(f"🧩 {len(axps)} AXps, {len(cxps)} CXps, {len(relevant)} relevant features")
    table = pd.DataFrame([{'kind': family.kind, 'set': ' '.join(map(str, sorted(s)))}
                          for family in (axps, cxps) for s in family])
    return CommandResult({'axps': axps.to_dict(), 'cxps': cxps.to_dict(), 'relevant': sorted(relevant)}, table)


def cmd_weights(run: RunConfig) -> CommandResult:
    """Cover measure of every CXp"""
    problem = _problem(run)
    cxps = enumerate_cxps(problem, 'auto', **run.caps)
    mode = 'count' if run.weight_mode == 'unweighted' else run.weight_mode
    measures = compute_weights(problem, cxps, mode, run.samples, run.seed, cap_space=run.cap_space)
    table = pd.DataFrame([{'cxp': ' '.join(map(str, sorted(w.cxp))),
                           'count': w.count,
                           'ratio': render_decimal(w.ratio, run.places),
                           'sampled': None if w.samples is None else render_decimal(w.sampled_ratio, run.places)}
                          for w in measures])
    return CommandResult([w.to_dict() for w in measures], table)


def cmd_scores(run: RunConfig) -> CommandResult:
    """Requested score vectors plus the AxFi property report"""
    problem = _problem(run)
    forest = build_forest(problem, run.weight_mode, run.samples, run.seed, **run.caps)
    cxps = enumerate_cxps(problem, 'auto', **run.caps)
    axps = None
    if any(m in AXP_METHODS for m in run.methods):
        axps = enumerate_axps(problem, 'mhs_dual', **run.caps)

    builders = {
        AXFI_SHAPLEY: lambda: axfi_shapley(forest),
        AXFI_BANZHAF: lambda: axfi_banzhaf(forest),
        SHAPLEY_EXHAUSTIVE: lambda: shapley_exhaustive(forest.chi, forest.m, run.cap_exhaustive),
        BANZHAF_EXHAUSTIVE: lambda: banzhaf_exhaustive(forest.chi, forest.m, run.cap_exhaustive),
        FFA: lambda: ffa(axps),
        WFFA: lambda: wffa(axps),
        RESPONSIBILITY: lambda: responsibility(axps),
        DEEGAN_PACKEL_CXP: lambda: deegan_packel_cxp(cxps),
        SHAP_EXACT: lambda: shap_exact(problem, run.cap_space, run.cap_exhaustive),
    }
    vectors = [builders[m]() for m in run.methods]
    report = check_properties(forest, problem, axps, run.cap_subsets, run.cap_space)
    for vector in vectors:
        logger.info(f"📈 {vector.method}: {[render_decimal(v, run.places) for v in vector.values]}")
    payload = {
        'scores': [v.to_dict(run.places) for v in vectors],
        'gamma': fraction_to_str(gamma(forest)),
        'forest': forest.to_dict(),
        'properties': report.to_dict(),
    }
    return CommandResult(payload, scores_table(vectors, run.places))


def _read_vectors(path: str):
    doc = read_json(path)
    if isinstance(doc, dict) and 'scores' in doc:
        doc = doc['scores']
    if isinstance(doc, dict):
        doc = [doc]
    try:
        return [ScoreVector.from_dict(item) for item in doc]
    except (KeyError, TypeError):
        raise SchemaError(f"{path} does not hold score vectors") from None


def cmd_compare(run: RunConfig) -> CommandResult:
    """Pairwise RBO of the rankings induced by every score vector in the files"""
    rankings = []
    names = set()
    for path in run.score_files:
        for vector in _read_vectors(path):
            r = ranking(vector, run.transform)
            name = r.method if r.method not in names else f"{Path(path).stem}:{r.method}"
            names.add(name)
            rankings.append(Ranking(r.ordered, name))
    if len(rankings) < 2:
        raise ArgumentError("compare needs at least two score vectors")
    report = rbo_report(rankings, run.persistence, run.depth)
    payload = report.to_dict()
    payload['rankings'] = {r.method: list(r.ordered) for r in rankings}
    return CommandResult(payload, report.to_frame(run.places))


def cmd_gen(run: RunConfig) -> CommandResult:
    """Write a generated model and instance to disk"""
    if run.generator == 'running':
        _, problem = running_example()
    elif run.generator == 'gadget':
        _, problem = gadget_dt(run.k)
    else:
        spec = RandomSpec(m=run.m, domain_sizes=(run.domain_size,) * run.m, model_kind=run.kind,
                          leaf_bias=run.leaf_bias, task=run.task, num_classes=run.num_classes)
        _, problem = random_problem(spec, run.seed)
    save_problem(problem, run.out_model, run.out_instance)
    logger.info(f"🛠️ Generated {run.generator} problem with m={problem.m}")
    payload = {'generator': run.generator, 'model': run.out_model, 'instance': run.out_instance,
               'm': problem.m, 'point': list(problem.v)}
    return CommandResult(payload)


def cmd_verify(run: RunConfig) -> CommandResult:
    """Full invariant suite; fails when any check fails"""
    problem = _problem(run)
    suite = run_suite(problem, run.cap_subsets, run.cap_space, run.cap_exhaustive)
    report = suite.report()
    payload = {
        'passed': suite.passed,
        'cxp_count': len(suite.cxps) if suite.cxps is not None else None,
        'axp_count': len(suite.axps) if suite.axps is not None else None,
        'checks': report.to_dict(orient='records'),
    }
    return CommandResult(payload, report, ok=suite.passed)


DISPATCH = {
    'explain': cmd_explain,
    'weights': cmd_weights,
    'scores': cmd_scores,
    'compare': cmd_compare,
    'gen': cmd_gen,
    'verify': cmd_verify,
}


def run_command(run: RunConfig) -> CommandResult:
    """Validate the settings, then dispatch to the command"""
    run.validate()
    return DISPATCH[run.command](run)
