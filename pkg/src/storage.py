"""
JSON persistence for models, problems and reports

Rationals travel as "p/q" strings (plain "n" when integral). Symbolic
domain labels are replaced by their position in the domain list when a
model is loaded.
"""

import json
import logging
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from src.errors import AxFiError, SchemaError
from src.model import (CLASSIFICATION, TASKS, DecisionTree, Edge, ExplanationProblem, FeatureSpace, Model,
                       Node, TabularModel, validate_model)

logger = logging.getLogger(__name__)


def fraction_to_str(value) -> str:
    """Render a rational as "p/q", or "n" when it is integral"""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_fraction(raw) -> Fraction:
    """Parse "p/q" strings, ints and decimal floats into an exact Fraction"""
    if isinstance(raw, bool):
        raise SchemaError(f"expected a rational, got {raw!r}")
    try:
        if isinstance(raw, float):
            return Fraction(str(raw))
        return Fraction(raw)
    except (TypeError, ValueError, ZeroDivisionError):
        raise SchemaError(f"expected a rational such as \"3/4\", got {raw!r}") from None


def read_json(path) -> Any:
    """Read a JSON document, mapping every failure to SchemaError"""
    try:
        with open(path, encoding='utf-8') as handle:
            return json.load(handle)
    except FileNotFoundError:
        raise SchemaError(f"file not found: {path}") from None
    except json.JSONDecodeError as e:
        logger.error(f"❌ Could not parse {path}: {e}")
        raise SchemaError(f"{path} is not valid JSON: {e}") from None


def dump_json(payload) -> str:
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


def write_json(path, payload):
    """Write a JSON document, creating parent directories as needed"""
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(dump_json(payload), encoding='utf-8')
    logger.info(f"💾 Wrote {path}")


def _require(doc: Dict, key: str, where: str):
    if not isinstance(doc, dict) or key not in doc:
        raise SchemaError(f"{where} is missing key {key!r}")
    return doc[key]


class _Encoder:
    """Maps the raw values of one domain onto integers"""

    def __init__(self, raw_domain: List):
        if not isinstance(raw_domain, list) or not raw_domain:
            raise SchemaError("every domain must be a non-empty list")
        self.symbolic = not all(isinstance(x, int) and not isinstance(x, bool) for x in raw_domain)
        if self.symbolic:
            self.codes = {x: i for i, x in enumerate(raw_domain)}
        else:
            self.codes = {x: x for x in raw_domain}

    @property
    def values(self) -> Tuple[int, ...]:
        return tuple(self.codes.values())

    def encode(self, raw):
        try:
            return self.codes[raw]
        except (KeyError, TypeError):
            raise SchemaError(f"value {raw!r} is not in domain {list(self.codes)}") from None

    def encode_range(self, bounds) -> frozenset:
        """Values within inclusive [lo, hi]; a null bound is open"""
        if self.symbolic:
            raise SchemaError(f"range literals need an integer domain, not {list(self.codes)}")
        if not isinstance(bounds, list) or len(bounds) != 2:
            raise SchemaError("range literal must be [lo, hi]")
        lo, hi = bounds
        if any(b is not None and (isinstance(b, bool) or not isinstance(b, int)) for b in bounds):
            raise SchemaError(f"range bounds must be integers or null, got {bounds}")
        return frozenset(x for x in self.values
                         if (lo is None or x >= lo) and (hi is None or x <= hi))


def _read_output(raw, task: str):
    if task == CLASSIFICATION:
        if isinstance(raw, bool) or not isinstance(raw, int):
            raise SchemaError(f"class labels must be integers, got {raw!r}")
        return raw
    return parse_fraction(raw)


def _write_output(value, task: str):
    return value if task == CLASSIFICATION else fraction_to_str(value)


def model_from_dict(doc: Dict) -> Tuple[Model, List[_Encoder]]:
    kind = _require(doc, 'type', 'model')
    task = _require(doc, 'task', 'model')
    if task not in TASKS:
        raise SchemaError(f"task must be one of {TASKS}, got {task!r}")
    encoders = [_Encoder(d) for d in _require(doc, 'domains', 'model')]
    space = FeatureSpace(tuple(e.values for e in encoders))

    if kind == 'tabular':
        table = {}
        for row in _require(doc, 'rows', 'tabular model'):
            raw = _require(row, 'x', 'row')
            if len(raw) != space.m:
                raise SchemaError(f"row {raw} has {len(raw)} values, expected {space.m}")
            point = tuple(e.encode(x) for e, x in zip(encoders, raw))
            table[point] = _read_output(_require(row, 'y', 'row'), task)
        return TabularModel(space, task, table), encoders

    if kind == 'dt':
        nodes = {}
        for raw in _require(doc, 'nodes', 'decision tree'):
            feature = _require(raw, 'feature', 'node')
            if not isinstance(feature, int) or not 1 <= feature <= space.m:
                raise SchemaError(f"node {raw.get('id')!r} tests unknown feature {feature!r}")
            encoder = encoders[feature - 1]
            edges = []
            for edge in _require(raw, 'edges', 'node'):
                if 'range' in edge:
                    values = encoder.encode_range(edge['range'])
                else:
                    values = frozenset(encoder.encode(x) for x in _require(edge, 'values', 'edge'))
                edges.append(Edge(values, _require(edge, 'child', 'edge')))
            nodes[_require(raw, 'id', 'node')] = Node(feature, tuple(edges))
        leaves = {_require(leaf, 'id', 'leaf'): _read_output(_require(leaf, 'value', 'leaf'), task)
                  for leaf in _require(doc, 'leaves', 'decision tree')}
        return DecisionTree(space, task, _require(doc, 'root', 'decision tree'), nodes, leaves), encoders

    raise SchemaError(f"model type must be 'tabular' or 'dt', got {kind!r}")


def model_to_dict(model: Model) -> Dict:
    """JSON document of a model, the inverse of model_from_dict for integer domains"""
    doc = {
        'type': model.kind,
        'task': model.task,
        'domains': [list(d) for d in model.space.domains],
    }
    if isinstance(model, TabularModel):
        doc['rows'] = [{'x': list(p), 'y': _write_output(model.table[p], model.task)}
                       for p in sorted(model.table)]
        return doc
    doc['root'] = model.root
    doc['nodes'] = [{'id': node_id,
                     'feature': node.feature,
                     'edges': [{'values': sorted(e.values), 'child': e.child} for e in node.edges]}
                    for node_id, node in model.nodes.items()]
    doc['leaves'] = [{'id': leaf_id, 'value': _write_output(value, model.task)}
                     for leaf_id, value in model.leaves.items()]
    return doc


def problem_to_dict(problem: ExplanationProblem) -> Dict:
    doc = {'point': list(problem.v), 'delta': fraction_to_str(problem.delta)}
    if problem.epsilon is not None:
        doc['epsilon'] = problem.epsilon
    return doc


def problem_from_dict(doc: Dict, model: Model, encoders: Optional[List[_Encoder]] = None,
                      delta=None, epsilon: Optional[int] = None) -> ExplanationProblem:
    """Build a problem; explicit ``delta``/``epsilon`` override the document"""
    raw = _require(doc, 'point', 'problem')
    if not isinstance(raw, list) or len(raw) != model.space.m:
        raise SchemaError(f"problem point must list {model.space.m} values")
    if encoders is not None:
        raw = [e.encode(x) for e, x in zip(encoders, raw)]
    if delta is None:
        delta = parse_fraction(doc.get('delta', 0))
    if epsilon is None:
        epsilon = doc.get('epsilon')
        if epsilon is not None and (isinstance(epsilon, bool) or not isinstance(epsilon, int)):
            raise SchemaError(f"epsilon must be an integer, got {epsilon!r}")
    return ExplanationProblem.create(model, raw, delta=delta, epsilon=epsilon)


def load_model(path) -> Model:
    """Load a model file without an instance"""
    model, _ = model_from_dict(read_json(path))
    logger.info(f"📥 Loaded {model.kind} model with {model.space.m} features from {path}")
    return model


def load_problem(model_path, problem_path, delta=None, epsilon: Optional[int] = None) -> ExplanationProblem:
    """Load a model file and the instance to explain"""
    model, encoders = model_from_dict(read_json(model_path))
    issues = validate_model(model)
    if issues:
        raise SchemaError(f"invalid model in {model_path}: " + "; ".join(issues))
    try:
        problem = problem_from_dict(read_json(problem_path), model, encoders, delta, epsilon)
    except AxFiError:
        logger.error(f"❌ Invalid instance in {problem_path}")
        raise
    logger.info(f"📥 Loaded instance {problem.v} -> {problem.q} from {problem_path}")
    return problem


def save_problem(problem: ExplanationProblem, model_path, problem_path):
    """Write the model and instance files of a problem"""
    write_json(model_path, model_to_dict(problem.model))
    write_json(problem_path, problem_to_dict(problem))
