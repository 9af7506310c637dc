#!/usr/bin/env python3
"""
Main Execution Script for the AxFi feature-importance toolkit
"""

import argparse
import json
import logging
import sys
from fractions import Fraction

from config import config
from src.commands import COMMANDS, FORMATS, GENERATORS, RunConfig, run_command
from src.errors import AxFiError, VerificationError
from src.scores import AXFI_BANZHAF, AXFI_SHAPLEY, METHODS
from src.storage import dump_json

logging.basicConfig(
    level=getattr(logging, config.LOG_LEVEL.upper(), logging.INFO),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    stream=sys.stderr,
)
logger = logging.getLogger(__name__)

EPILOG = """
Examples:
  # Generate the three-feature running example and score it
  python main.py gen --generator running --out-model out/model.json --out-instance out/instance.json
  python main.py scores --model out/model.json --instance out/instance.json > out/scores.json

  # Baselines and a ranking comparison
  python main.py scores --model out/model.json --instance out/instance.json --methods ffa,wffa > out/ffa.json
  python main.py compare out/scores.json out/ffa.json --persistence 1/2 --depth 5

  # Invariant suite on a gadget tree
  python main.py gen --generator gadget --k 8 --out-model out/g8.json --out-instance out/g8i.json
  python main.py verify --model out/g8.json --instance out/g8i.json

Exit codes:
  0 success   1 verification failed   2 usage   3 schema   4 cap exceeded
  5 method mismatch   6 domain   7 invalid argument   8 fixture self-check   10 unexpected
"""


def _fraction(raw: str) -> Fraction:
    try:
        return Fraction(raw)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {raw!r}") from None


def build_parser() -> argparse.ArgumentParser:
    """Subcommands share one parent parser of common flags"""
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument('--model', help='Model JSON file')
    shared.add_argument('--instance', help='Instance JSON file')
    shared.add_argument('--weight-mode', default=config.WEIGHT_MODE,
                        help='count | ratio | sampled | unweighted')
    shared.add_argument('--samples', type=int, default=config.SAMPLES, help='Samples per CXp in sampled mode')
    shared.add_argument('--seed', type=int, default=config.SEED, help='Seed for sampling and generators')
    shared.add_argument('--epsilon', type=int, help='l0 radius of adversarial examples (default m)')
    shared.add_argument('--delta', type=_fraction, help='Regression similarity threshold, e.g. 3/2')
    shared.add_argument('--persistence', type=_fraction, default=config.RBO_PERSISTENCE, help='RBO persistence p')
    shared.add_argument('--depth', type=int, default=config.RBO_DEPTH, help='RBO evaluation depth d')
    shared.add_argument('--methods', default=f"{AXFI_SHAPLEY},{AXFI_BANZHAF}",
                        help=f"Comma-separated score methods: {', '.join(METHODS)}")
    shared.add_argument('--format', default='json', choices=FORMATS, help='Output format')
    shared.add_argument('--places', type=int, default=config.DECIMAL_PLACES, help='Decimal places in renderings')
    shared.add_argument('--cap-subsets', type=int, default=config.CAP_SUBSETS, help='Max m for subset scans')
    shared.add_argument('--cap-space', type=int, default=config.CAP_SPACE, help='Max points per exhaustive scan')
    shared.add_argument('--cap-exhaustive', type=int, default=config.CAP_EXHAUSTIVE,
                        help='Max m for exhaustive power indices')

    parser = argparse.ArgumentParser(
        description='Rigorous feature importance from contrastive explanations',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=EPILOG,
    )
    sub = parser.add_subparsers(dest='command', required=True)
    for name in COMMANDS:
        cmd = sub.add_parser(name, parents=[shared], formatter_class=argparse.RawDescriptionHelpFormatter)
        if name == 'compare':
            cmd.add_argument('score_files', nargs='+', help='Score JSON files written by the scores command')
            cmd.add_argument('--transform', default='identity', choices=('identity', 'absolute'),
                             help='Rank by raw or absolute scores')
        if name == 'gen':
            cmd.add_argument('--generator', default='running', choices=GENERATORS)
            cmd.add_argument('--k', type=int, default=2, help='Gadget count')
            cmd.add_argument('--m', type=int, default=6, help='Feature count of random problems')
            cmd.add_argument('--domain-size', type=int, default=2, help='Domain size of random problems')
            cmd.add_argument('--kind', default='dt', choices=('dt', 'tabular'))
            cmd.add_argument('--task', default='classification', choices=('classification', 'regression'))
            cmd.add_argument('--leaf-bias', type=float, default=0.5, help='Probability of class 1 at a leaf')
            cmd.add_argument('--num-classes', type=int, default=2, help='Class count of random classifiers')
            cmd.add_argument('--out-model', help='Where to write the model JSON')
            cmd.add_argument('--out-instance', help='Where to write the instance JSON')
    return parser


def to_run_config(args: argparse.Namespace) -> RunConfig:
    """Flatten parsed flags into a RunConfig"""
    values = {k: v for k, v in vars(args).items()}
    values['methods'] = tuple(m.strip() for m in values['methods'].split(',') if m.strip())
    values['score_files'] = tuple(values.get('score_files') or ())
    return RunConfig(**values)


def main(argv=None) -> int:
    """Parse flags, run one command and print its report to stdout"""
    args = build_parser().parse_args(argv)

    logger.info("=" * 80)
    logger.info(f"🚀 AXFI {args.command.upper()}")
    logger.info("=" * 80)

    try:
        config.validate()
        result = run_command(to_run_config(args))
        if args.format == 'csv' and result.table is not None:
            sys.stdout.write(result.table.to_csv())
        else:
            sys.stdout.write(dump_json(result.payload))
        if not result.ok:
            raise VerificationError("one or more invariant checks failed")
        logger.info("✅ DONE")
        return 0

    except AxFiError as e:
        logger.error(f"❌ {e.kind.upper()}: {e}")
        sys.stderr.write(json.dumps(e.to_dict()) + "\n")
        return e.exit_code

    except ValueError as e:
        logger.error(f"❌ CONFIG: {e}")
        sys.stderr.write(json.dumps({'error': 'config', 'message': str(e)}) + "\n")
        return 7

    except Exception as e:
        logger.exception(f"❌ ERROR: {e}")
        sys.stderr.write(json.dumps({'error': 'unexpected', 'message': str(e)}) + "\n")
        return 10


if __name__ == "__main__":
    sys.exit(main())
