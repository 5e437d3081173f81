# src/python/cli/main.py

from typing import Dict, List, Optional
import argparse
import logging
import sys
from pathlib import Path

from src.python.utilities.errors import ConfigError
from .config_parser import MODES, parse_config
from .pipeline import EXIT_FAILURE, PipelineRunner

# Flag name → config key; every schema key except the verb itself.
FLAG_KEYS = (
    'A', 'A_sin', 'H', 'n', 'dv', 'v_max', 'filter_strength', 'residual_budget',
    'p0', 'input', 'out_dir', 'formats', 'debug_injectivity'
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='conelike',
        description="Construct and verify prescribed mean curvature graphs with a conelike singularity"
    )
    parser.add_argument('mode', choices=MODES)
    parser.add_argument('--config', help="key=value configuration file")
    for key in FLAG_KEYS:
        parser.add_argument(f"--{key.replace('_', '-')}", dest=key, metavar='VALUE',
                            help=f"overrides {key} from the config file")
    parser.add_argument('--tol', action='append', default=[], metavar='NAME=VALUE',
                        help="override a check tolerance (repeatable)")
    parser.add_argument('--log-level', default='INFO',
                        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'])
    return parser


def _overrides(args: argparse.Namespace) -> Dict[str, str]:
    overrides = {'mode': args.mode}
    for key in FLAG_KEYS:
        value = getattr(args, key)
        if value is not None:
            overrides[key] = value
    for item in args.tol:
        name, sep, value = item.partition('=')
        if not sep:
            raise ConfigError(f"--tol expects NAME=VALUE, got {item!r}", code='syntax')
        overrides[f"tol.{name.strip()}"] = value.strip()
    return overrides


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log_level),
        format='%(asctime)s %(levelname)s %(name)s: %(message)s'
    )
    logger = logging.getLogger('conelike')

    try:
        text = Path(args.config).read_text(encoding='utf-8') if args.config else ''
        config = parse_config(text, overrides=_overrides(args))
    except OSError as e:
        logger.error(f"Cannot read config: {str(e)}")
        return EXIT_FAILURE
    except ConfigError as e:
        logger.error(f"Invalid configuration: {str(e)}")
        return EXIT_FAILURE

    exit_code, report = PipelineRunner(config).run()
    failed = [c.name for c in report.checks if not c.passed]
    if failed:
        logger.warning(f"Failed checks: {', '.join(failed)}")
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
