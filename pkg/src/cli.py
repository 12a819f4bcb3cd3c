'''Command-line entry point: run a preset, a config file or an explicit model.

Exit status: 0 on success, 1 when any scan point failed, 2 on configuration
errors.
'''

from __future__ import annotations

import argparse
import asyncio
import json
import logging
import sys
from pathlib import Path
from typing import Any, Sequence

from pydantic import ValidationError

from .config.paths import DecoherePaths
from .models import ModelKind
from .orchestrator import ExperimentConfig, PresetRegistry, run_preset, run_scan
from .utils import get_logger, load_json, setup_logging

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_POINT_FAILURES = 1
EXIT_CONFIG_ERROR = 2

# (N, J, U) when --model is given without them
_MODEL_DEFAULTS = {
    ModelKind.ISING: (12, 0.5, 0.0),
    ModelKind.HEISENBERG: (12, 0.5, 0.0),
    ModelKind.FERMI: (6, 0.1, 0.4),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='decohere',
        description='Qubit coherence in non-Hermitian environments: traces, susceptibility maps and circuit emulation.',
    )
    source = parser.add_mutually_exclusive_group()
    source.add_argument('--preset', help='Named preset (see --list-presets).')
    source.add_argument('--config', type=Path, help='JSON file holding an ExperimentConfig.')
    source.add_argument('--model', choices=[k.value for k in ModelKind], help='Explicit environment model.')
    parser.add_argument('--list-presets', action='store_true', help='Print the preset catalog and exit.')

    parser.add_argument('--task', choices=['trace', 'map', 'circuit'], default=None, help='Task for --model (default trace).')
    parser.add_argument('-N', type=int, default=None, help='Sites (overrides the preset size).')
    parser.add_argument('--J', type=float, default=None, help='Exchange / hopping strength.')
    parser.add_argument('--U', type=float, default=None, help='On-site interaction (fermi).')
    parser.add_argument('--hx', type=float, default=None, help='Real transverse field.')
    parser.add_argument('--hy', type=float, nargs='+', default=None, help='Complex field h_y; several values scan it.')
    parser.add_argument('--dx', type=float, default=None, help='Coupling delta_x.')
    parser.add_argument('--dy', type=float, default=None, help='Coupling delta_y.')
    parser.add_argument('--theta', type=float, nargs='+', default=None,
                        help='Coupling orientation(s) in radians: (dx, dy) = |d| (sin, cos).')
    parser.add_argument('--delta-mag', type=float, default=None, help='|delta| used with --theta (default |(dx, dy)|).')
    parser.add_argument('--hx-grid', type=float, nargs=3, metavar=('START', 'STOP', 'NUM'), help='h_x axis of a map.')
    parser.add_argument('--hy-grid', type=float, nargs=3, metavar=('START', 'STOP', 'NUM'), help='h_y axis of a map.')
    parser.add_argument('--tmax', type=float, default=None, help='Final time.')
    parser.add_argument('--steps', type=int, default=None, help='Time steps of the output grid.')
    parser.add_argument('--method', choices=['krylov', 'dense'], default=None, help='Propagation method.')
    parser.add_argument('--shots', type=int, default=None, help='Trajectories per time point (circuit task).')
    parser.add_argument('--seed', type=int, default=None, help='Base seed of shot sampling.')
    parser.add_argument('--workers', type=int, default=1, help='Scan points evaluated concurrently.')
    parser.add_argument('--out', type=Path, default=None, help='Output directory.')
    parser.add_argument('--log-file', default=None, help='Log file (default from paths.json).')
    parser.add_argument('--verbose', action='store_true', help='Debug logging.')
    parser.add_argument('--no-progress', action='store_true', help='Hide progress bars.')
    return parser


def collect_overrides(args: argparse.Namespace) -> dict[str, Any]:
    '''Flag values that apply on top of a preset or config; unset flags are omitted.'''
    overrides: dict[str, Any] = {
        'N': args.N,
        'J': args.J,
        'U': args.U,
        'hx': args.hx,
        'dx': args.dx,
        'dy': args.dy,
        'delta_magnitude': args.delta_mag,
        't_max': args.tmax,
        'steps': args.steps,
        'method': args.method,
        'shots': args.shots,
        'seed': args.seed,
    }
    if args.hy is not None:
        if len(args.hy) == 1:
            overrides['hy'] = args.hy[0]
        else:
            overrides['hy_values'] = list(args.hy)
    if args.theta is not None:
        overrides['theta_values'] = list(args.theta)
    return {k: v for k, v in overrides.items() if v is not None}


def _grid_axis(values: Sequence[float]) -> dict[str, float]:
    start, stop, num = values
    return {'start': start, 'stop': stop, 'num': int(num)}


def config_from_flags(args: argparse.Namespace) -> ExperimentConfig:
    '''Explicit-model config; --hx/--hy/--dx/--dy feed the model, the rest apply as overrides.'''
    kind = ModelKind.from_value(args.model)
    n, J, U = _MODEL_DEFAULTS[kind]
    model: dict[str, Any] = {
        'kind': kind,
        'n_sites': args.N if args.N is not None else n,
        'J': args.J if args.J is not None else J,
        'U': args.U if args.U is not None else U,
        'h': (args.hx if args.hx is not None else 1.0, args.hy[0] if args.hy else 0.0),
        'delta': (args.dx or 0.0, args.dy or 0.0),
    }
    data: dict[str, Any] = {
        'experiment_name': f'{kind.value}_scan',
        'model': model,
        'task': args.task or 'trace',
        'workers': args.workers,
    }
    if args.hx_grid and args.hy_grid:
        data['grid'] = {'hx': _grid_axis(args.hx_grid), 'hy': _grid_axis(args.hy_grid)}
    return ExperimentConfig.model_validate(data)


def _print_presets() -> None:
    for name in PresetRegistry.list_presets():
        preset = PresetRegistry.get(name)
        print(f'{name:8s} {preset.description}')


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.log_file or args.verbose:
        setup_logging(args.log_file or str(DecoherePaths.load().logs), logging.DEBUG if args.verbose else logging.INFO, force=True)

    if args.list_presets:
        _print_presets()
        return EXIT_OK

    progress = not args.no_progress
    overrides = collect_overrides(args)
    try:
        if args.preset:
            PresetRegistry.get(args.preset)
            runner = run_preset(args.preset, overrides, args.out, args.workers, progress)
        elif args.config:
            config = ExperimentConfig.model_validate({'workers': args.workers, **load_json(str(args.config))})
            runner = run_scan(config, overrides, args.out, progress)
        elif args.model:
            config = config_from_flags(args)
            overrides = {k: v for k, v in overrides.items() if k not in ('N', 'J', 'U', 'hx', 'hy', 'dx', 'dy')}
            runner = run_scan(config, overrides, args.out, progress)
        else:
            parser.print_usage(sys.stderr)
            logger.error('One of --preset, --config or --model is required')
            return EXIT_CONFIG_ERROR
        summary = asyncio.run(runner)
    except (KeyError, ValueError, ValidationError, FileNotFoundError, json.JSONDecodeError) as e:
        logger.error(f'Configuration error: {e}')
        return EXIT_CONFIG_ERROR

    print(summary['report'])
    print(f"Outputs in {summary['output']}")
    return EXIT_POINT_FAILURES if summary['failures'] else EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
