# coding=UTF-8
"""Command line front end: config in, figure data and a manifest out."""
import argparse
import dataclasses
import datetime
import hashlib
import json
import logging
import math
import os
import sys

import numpy
import pandas
import taskgraph

import ramsey_localization
from ramsey_localization import distributions
from ramsey_localization import filters
from ramsey_localization import mechanics
from ramsey_localization import model
from ramsey_localization import sampler
from ramsey_localization import validation

LOGGER = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_NUMERICAL_ERROR = 3
EXIT_VALIDATION_FAILURE = 4

TASKGRAPH_REPORTING_FREQUENCY = 5.0
DEFAULT_OUT_DIR = 'ramsey_output'
DEFAULT_SAMPLE_COUNT = 100000
FILTER_POINTS = 2049
SWEEP_PHI0_POINTS = 17
SWEEP_SIGMAS = (0.01 * math.pi, 0.02 * math.pi, 0.05 * math.pi, 0.1 * math.pi)
MANIFEST_NAME = 'manifest.json'
TASKGRAPH_DIR = 'taskgraph_cache'

# outcome panels of the filter figure: node, midway and antinode readouts
FILTER_PANELS = (('plus2alpha', 2.0), ('zero', 0.0), ('minus2alpha', -2.0))
MODES = ((distributions.DUAL, True), (distributions.FIELD_ONLY, False))


@dataclasses.dataclass
class RunManifest:
    """Everything needed to reproduce the files of one invocation."""

    command: str
    version: str
    convention: str
    config: dict
    config_sha256: str
    seed: object
    created: str
    regime: object = None
    outputs: list = dataclasses.field(default_factory=list)

    def add_output(self, out_dir, path):
        self.outputs.append({
            'path': os.path.relpath(path, out_dir),
            'sha256': sha256_file(path),
        })

    def write(self, target_path):
        with open(target_path, 'w') as manifest_file:
            json.dump(dataclasses.asdict(self), manifest_file, indent=2)
            manifest_file.write('\n')


def sha256_file(path):
    digest = hashlib.sha256()
    with open(path, 'rb') as target_file:
        for chunk in iter(lambda: target_file.read(1 << 20), b''):
            digest.update(chunk)
    return digest.hexdigest()


def config_sha256(document):
    """Hash of the canonical JSON form of a config document."""
    canonical = json.dumps(document, sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(canonical.encode('utf-8')).hexdigest()


def write_csv(frame, target_path, document, convention_name):
    """Write ``frame`` after a one-line ``#`` metadata header.

    Numbers use 17 significant digits so they round-trip exactly and the
    bytes depend only on the inputs.
    """
    with open(target_path, 'w', newline='') as csv_file:
        csv_file.write(
            f'# ramsey-localization {ramsey_localization.__version__} '
            f'convention={convention_name} '
            f'config_sha256={config_sha256(document)}\n')
        frame.to_csv(csv_file, index=False, float_format='%.17g')
    LOGGER.info('wrote %s', target_path)


def write_json(payload, target_path):
    with open(target_path, 'w') as json_file:
        json.dump(payload, json_file, indent=2, sort_keys=True)
        json_file.write('\n')
    LOGGER.info('wrote %s', target_path)


def _build(document, convention_name):
    run_config = model.parse_run_config(document, convention_name)
    grid = distributions.make_grid(
        run_config.wavepacket, run_config.grid_exponent, run_config.padding)
    return run_config, model.build_wavepacket(run_config.wavepacket, grid)


def filter_table(cfg, convention):
    """Filter curves over one period of the standing wave.

    Columns: phi, x_over_lambda, F_a = |D I_a|², F_b = |D I_b|², the
    envelope d², d and delta.
    """
    phi = numpy.linspace(0, math.pi, FILTER_POINTS)
    sample = filters.generalized_filter(phi, cfg)
    return pandas.DataFrame({
        'phi': phi,
        'x_over_lambda': phi / convention.phase_per_wavelength,
        'F_a': sample.d**2 * numpy.abs(sample.i_a)**2,
        'F_b': sample.d**2 * numpy.abs(sample.i_b)**2,
        'envelope': sample.d**2,
        'd': sample.d,
        'delta': sample.delta,
    })


def write_filter_panel(document, convention_name, chi0, target_path):
    run_config = model.parse_run_config(document, convention_name)
    cfg = run_config.interaction.replace(chi0=chi0)
    write_csv(
        filter_table(cfg, run_config.convention), target_path, document,
        convention_name)


def write_position_table(document, convention_name, ramsey_on, target_path):
    run_config, wp = _build(document, convention_name)
    table = distributions.position_distribution(
        wp, run_config.interaction.replace(ramsey_on=ramsey_on))
    write_csv(table.to_frame(), target_path, document, convention_name)


def write_momentum_table(document, convention_name, ramsey_on, target_path):
    run_config, wp = _build(document, convention_name)
    table = distributions.momentum_distribution(
        wp, run_config.interaction.replace(ramsey_on=ramsey_on))
    write_csv(table.to_frame(), target_path, document, convention_name)


def write_dpt_sweep(document, convention_name, target_path):
    run_config = model.parse_run_config(document, convention_name)
    sweep = mechanics.dpt_sweep(
        numpy.linspace(0, math.pi / 2, SWEEP_PHI0_POINTS), SWEEP_SIGMAS,
        run_config.interaction)
    write_csv(sweep, target_path, document, convention_name)


def write_mechanics_report(
        document, convention_name, curves_path, summary_path):
    run_config = model.parse_run_config(document, convention_name)
    report = mechanics.mechanics_report(
        run_config.wavepacket, run_config.interaction,
        run_config.grid_exponent, run_config.padding)
    write_csv(report.curves_frame(), curves_path, document, convention_name)
    write_json(report.summary(), summary_path)


def popper_configurations(cfg, compare_modes):
    """Default pair is the X vs Y quadrature readout, else dual vs field-only."""
    if compare_modes:
        return [('dual', cfg.replace(ramsey_on=True)),
                ('field_only', cfg.replace(ramsey_on=False))]
    return [('x_quadrature', cfg.replace(theta=0.0)),
            ('y_quadrature', cfg.replace(theta=math.pi / 2))]


def write_popper_report(
        document, convention_name, compare_modes, target_path):
    run_config, wp = _build(document, convention_name)
    report = mechanics.popper_report(
        popper_configurations(run_config.interaction, compare_modes), wp)
    write_json(report, target_path)


def write_samples(
        document, convention_name, count, seed, records_path, summary_path):
    run_config, wp = _build(document, convention_name)
    density = sampler.outcome_density(wp, run_config.interaction)
    records = sampler.sample_records(wp, run_config.interaction, count, seed)
    write_csv(
        sampler.records_frame(records), records_path, document,
        convention_name)
    write_json(
        sampler.summarize_records(records, density, seed), summary_path)


def _schedule(task_graph, out_dir, args, document):
    """Add the tasks of ``args.command``; return their target paths."""
    convention_name = args.convention
    targets = []

    def add(func, task_args, target_path_list, task_name):
        task_graph.add_task(
            func=func,
            args=(document, convention_name) + tuple(task_args) + tuple(
                target_path_list),
            target_path_list=list(target_path_list),
            task_name=task_name)
        targets.extend(target_path_list)

    if args.command == 'filters':
        alpha = model.parse_run_config(
            document, convention_name).interaction.alpha
        for tag, multiple in FILTER_PANELS:
            target_path = os.path.join(out_dir, f'filters_chi0_{tag}.csv')
            add(write_filter_panel, (multiple * alpha,), [target_path],
                f'filter panel {tag}')
    elif args.command in ('posdist', 'momdist'):
        func = (write_position_table if args.command == 'posdist'
                else write_momentum_table)
        for mode, ramsey_on in MODES:
            target_path = os.path.join(out_dir, f'{args.command}_{mode}.csv')
            add(func, (ramsey_on,), [target_path], f'{args.command} {mode}')
    elif args.command == 'mechanics':
        add(write_dpt_sweep, (), [os.path.join(out_dir, 'dpt_sweep.csv')],
            'dpt sweep')
        add(write_mechanics_report, (), [
            os.path.join(out_dir, 'mechanics_curves.csv'),
            os.path.join(out_dir, 'mechanics_summary.json')],
            'mechanics report')
        add(write_popper_report, (args.compare_modes,),
            [os.path.join(out_dir, 'popper.json')], 'popper report')
    elif args.command == 'sample':
        add(write_samples, (args.count, args.seed), [
            os.path.join(out_dir, 'records.csv'),
            os.path.join(out_dir, 'sample_summary.json')],
            f'sample {args.count} records')
    return targets


def run_validate(out_dir, checks):
    """Run the validation suite and write ``validation.json``.

    Raises:
        ValidationFailure if any check fails (after writing the report).
    """
    results = validation.run_validation(names=checks)
    target_path = os.path.join(out_dir, 'validation.json')
    write_json(
        {'checks': [dataclasses.asdict(result) for result in results]},
        target_path)
    failed = [result.name for result in results if not result.passed]
    if failed:
        raise model.ValidationFailure(
            f'{len(failed)} validation check(s) failed: {failed}')
    return [target_path]


def regime_summary(report):
    """JSON form of a ``ValidityReport``; failing checks are logged."""
    for name in report.failures():
        passed, value, threshold = report.checks[name]
        LOGGER.warning(
            'regime check %s fails: %g against threshold %g', name, value,
            threshold)
    return {
        'passed': report.passed,
        'checks': {
            name: {'passed': passed, 'value': value, 'threshold': threshold}
            for name, (passed, value, threshold) in report.checks.items()},
        'light_shift': report.light_shift,
        'interaction_time': report.interaction_time,
    }


def run(args):
    """Execute a parsed command line; return the written manifest path."""
    if args.config is not None:
        run_config = model.load_run_config(args.config, args.convention)
    else:
        run_config = model.parse_run_config({}, args.convention)
    document = run_config.document
    out_dir = os.path.normpath(args.out)
    os.makedirs(out_dir, exist_ok=True)

    manifest = RunManifest(
        command=args.command,
        version=ramsey_localization.__version__,
        convention=args.convention,
        config=document,
        config_sha256=config_sha256(document),
        seed=getattr(args, 'seed', None),
        created=datetime.datetime.now(datetime.timezone.utc).isoformat())

    if run_config.regime is not None:
        manifest.regime = regime_summary(
            model.validate_regime(run_config.regime, run_config.interaction))

    if args.command == 'validate':
        targets = run_validate(out_dir, args.check)
    else:
        task_graph = taskgraph.TaskGraph(
            os.path.join(out_dir, TASKGRAPH_DIR), args.n_workers,
            TASKGRAPH_REPORTING_FREQUENCY)
        targets = _schedule(task_graph, out_dir, args, document)
        task_graph.close()
        task_graph.join()

    for target_path in targets:
        manifest.add_output(out_dir, target_path)
    manifest_path = os.path.join(out_dir, MANIFEST_NAME)
    manifest.write(manifest_path)
    LOGGER.info('wrote %s with %d outputs', manifest_path, len(targets))
    return manifest_path


def build_parser():
    parser = argparse.ArgumentParser(
        prog='ramsey-localization',
        description=(
            'Atomic position localization by dual quadrature and '
            'internal-state measurement: figure data, mechanics and '
            'validation.'))
    parser.add_argument(
        '--config', help='path to a JSON run configuration')
    parser.add_argument(
        '--out', default=DEFAULT_OUT_DIR, help='output directory')
    parser.add_argument(
        '--convention', default=model.PAPER_FIGURE,
        choices=sorted(model.CONVENTIONS),
        help='mapping of x/lambda onto the standing-wave phase')
    parser.add_argument(
        '--n-workers', type=int, default=-1,
        help='taskgraph workers, -1 runs tasks in this process')
    parser.add_argument(
        '--verbose', action='store_true', help='log at DEBUG level')
    subparsers = parser.add_subparsers(dest='command', required=True)
    subparsers.add_parser(
        'filters', help='filter functions for chi0 = 2alpha, 0, -2alpha')
    subparsers.add_parser(
        'posdist', help='position distributions, dual and field-only')
    subparsers.add_parser(
        'momdist', help='momentum distributions, dual and field-only')
    mechanics_parser = subparsers.add_parser(
        'mechanics', help='dipole-force sweep, report and popper comparison')
    mechanics_parser.add_argument(
        '--compare-modes', action='store_true',
        help='compare dual vs field-only instead of X vs Y quadrature')
    sample_parser = subparsers.add_parser(
        'sample', help='Born-rule measurement records')
    sample_parser.add_argument(
        '--count', type=int, default=DEFAULT_SAMPLE_COUNT)
    sample_parser.add_argument(
        '--seed', type=int, required=True,
        help='seed of the PCG64 generator; runs are reproducible from it')
    validate_parser = subparsers.add_parser(
        'validate', help='closed form vs oracle and invariant suite')
    validate_parser.add_argument(
        '--check', action='append',
        choices=[name for name, _ in validation.CHECKS],
        help='run only this check (repeatable)')
    return parser


def main(argv=None):
    """Entry point; returns the process exit code."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format=(
            '%(asctime)s (%(relativeCreated)d) %(levelname)s %(name)s'
            ' [%(funcName)s:%(lineno)d] %(message)s'),
        stream=sys.stdout)
    logging.getLogger('taskgraph').setLevel(logging.INFO)
    if getattr(args, 'count', 1) < 1:
        LOGGER.error('--count must be at least 1')
        return EXIT_CONFIG_ERROR
    try:
        run(args)
    except model.ConfigError as error:
        LOGGER.error('configuration error: %s', error)
        return EXIT_CONFIG_ERROR
    except model.NumericalContractError as error:
        LOGGER.error('numerical contract violated: %s', error)
        return EXIT_NUMERICAL_ERROR
    except model.ValidationFailure as error:
        LOGGER.error('%s', error)
        return EXIT_VALIDATION_FAILURE
    return EXIT_OK
