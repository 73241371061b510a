#!/usr/bin/env python
#
# Copyright 2026 the Cruzamento developers
#
# This file is part of Cruzamento.
#
# Cruzamento is free software: you can redistribute it and/or modify it under
# the terms of the GNU Lesser General Public License as published by the Free
# Software Foundation, either version 3 of the License, or (at your option) any
# later version.
#
# Cruzamento is distributed in the hope that it will be useful, but WITHOUT ANY
# WARRANTY; without even the implied warranty of MERCHANTABILITY or FITNESS FOR
# A PARTICULAR PURPOSE. See the GNU Lesser General Public License for more
# details.
#
# You should have received a copy of the GNU Lesser General Public License
# along with Cruzamento.  If not, see <http://www.gnu.org/licenses/>.
"""
The ``cruzamento`` command. Each subcommand is one step of the pipeline:

``gen-map``
    writes a validated network XML, from a template or a description;
``gen-assets``
    places vehicles on a map;
``train-planner``
    trains the diffusion planner and saves a checkpoint;
``rollout``
    rolls scenarios out, writing them with their images and transcripts;
``evaluate``
    computes the realism, diversity and driving metrics of scenarios;
``corner-case``
    collects the failures of a policy, generates corner cases from them and
    compares the collision rates.

Settings come from a TOML file (``--config``) and ``--set key=value`` flags.
Messages go to standard error. The exit status is 0 on success, 1 on usage
errors, 2 on validation failures and 3 on backend failures::

    >>> main(['gen-map', '--template', 'bridge', '--out', 'x.xml'])
    1
"""
import argparse
import csv
import functools
import glob
import json
import logging
import os
import sys
try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from cruzamento.assets import (
    default_database, ingest_database, place_vehicles, read_assets,
    write_assets)
from cruzamento.config import Configuration, Environment
from cruzamento.cornercase.adversarial import (
    corner_case_report, corner_case_rollout, knowledge_metadata)
from cruzamento.cornercase.failures import (
    collect_failures, evaluate_scenario, write_records)
from cruzamento.cornercase.idm import IdmPolicy
from cruzamento.cornercase.knowledge import (
    DEFAULT_IMAGES, KnowledgeFragment, build_knowledge_prompt)
from cruzamento.errors import USAGE, CruzamentoError, UsageError
from cruzamento.gateway.gateway import Gateway
from cruzamento.gateway.transcript import TranscriptStore
from cruzamento.mapsynth import KINDS, generate_lm_map, generate_template_map
from cruzamento.metrics import (
    MetricsReport, RealismStats, dataset_diversity, driving_metrics,
    realism_stats, representative_samples)
from cruzamento.planner.checkpoint import (
    checkpoint_hash, load_checkpoint, save_checkpoint)
from cruzamento.planner.dataset import (
    SyntheticDataset, generate_synthetic_dataset)
from cruzamento.planner.kinematic import KinematicPlanner
from cruzamento.planner.training import train_planner
from cruzamento.roadnet.xmlio import read_network, write_network
from cruzamento.rollout.legality import LegalityLimits
from cruzamento.rollout.rollout import ScenarioRollout, derive_seed
from cruzamento.rollout.selectors import (
    GatewayGoalSelector, RandomGoalSelector)
from cruzamento.runner import WorkerPool
from cruzamento.scenario import read_scenario, write_scenario

logger = logging.getLogger(__name__)

SYNTHETIC = 'synthetic:'
PLANNERS = ('diffusion', 'kinematic')
SELECTORS = ('mock', 'live', 'random')
POLICIES = ('idm',)
LOG_FORMAT = '%(levelname)s: %(name)s: %(message)s'

_planners = {}


class ArgumentParser(argparse.ArgumentParser):
    """
    Reports bad flags as ``UsageError`` so they get the usage exit code.
    """

    def error(self, message):
        raise UsageError(message)


def load_params(path):
    if path is None:
        return None
    try:
        with open(path, 'rb') as f:
            return tomllib.load(f)
    except (OSError, tomllib.TOMLDecodeError) as e:
        raise UsageError('cannot read parameters {0}: {1}'.format(path, e))


def read_scenarios(directory):
    paths = sorted(glob.glob(os.path.join(directory, '*.json')))
    if not paths:
        raise UsageError('no scenario files in {0}'.format(directory))
    return [read_scenario(p) for p in paths]


def make_planner(kind, checkpoint=None):
    """
    Planners are loaded once per process.
    """
    if kind == 'kinematic':
        return KinematicPlanner()
    if checkpoint is None:
        raise UsageError('the diffusion planner needs --ckpt')
    if checkpoint not in _planners:
        _planners[checkpoint] = load_checkpoint(checkpoint)
    return _planners[checkpoint]


def make_selector(kind, configuration, transcript, seed=0):
    if kind == 'random':
        return RandomGoalSelector(seed)
    configuration = configuration.override({
        'gateway.vision.backend': 'live' if kind == 'live' else 'mock'})
    gateway = Gateway.from_config(configuration, Environment(), transcript)
    return GatewayGoalSelector.from_config(gateway, configuration)


class ScenarioJob(object):
    """
    Rolls the scenario of one ``(index, network, vehicles)`` job out, in a
    worker process. With ``knowledge`` the scenario is a corner case. Returns
    the index, the scenario and the image of every vehicle.
    """

    def __init__(
            self, planner, checkpoint, selector, configuration, seed,
            out_dir, knowledge=None, metadata=None):
        self.planner = planner
        self.checkpoint = checkpoint
        self.selector = selector
        self.configuration = configuration
        self.seed = seed
        self.out_dir = out_dir
        self.knowledge = knowledge
        self.metadata = dict(metadata or {})

    def __call__(self, job):
        index, network, vehicles = job
        seed = derive_seed(self.seed, index)
        transcript = TranscriptStore(os.path.join(
            self.out_dir, 'transcripts', '{0:04d}.jsonl'.format(index)))
        planner = make_planner(self.planner, self.checkpoint)
        selector = make_selector(
            self.selector, self.configuration, transcript, seed)
        metadata = dict(self.metadata, id='{0:04d}'.format(index))

        if self.knowledge is None:
            rollout = ScenarioRollout(
                network, planner, selector, self.configuration, transcript)
            provenance = 'generated'
        else:
            rollout = corner_case_rollout(
                network, vehicles, planner, selector, self.knowledge,
                self.configuration, transcript)
            provenance = 'corner_case'
            if self.knowledge:
                metadata['knowledge'] = knowledge_metadata(self.knowledge)
        scenario = rollout.run(vehicles, seed, provenance, metadata)
        images = {
            vehicle_id: image.png
            for vehicle_id, image in rollout.images.items()}
        return index, scenario, images


def run_scenario_jobs(job, inputs, out_dir, workers):
    """
    Runs ``job`` on every input and writes the scenarios and their images
    to ``out_dir``, in input order.
    """
    for directory in ('transcripts', 'bev'):
        os.makedirs(os.path.join(out_dir, directory), exist_ok=True)
    with WorkerPool(workers) as pool:
        results = pool.map(job, inputs)

    scenarios = []
    for index, scenario, images in results:
        write_scenario(scenario, os.path.join(
            out_dir, 'scenario_{0:04d}.json'.format(index)))
        for vehicle_id, png in sorted(images.items()):
            path = os.path.join(
                out_dir, 'bev', '{0:04d}_{1}.png'.format(index, vehicle_id))
            with open(path, 'wb') as f:
                f.write(png)
        scenarios.append(scenario)
    logger.info('wrote %d scenarios to %s', len(scenarios), out_dir)
    return scenarios


def planner_kind(args):
    if args.planner is not None:
        return args.planner
    return 'diffusion' if args.ckpt else 'kinematic'


def gen_map(args, configuration):
    if (args.template is None) == (args.describe is None):
        raise UsageError('give either --template or --describe')
    if args.template is not None:
        if args.template not in KINDS:
            raise UsageError('unknown template {0!r}; choose one of {1}'
                             .format(args.template, ', '.join(KINDS)))
        network = generate_template_map(
            args.template, load_params(args.params))
    else:
        configuration = configuration.override({
            'gateway.text.backend':
                'live' if args.backend == 'live' else 'template'})
        gateway = Gateway.from_config(
            configuration, Environment(), TranscriptStore(args.transcript))
        text = configuration.get('gateway.text')
        network = generate_lm_map(
            args.describe, gateway,
            configuration.get('map.max_repair_rounds'), args.feedback,
            request_seed=args.seed, temperature=text['temperature'],
            max_tokens=text['max_tokens'])
    write_network(network, args.out)
    logger.info(
        'wrote %s: %d lanes, %d junctions, %d connections', args.out,
        len(network.lanes), len(network.junctions), len(network.connections))


def gen_assets(args, configuration):
    network = read_network(args.map)
    database = ingest_database(args.db) if args.db else default_database()
    settings = configuration.get('assets')
    n_vehicles = args.n if args.n is not None else settings['n_vehicles']
    vehicles = place_vehicles(
        network, database, n_vehicles, args.seed, radius=settings['radius'],
        speed_band=settings['speed_band'],
        bumper_gap=settings['bumper_gap'], tries=settings['tries'],
        stop_decel=configuration.get('idm.fallback_max_decel'))
    write_assets(vehicles, args.out, {
        'map': args.map, 'database': args.db, 'n_vehicles': n_vehicles,
        'placed': len(vehicles), 'seed': args.seed,
        'configuration': configuration.as_dict()})
    logger.info('placed %d of %d vehicles', len(vehicles), n_vehicles)


def train(args, configuration):
    planner = configuration.get('planner')
    if args.dataset.startswith(SYNTHETIC):
        try:
            n = int(args.dataset[len(SYNTHETIC):])
        except ValueError:
            raise UsageError('expected synthetic:<count>, got {0!r}'.format(
                args.dataset))
        dataset = generate_synthetic_dataset(
            n, configuration.get('training.seed'),
            raster_size=planner['raster_size'],
            resolution=planner['raster_resolution'],
            limits=LegalityLimits.from_config(configuration))
        if args.save_dataset:
            dataset.save(args.save_dataset)
    else:
        dataset = SyntheticDataset.load(args.dataset)

    def log_epoch(epoch, loss):
        logger.info('epoch %d: loss %.6f', epoch, loss)

    trained, losses = train_planner(dataset, configuration, log_epoch)
    save_checkpoint(trained, args.out, {
        'dataset': args.dataset, 'samples': len(dataset),
        'losses': losses, 'configuration': configuration.as_dict()})

    with open(args.losses or args.out + '.losses.csv', 'w', newline='') as f:
        writer = csv.writer(f)
        writer.writerow(('epoch', 'loss'))
        for epoch, loss in enumerate(losses, 1):
            writer.writerow((epoch, repr(loss)))


def rollout(args, configuration):
    network = read_network(args.map)
    vehicles = tuple(read_assets(args.assets))
    job = ScenarioJob(
        planner_kind(args), args.ckpt, args.selector, configuration,
        args.seed, args.out_dir, metadata={
            'map': args.map, 'assets': args.assets, 'seed': args.seed,
            'selector': args.selector,
            'configuration': configuration.as_dict()})
    run_scenario_jobs(
        job, [(i, network, vehicles) for i in range(args.count)],
        args.out_dir, args.workers)


def group_samples(references, generated, reference_ids):
    """
    The generated scenarios of every reference scenario: the ones whose
    ``reference`` metadata names it or, without such metadata, consecutive
    groups of equal size.
    """
    if all('reference' in s.metadata for s in generated):
        groups = [
            [s for s in generated if s.metadata['reference'] == r]
            for r in reference_ids]
    elif len(generated) % len(references) == 0:
        size = len(generated) // len(references)
        groups = [
            generated[i * size:(i + 1) * size]
            for i in range(len(references))]
    else:
        raise UsageError(
            '{0} generated scenarios cannot be split among {1} references'
            .format(len(generated), len(references)))
    if not all(groups):
        raise UsageError('some reference scenarios have no samples')
    return groups


def evaluate(args, configuration):
    references = read_scenarios(args.reference)
    generated = read_scenarios(args.generated)
    reference_ids = [
        s.metadata.get('id', str(i)) for i, s in enumerate(references)]
    groups = group_samples(references, generated, reference_ids)

    realism = RealismStats.combine(
        realism_stats(r, g) for r, g in zip(references, groups))
    representatives = representative_samples(references, groups)
    diversity = dataset_diversity(
        representatives, args.seed, baseline=references)

    policy = IdmPolicy.from_config(configuration)
    work = functools.partial(evaluate_scenario, policy, False)
    with WorkerPool(args.workers) as pool:
        evaluated = [
            scenario for scenario, _ in pool.map(
                work, [(str(i), s) for i, s in enumerate(generated)])]
    driving = driving_metrics(evaluated)

    report = MetricsReport(realism, diversity, driving, metadata={
        'generated': args.generated, 'reference': args.reference,
        'seed': args.seed, 'policy': policy.name,
        'configuration': configuration.as_dict()})
    with open(args.out, 'w') as f:
        f.write(report.to_json())
    print(report.table())


def corner_case(args, configuration):
    base = read_scenarios(args.base)
    hash_before = checkpoint_hash(args.ckpt) if args.ckpt else None
    policy = IdmPolicy.from_config(configuration)

    failures_dir = os.path.join(args.out_dir, 'failures')
    os.makedirs(os.path.join(failures_dir, 'snapshots'), exist_ok=True)
    with WorkerPool(args.workers) as pool:
        collection = collect_failures(base, policy, pool=pool)
    write_records(
        collection.records, os.path.join(failures_dir, 'records.jsonl'))
    for record in collection.records:
        path = os.path.join(
            failures_dir, 'snapshots', '{0}.png'.format(record.scenario_id))
        with open(path, 'wb') as f:
            f.write(record.snapshot)
    with open(os.path.join(failures_dir, 'stats.json'), 'w') as f:
        json.dump(collection.stats.to_dict(), f, indent=1, sort_keys=True)

    if collection.stats:
        knowledge = build_knowledge_prompt(
            collection.stats, collection.records, args.images)
        with open(os.path.join(failures_dir, 'knowledge.txt'), 'w') as f:
            f.write(knowledge.text)
    else:
        logger.warning(
            'the policy never failed; corner cases are plain rollouts')
        knowledge = KnowledgeFragment()

    job = ScenarioJob(
        planner_kind(args), args.ckpt, args.selector, configuration,
        args.seed, args.out_dir, knowledge, metadata={
            'base': args.base, 'seed': args.seed, 'policy': policy.name,
            'configuration': configuration.as_dict()})
    corner_cases = run_scenario_jobs(
        job, [(i, s.network, s.vehicles) for i, s in enumerate(base)],
        args.out_dir, args.workers)

    with WorkerPool(args.workers) as pool:
        evaluated = collect_failures(
            corner_cases, policy, snapshot=False, pool=pool).evaluated
    hash_after = checkpoint_hash(args.ckpt) if args.ckpt else None
    report = corner_case_report(
        collection.evaluated, evaluated, hash_before, hash_after)
    with open(os.path.join(args.out_dir, 'report.json'), 'w') as f:
        json.dump(report.to_dict(), f, indent=1, sort_keys=True)
    print(report.table())


def parse_overrides(pairs):
    overrides = {}
    for pair in pairs or ():
        key, separator, value = pair.partition('=')
        if not separator:
            raise UsageError('expected key=value, got {0!r}'.format(pair))
        overrides[key.strip()] = value.strip()
    return overrides


def build_parser():
    parser = ArgumentParser(
        prog='cruzamento', description='Traffic scenario generation.')
    parser.add_argument('--config', help='TOML configuration file')
    parser.add_argument(
        '--set', action='append', metavar='KEY=VALUE',
        help='override a configuration value, as in rollout.retries=3')
    parser.add_argument(
        '-v', '--verbose', action='store_true', help='log debug messages')
    commands = parser.add_subparsers(dest='command', required=True)

    command = commands.add_parser('gen-map', help='write a network XML')
    command.add_argument('--template', help='one of ' + ', '.join(KINDS))
    command.add_argument('--params', help='TOML file of template parameters')
    command.add_argument('--describe', help='description of the road')
    command.add_argument(
        '--backend', choices=('mock', 'live'), default='mock')
    command.add_argument('--feedback', help='corrections to the map')
    command.add_argument('--transcript', help='append model calls here')
    command.add_argument('--seed', type=int, default=0)
    command.add_argument('--out', required=True)
    command.set_defaults(function=gen_map)

    command = commands.add_parser('gen-assets', help='place vehicles')
    command.add_argument('--map', required=True)
    command.add_argument('--db', help='vehicle CSV; the bundled one if unset')
    command.add_argument('--n', type=int)
    command.add_argument('--seed', type=int, default=0)
    command.add_argument('--out', required=True)
    command.set_defaults(function=gen_assets)

    command = commands.add_parser('train-planner', help='train the planner')
    command.add_argument(
        '--dataset', required=True, help='dataset file or synthetic:<count>')
    command.add_argument('--save-dataset', help='keep the synthetic dataset')
    command.add_argument('--losses', help='loss curve CSV')
    command.add_argument('--out', required=True)
    command.set_defaults(function=train)

    command = commands.add_parser('rollout', help='roll scenarios out')
    command.add_argument('--map', required=True)
    command.add_argument('--assets', required=True)
    _add_generation_flags(command)
    command.add_argument('--count', type=int, default=1)
    command.set_defaults(function=rollout)

    command = commands.add_parser('evaluate', help='compute the metrics')
    command.add_argument('--generated', required=True)
    command.add_argument('--reference', required=True)
    command.add_argument('--seed', type=int, default=0)
    command.add_argument('--workers', type=int, default=1)
    command.add_argument('--out', required=True)
    command.set_defaults(function=evaluate)

    command = commands.add_parser(
        'corner-case', help='generate corner cases for a policy')
    command.add_argument('--policy', choices=POLICIES, default='idm')
    command.add_argument('--base', required=True)
    command.add_argument('--images', type=int, default=DEFAULT_IMAGES)
    _add_generation_flags(command)
    command.set_defaults(function=corner_case)
    return parser


def _add_generation_flags(command):
    command.add_argument('--ckpt', help='diffusion planner checkpoint')
    command.add_argument('--planner', choices=PLANNERS)
    command.add_argument('--selector', choices=SELECTORS, default='mock')
    command.add_argument('--seed', type=int, default=0)
    command.add_argument('--workers', type=int, default=1)
    command.add_argument('--out-dir', required=True)


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(
            level=logging.DEBUG if args.verbose else logging.INFO,
            format=LOG_FORMAT, stream=sys.stderr)
        configuration = Configuration.load(args.config).override(
            parse_overrides(args.set))
        args.function(args, configuration)
    except CruzamentoError as e:
        print('cruzamento: error: {0}'.format(e), file=sys.stderr)
        return e.exit_code
    except OSError as e:
        print('cruzamento: error: {0}'.format(e), file=sys.stderr)
        return USAGE
    return 0
