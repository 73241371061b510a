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
import contextlib
import csv
import io
import json
import os
import shutil
import tempfile
import unittest

import inelegant.finder

from cruzamento import cli
from cruzamento.assets import default_database, place_vehicles, read_assets
from cruzamento.cli import group_samples, main, parse_overrides
from cruzamento.errors import UsageError
from cruzamento.mapsynth import KINDS, generate_template_map
from cruzamento.planner.checkpoint import checkpoint_hash
from cruzamento.planner.kinematic import KinematicPlanner
from cruzamento.roadnet.xmlio import read_network
from cruzamento.rollout.legality import check_legality
from cruzamento.rollout.rollout import rollout_scenario
from cruzamento.rollout.selectors import RandomGoalSelector
from cruzamento.scenario import read_scenario, write_scenario

from cruzamento_tests.reference import (
    SLOW_TESTS, scenario_of, vehicle)

TINY_TOML = """
[planner]
dim = 8
layers = 1
heads = 2
diffusion_steps = 5
raster_size = 32
raster_resolution = 6.25

[training]
epochs = 2
batch_size = 2
"""


def run(*argv):
    """
    Runs the command, returning the exit status and what it printed.
    """
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        status = main(list(argv))
    return status, out.getvalue(), err.getvalue()


class CommandTestCase(unittest.TestCase):

    def setUp(self):
        self.directory = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.directory)

    def path(self, *parts):
        return os.path.join(self.directory, *parts)

    def make_map(self):
        status, _, _ = run(
            'gen-map', '--template', 'highway', '--out', self.path('map.xml'))
        self.assertEqual(0, status)
        return self.path('map.xml')

    def make_assets(self):
        status, _, _ = run(
            'gen-assets', '--map', self.make_map(), '--n', '3', '--seed', '1',
            '--out', self.path('assets.json'))
        self.assertEqual(0, status)
        return self.path('assets.json')

    def make_scenarios(self, out_dir='generated', count=2, seed=0,
                       selector='random'):
        status, _, err = run(
            'rollout', '--map', self.path('map.xml'), '--assets',
            self.path('assets.json'), '--planner', 'kinematic',
            '--selector', selector, '--count', str(count), '--seed',
            str(seed), '--out-dir', self.path(out_dir))
        self.assertEqual(0, status, err)
        return self.path(out_dir)


class TestGenMap(CommandTestCase):

    def test_template(self):
        """
        Template maps are written as network XML.
        """
        network = read_network(self.make_map())

        self.assertTrue(network.lanes)

    def test_template_params(self):
        """
        Template parameters come from a TOML file.
        """
        with open(self.path('params.toml'), 'w') as f:
            f.write('lanes = 1\n')

        status, _, _ = run(
            'gen-map', '--template', 'highway', '--params',
            self.path('params.toml'), '--out', self.path('map.xml'))

        self.assertEqual(0, status)
        self.assertEqual(1, len(read_network(self.path('map.xml')).lanes))

    def test_describe(self):
        """
        Descriptions are turned into maps by the offline backend, and the
        calls are kept in the transcript.
        """
        status, _, _ = run(
            'gen-map', '--describe', 'a roundabout with radius 30 m',
            '--transcript', self.path('calls.jsonl'),
            '--out', self.path('map.xml'))

        self.assertEqual(0, status)
        self.assertTrue(read_network(self.path('map.xml')).junctions)
        with open(self.path('calls.jsonl')) as f:
            self.assertTrue(f.read())

    def test_describe_live_without_credentials(self):
        """
        The live backend without its credential fails with the backend exit
        status, naming the missing variable.
        """
        status, _, err = run(
            '--set', 'gateway.text.api_key_env=CRUZAMENTO_UNSET_TEST_KEY',
            'gen-map', '--describe', 'a roundabout', '--backend', 'live',
            '--out', self.path('map.xml'))

        self.assertEqual(3, status)
        self.assertIn('CRUZAMENTO_UNSET_TEST_KEY', err)
        self.assertFalse(os.path.exists(self.path('map.xml')))

    def test_unknown_template(self):
        """
        Unknown templates are usage errors.
        """
        status, _, err = run(
            'gen-map', '--template', 'bridge', '--out', self.path('m.xml'))

        self.assertEqual(1, status)
        self.assertIn('unknown template', err)

    def test_template_or_description(self):
        """
        Exactly one of ``--template`` and ``--describe`` is needed.
        """
        self.assertEqual(1, run('gen-map', '--out', self.path('m.xml'))[0])
        self.assertEqual(1, run(
            'gen-map', '--template', 'highway', '--describe', 'a highway',
            '--out', self.path('m.xml'))[0])


class TestGenAssets(CommandTestCase):

    def test_assets(self):
        """
        Vehicles are placed on the map, one of them the target.
        """
        vehicles = read_assets(self.make_assets())

        self.assertTrue(1 <= len(vehicles) <= 3)
        self.assertEqual(1, sum(v.is_target for v in vehicles))

    def test_malformed_map(self):
        """
        Broken maps are validation errors.
        """
        with open(self.path('map.xml'), 'w') as f:
            f.write('<net><lane></net>')

        status, _, _ = run(
            'gen-assets', '--map', self.path('map.xml'),
            '--out', self.path('assets.json'))

        self.assertEqual(2, status)

    def test_missing_map(self):
        """
        Missing files are usage errors.
        """
        status, _, _ = run(
            'gen-assets', '--map', self.path('nothing.xml'),
            '--out', self.path('assets.json'))

        self.assertEqual(1, status)


class TestRollout(CommandTestCase):

    def setUp(self):
        CommandTestCase.setUp(self)
        self.make_assets()

    def test_outputs(self):
        """
        Every scenario is written with its images and transcript.
        """
        out_dir = self.make_scenarios(count=2)

        first = read_scenario(os.path.join(out_dir, 'scenario_0000.json'))
        second = read_scenario(os.path.join(out_dir, 'scenario_0001.json'))
        self.assertNotEqual(first.seed, second.seed)
        self.assertEqual('0001', second.metadata['id'])
        self.assertEqual('random', first.metadata['selector'])
        images = os.listdir(os.path.join(out_dir, 'bev'))
        self.assertIn('0000_{0}.png'.format(first.target.id), images)
        self.assertTrue(os.path.exists(
            os.path.join(out_dir, 'transcripts', '0000.jsonl')))

    def test_reproducible(self):
        """
        The same seed writes the same scenarios.
        """
        first = self.make_scenarios('first', count=1, selector='mock')
        second = self.make_scenarios('second', count=1, selector='mock')

        with open(os.path.join(first, 'scenario_0000.json')) as f:
            expected = f.read()
        with open(os.path.join(second, 'scenario_0000.json')) as f:
            self.assertEqual(expected, f.read())

    def test_diffusion_needs_checkpoint(self):
        """
        The diffusion planner cannot run without a checkpoint.
        """
        status, _, err = run(
            'rollout', '--map', self.path('map.xml'), '--assets',
            self.path('assets.json'), '--planner', 'diffusion',
            '--out-dir', self.path('out'))

        self.assertEqual(1, status)
        self.assertIn('--ckpt', err)

    def test_overrides(self):
        """
        Unknown configuration keys and malformed overrides are usage
        errors.
        """
        base = (
            'rollout', '--map', self.path('map.xml'), '--assets',
            self.path('assets.json'), '--planner', 'kinematic',
            '--out-dir', self.path('out'))

        self.assertEqual(1, run('--set', 'rollout.retriez=2', *base)[0])
        self.assertEqual(1, run('--set', 'rollout.retries', *base)[0])
        self.assertEqual(0, run('--set', 'rollout.retries=2', *base)[0])


class TestEvaluate(CommandTestCase):

    def test_evaluate(self):
        """
        Metrics of generated scenarios against references are written as
        JSON and printed as a table.
        """
        self.make_assets()
        generated = self.make_scenarios('generated', seed=1)
        reference = self.make_scenarios('reference', seed=2)

        status, out, err = run(
            'evaluate', '--generated', generated, '--reference', reference,
            '--out', self.path('metrics.json'))

        self.assertEqual(0, status, err)
        with open(self.path('metrics.json')) as f:
            document = json.load(f)
        self.assertEqual(2, document['realism']['samples'])
        self.assertEqual(1, document['diversity']['pairs'])
        self.assertEqual(2, document['driving']['scenarios'])
        self.assertEqual('idm', document['metadata']['policy'])
        self.assertIn('min-sADE', out)

    def test_empty_directory(self):
        """
        Directories without scenarios are usage errors.
        """
        os.mkdir(self.path('empty'))

        status, _, _ = run(
            'evaluate', '--generated', self.path('empty'), '--reference',
            self.path('empty'), '--out', self.path('metrics.json'))

        self.assertEqual(1, status)


class TestCornerCase(CommandTestCase):

    def test_corner_case(self):
        """
        Failures are collected, corner cases generated and collision rates
        compared.
        """
        self.make_assets()
        base = self.make_scenarios('base', count=2)

        status, out, err = run(
            'corner-case', '--base', base, '--planner', 'kinematic',
            '--out-dir', self.path('corner'))

        self.assertEqual(0, status, err)
        with open(self.path('corner', 'report.json')) as f:
            report = json.load(f)
        self.assertIsNone(report['checkpoint_before'])
        self.assertEqual(2, report['base']['scenarios'])
        self.assertTrue(os.path.exists(
            self.path('corner', 'failures', 'stats.json')))
        corner = read_scenario(self.path('corner', 'scenario_0000.json'))
        self.assertEqual('corner_case', corner.provenance)
        self.assertIn('CR ratio', out)

    @unittest.skipUnless(SLOW_TESTS, 'set CRUZAMENTO_SLOW_TESTS=1 to run')
    def test_two_hundred_corner_cases(self):
        """
        On two hundred scenarios over every template map, the corner cases
        at least double the collision rate of the intelligent driver model,
        their social vehicles drive legally and the planner checkpoint is
        left alone.
        """
        with open(self.path('tiny.toml'), 'w') as f:
            f.write(TINY_TOML)
        status, _, err = run(
            '--config', self.path('tiny.toml'), 'train-planner',
            '--dataset', 'synthetic:4', '--out', self.path('planner.pt'))
        self.assertEqual(0, status, err)
        before = checkpoint_hash(self.path('planner.pt'))

        os.makedirs(self.path('base'))
        database = default_database()
        for i in range(200):
            network = generate_template_map(KINDS[i % len(KINDS)])
            scenario = rollout_scenario(
                network, place_vehicles(network, database, 8, seed=i),
                KinematicPlanner(), RandomGoalSelector(i), seed=i,
                metadata={'id': '{0:04d}'.format(i)})
            write_scenario(
                scenario, self.path('base', 'scenario_{0:04d}.json'.format(i)))

        status, _, err = run(
            '--config', self.path('tiny.toml'), 'corner-case', '--base',
            self.path('base'), '--ckpt', self.path('planner.pt'),
            '--planner', 'kinematic', '--out-dir', self.path('corner'))

        self.assertEqual(0, status, err)
        with open(self.path('corner', 'report.json')) as f:
            report = json.load(f)
        self.assertEqual(200, report['corner_cases']['scenarios'])
        self.assertGreaterEqual(report['cr_ratio'], 2.0)
        self.assertEqual(before, report['checkpoint_before'])
        self.assertTrue(report['planner_unchanged'])
        self.assertEqual(before, checkpoint_hash(self.path('planner.pt')))
        for i in range(200):
            corner = read_scenario(
                self.path('corner', 'scenario_{0:04d}.json'.format(i)))
            for v in corner.vehicles:
                if v.is_target:
                    continue
                verdict = check_legality(
                    corner.network, corner.trajectories[v.id], [], v)
                self.assertTrue(verdict.on_road and verdict.dynamics, i)


class TestTrainPlanner(CommandTestCase):

    @unittest.skipUnless(SLOW_TESTS, 'set CRUZAMENTO_SLOW_TESTS=1 to run')
    def test_train_and_roll_out(self):
        """
        A planner trained on synthetic data rolls scenarios out.
        """
        with open(self.path('tiny.toml'), 'w') as f:
            f.write(TINY_TOML)
        self.make_assets()

        status, _, err = run(
            '--config', self.path('tiny.toml'), 'train-planner',
            '--dataset', 'synthetic:4', '--save-dataset',
            self.path('data.npz'), '--out', self.path('planner.pt'))
        self.assertEqual(0, status, err)
        with open(self.path('planner.pt.losses.csv')) as f:
            rows = list(csv.reader(f))
        self.assertEqual(['epoch', 'loss'], rows[0])
        self.assertEqual(3, len(rows))

        status, _, err = run(
            '--config', self.path('tiny.toml'), 'rollout', '--map',
            self.path('map.xml'), '--assets', self.path('assets.json'),
            '--ckpt', self.path('planner.pt'), '--selector', 'random',
            '--out-dir', self.path('out'))
        self.assertEqual(0, status, err)
        scenario = read_scenario(self.path('out', 'scenario_0000.json'))
        scenario.check()


class TestHelpers(unittest.TestCase):

    def test_parse_overrides(self):
        """
        Overrides are ``key=value`` pairs.
        """
        self.assertEqual(
            {'rollout.retries': '3', 'map.max_repair_rounds': '1'},
            parse_overrides(
                ['rollout.retries=3', 'map.max_repair_rounds = 1']))
        with self.assertRaises(UsageError):
            parse_overrides(['rollout.retries'])

    def test_group_samples(self):
        """
        Samples are grouped by their reference, or consecutively.
        """
        def scenario(metadata):
            return scenario_of(
                [vehicle(1, 0, 0, is_target=True)], metadata=metadata)

        references = [scenario({'id': 'a'}), scenario({'id': 'b'})]
        tagged = [
            scenario({'reference': 'b'}), scenario({'reference': 'a'}),
            scenario({'reference': 'b'})]
        plain = [scenario({}) for _ in range(4)]

        groups = group_samples(references, tagged, ['a', 'b'])
        self.assertEqual([[tagged[1]], [tagged[0], tagged[2]]], groups)
        groups = group_samples(references, plain, ['a', 'b'])
        self.assertEqual([plain[:2], plain[2:]], groups)
        with self.assertRaises(UsageError):
            group_samples(references, plain[:3], ['a', 'b'])


load_tests = inelegant.finder.TestFinder(
    __name__,
    cli
).load_tests

if __name__ == "__main__":
    unittest.main()
