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
import json
import math
import os
import shutil
import tempfile
import unittest

import inelegant.finder
import numpy as np

from cruzamento.cornercase import failures
from cruzamento.cornercase.failures import (
    CollisionRecord, FailureFeatureStats, classify_behavior,
    collect_failures, find_failure, heading_bin, joins_route,
    relative_features, speed_bin, write_records)
from cruzamento.errors import ValidationError
from cruzamento.roadnet.network import Connection, Lane, RoadNetwork
from cruzamento.scenario import Trajectory, VehicleState

from cruzamento_tests.reference import (
    constant_speed, scenario_of, straight_road, vehicle)


def head_on(**kwargs):
    """
    A target driving east and another vehicle coming west on the same lane.
    Their boxes first touch at step 63.
    """
    return scenario_of(
        [vehicle(1, 20, 0, is_target=True), vehicle(2, 150, 0, math.pi)],
        network=straight_road(), **kwargs)


def side_by_side(**kwargs):
    """
    A target and a vehicle on the other lane, never touching.
    """
    return scenario_of(
        [vehicle(1, 20, 0, is_target=True), vehicle(2, 20, 3.5)],
        network=straight_road(), **kwargs)


def rear_end(**kwargs):
    """
    A target on lane ``a`` driving into a vehicle standing on lane ``b``,
    the lane that continues ``a``.
    """
    network = RoadNetwork(
        [Lane('a', [(0, 0), (100, 0)], 3.5, 14),
         Lane('b', [(100, 0), (300, 0)], 3.5, 14)],
        connections=[Connection('a', 'b')])
    return scenario_of(
        [vehicle(1, 50, 0, is_target=True), vehicle(2, 110, 0, speed=0.0)],
        network=network, **kwargs)


def moving(positions, heading=0.0):
    positions = np.asarray(positions, dtype=np.float64)
    return Trajectory.from_arrays(
        positions, np.full(len(positions), heading),
        np.full(len(positions), 10.0))


class SerialPool(object):

    def __init__(self):
        self.calls = 0

    def map(self, function, jobs):
        self.calls += 1
        return [function(job) for job in jobs]


class TestCollisionRecord(unittest.TestCase):

    def test_validation(self):
        """
        Timesteps beyond the horizon and unknown behaviors are refused.
        """
        with self.assertRaises(ValidationError):
            CollisionRecord('a', 101, 1.0, 0.0, 'following')
        with self.assertRaises(ValidationError):
            CollisionRecord('a', 10, 1.0, 0.0, 'tailgating')

    def test_normalized(self):
        """
        Relative headings are kept in [-π, π).
        """
        record = CollisionRecord('a', 10, 1.0, 3 * math.pi / 2, 'crossing')

        self.assertAlmostEqual(-math.pi / 2, record.relative_heading)

    def test_to_dict(self):
        """
        Documents leave the snapshot out.
        """
        record = CollisionRecord(
            'a', 10, 1.0, 0.0, 'following', 2, b'png')

        self.assertEqual(
            {'scenario_id': 'a', 'timestep': 10, 'relative_speed': 1.0,
             'relative_heading': 0.0, 'behavior': 'following',
             'collider_id': 2},
            record.to_dict())

    def test_bins(self):
        """
        Speed bins are 2 m/s wide and may be negative.
        """
        self.assertEqual(-1, speed_bin(-0.5))
        self.assertEqual(2, speed_bin(5.9))
        self.assertEqual(
            (2, heading_bin(0.1), 'following'),
            CollisionRecord('a', 1, 4.0, 0.1, 'following').cell)


class TestClassifyBehavior(unittest.TestCase):

    def setUp(self):
        self.target = moving([(i, 0) for i in range(11)])

    def test_following(self):
        """
        Vehicles going the same way without moving sideways follow.
        """
        collider = moving([(10 + i, 0) for i in range(11)])

        self.assertEqual(
            'following', classify_behavior(self.target, collider, 10))

    def test_lane_change(self):
        """
        Vehicles going the same way that moved sideways change lanes.
        """
        collider = moving([(10 + i, 3.5 - 0.2 * i) for i in range(11)])

        self.assertEqual(
            'lane_change', classify_behavior(self.target, collider, 10))

    def test_oncoming(self):
        """
        Vehicles coming the other way are oncoming.
        """
        collider = moving([(30 - i, 0) for i in range(11)], math.pi)

        self.assertEqual(
            'oncoming', classify_behavior(self.target, collider, 10))

    def test_crossing(self):
        """
        Vehicles at right angles cross.
        """
        collider = moving([(10, -10 + i) for i in range(11)], math.pi / 2)

        self.assertEqual(
            'crossing', classify_behavior(self.target, collider, 10))

    def test_merging(self):
        """
        Vehicles coming from another lane onto the target route merge,
        whatever their heading.
        """
        collider = moving([(10 + i, 0) for i in range(11)])

        self.assertEqual(
            'merging',
            classify_behavior(
                self.target, collider, 10, ('main', 'after'),
                ('ramp', 'after')))

    def test_already_on_route(self):
        """
        A vehicle whose route starts on a lane of the target route is not
        merging, even when the target route starts elsewhere.
        """
        collider = moving([(10 + i, 0) for i in range(11)])

        self.assertEqual(
            'following',
            classify_behavior(
                self.target, collider, 10, ('a', 'b'), ('b', 'c')))

    def test_joins_route(self):
        """
        Only entering the other route from a lane off it is joining it.
        """
        self.assertTrue(joins_route(('ramp', 'b'), ('a', 'b')))
        self.assertFalse(joins_route(('b',), ('a', 'b')))
        self.assertFalse(joins_route(('b', 'c'), ('a', 'b', 'c')))
        self.assertFalse(joins_route(('x', 'y'), ('a', 'b')))

    def test_relative_features(self):
        """
        A vehicle crossing at right angles has no speed along the target
        heading.
        """
        collider = moving([(10, -10 + i) for i in range(11)], math.pi / 2)

        speed, heading = relative_features(self.target, collider, 3)

        self.assertAlmostEqual(10.0, speed)
        self.assertAlmostEqual(math.pi / 2, heading)


class TestFailureFeatureStats(unittest.TestCase):

    def setUp(self):
        self.records = [
            CollisionRecord('a', 30, 5.2, 1.6, 'crossing'),
            CollisionRecord('b', 41, 4.8, 1.7, 'crossing'),
            CollisionRecord('c', 12, -1.0, 0.0, 'following'),
            CollisionRecord('d', 12, 20.0, 3.1, 'oncoming')]

    def test_merge(self):
        """
        Merging does not depend on how the records were split nor on their
        order.
        """
        whole = FailureFeatureStats.from_records(self.records)
        parts = [
            FailureFeatureStats.from_records(self.records[i:i + 1])
            for i in range(4)]

        self.assertEqual(whole, (parts[0] + parts[1]) + (parts[2] + parts[3]))
        self.assertEqual(whole, parts[3] + (parts[1] + (parts[2] + parts[0])))
        self.assertEqual(
            whole, FailureFeatureStats.from_records(self.records[::-1]))

    def test_argmax_ties(self):
        """
        Ties go to the smallest cell.
        """
        stats = FailureFeatureStats.from_records(self.records[2:])

        self.assertEqual(self.records[2].cell, stats.argmax())

    def test_empty(self):
        """
        Empty stats have no argmax and no shares.
        """
        stats = FailureFeatureStats()

        self.assertFalse(stats)
        self.assertIsNone(stats.argmax())
        self.assertEqual(0.0, stats.behavior_share('crossing'))
        self.assertEqual(0, stats.total)

    def test_dict(self):
        """
        Stats are written as sorted cells and read back.
        """
        stats = FailureFeatureStats.from_records(self.records)

        document = json.loads(json.dumps(stats.to_dict()))

        self.assertEqual(4, document['total'])
        self.assertEqual(
            list(self.records[0].cell), document['argmax'])
        self.assertEqual(stats, FailureFeatureStats.from_dict(document))

    def test_bounds(self):
        """
        Bin bounds cover the bins.
        """
        low, high = FailureFeatureStats.heading_bounds(heading_bin(1.6))

        self.assertTrue(low <= 1.6 < high)
        self.assertEqual((-2.0, 0.0), FailureFeatureStats.speed_bounds(-1))


class TestFindFailure(unittest.TestCase):

    def test_head_on(self):
        """
        The first collision is recorded with its features and a picture.
        """
        record = find_failure(head_on(), 'x')

        self.assertEqual('x', record.scenario_id)
        self.assertEqual(63, record.timestep)
        self.assertEqual(2, record.collider_id)
        self.assertEqual('oncoming', record.behavior)
        self.assertAlmostEqual(20.0, record.relative_speed)
        self.assertTrue(record.snapshot.startswith(b'\x89PNG'))

    def test_rear_end_downstream(self):
        """
        Running into a vehicle standing on the next lane of the route is
        following it, not merging.
        """
        record = find_failure(rear_end(), 'r', snapshot=False)

        self.assertEqual(2, record.collider_id)
        self.assertEqual(56, record.timestep)
        self.assertEqual('following', record.behavior)

    def test_no_snapshot(self):
        """
        Snapshots may be skipped.
        """
        record = find_failure(head_on(), 'x', snapshot=False)

        self.assertEqual(b'', record.snapshot)

    def test_no_collision(self):
        """
        Scenarios without collisions of the target have no failure.
        """
        self.assertIsNone(find_failure(side_by_side()))

    def test_first_collider(self):
        """
        The earliest of several collisions is the one recorded.
        """
        scenario = scenario_of(
            [vehicle(1, 20, 0, is_target=True), vehicle(2, 150, 0, math.pi),
             vehicle(3, 40, 0, speed=0)],
            network=straight_road())

        record = find_failure(scenario, snapshot=False)

        self.assertEqual(3, record.collider_id)


class TestCollectFailures(unittest.TestCase):

    def setUp(self):
        self.directory = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.directory)

    def test_collect(self):
        """
        Every scenario is evaluated and the collisions are counted, with
        scenarios named by their metadata or position.
        """
        scenarios = [side_by_side(), head_on(metadata={'id': 'crash'})]
        pool = SerialPool()

        collection = collect_failures(scenarios, snapshot=False, pool=pool)

        self.assertEqual(1, pool.calls)
        self.assertEqual(2, len(collection.evaluated))
        self.assertEqual(
            ['crash'], [r.scenario_id for r in collection.records])
        self.assertEqual(1, collection.stats.total)
        self.assertEqual('idm', collection.evaluated[0].metadata['policy'])

    def test_write_records(self):
        """
        Records are written as JSON lines.
        """
        path = os.path.join(self.directory, 'records.jsonl')
        records = [
            CollisionRecord('a', 30, 5.2, 1.6, 'crossing', 2, b'png'),
            CollisionRecord('b', 12, -1.0, 0.0, 'following', 3)]

        write_records(records, path)

        with open(path, encoding='utf-8') as f:
            documents = [json.loads(line) for line in f]
        self.assertEqual([r.to_dict() for r in records], documents)


load_tests = inelegant.finder.TestFinder(
    __name__,
    failures
).load_tests

if __name__ == "__main__":
    unittest.main()
