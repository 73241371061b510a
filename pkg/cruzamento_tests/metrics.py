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
import unittest

import inelegant.finder
import numpy as np

from cruzamento import metrics
from cruzamento.errors import ValidationError
from cruzamento.metrics import (
    DrivingMetrics, MetricsReport, RealismStats, ade, dataset_diversity,
    driving_metrics, fde, pair_difference, random_pairs, realism_stats,
    representative_samples, scenario_errors)
from cruzamento.scenario import T_S, Trajectory, VehicleState, canonicalize

from cruzamento_tests.reference import (
    constant_speed, scenario_of, straight_road, vehicle)


def brute_ade(a, b):
    return sum(
        math.hypot(a[i][0] - b[i][0], a[i][1] - b[i][1])
        for i in range(len(a))) / len(a)


def brute_pair_difference(first, second):
    count = min(len(first.vehicles), len(second.vehicles))
    total = 0.0
    for u in first.vehicles[:count]:
        p = canonicalize(first.trajectories[u.id]).positions
        for v in second.vehicles[:count]:
            q = canonicalize(second.trajectories[v.id]).positions
            for t in range(len(p)):
                total += (p[t][0] - q[t][0]) ** 2 + (p[t][1] - q[t][1]) ** 2
    return total


def traffic(speeds, x=0.0, y=0.0, heading=0.0):
    """
    Vehicles one behind the other driving at ``speeds``; the first is the
    target.
    """
    vehicles = [
        vehicle(i + 1, x + 10 * i * math.cos(heading),
                y + 10 * i * math.sin(heading), heading, speed,
                is_target=(i == 0))
        for i, speed in enumerate(speeds)]
    return scenario_of(vehicles)


def shifted(scenario, dy):
    """
    The same scenario with every vehicle ``dy`` meters to the north.
    """
    vehicles = [
        v._replace(initial_state=v.initial_state._replace(
            y=v.initial_state.y + dy))
        for v in scenario.vehicles]
    trajectories = {
        v.id: Trajectory(scenario.trajectories[v.id].array + (0, dy, 0, 0))
        for v in scenario.vehicles}
    return scenario_of(vehicles, trajectories)


def random_scenario(rng, vehicles=None):
    """
    A scenario of random walks, or of the given vehicles walking at random.
    """
    if vehicles is None:
        vehicles = [
            vehicle(i + 1, 0, 0, is_target=(i == 0))
            for i in range(int(rng.integers(1, 5)))]
    trajectories = {}
    for v in vehicles:
        array = np.zeros((T_S + 1, 4))
        walk = np.cumsum(rng.normal(size=(T_S + 1, 2)), axis=0)
        array[:, :2] = walk - walk[0]
        array[:, 3] = 10.0
        trajectories[v.id] = Trajectory(array)
    return scenario_of(vehicles, trajectories)


def brute_realism(real, samples):
    errors = []
    for sample in samples:
        ades, fdes = [], []
        for v in real.vehicles:
            a = real.trajectories[v.id].positions
            b = sample.trajectories[v.id].positions
            ades.append(brute_ade(a, b))
            fdes.append(math.hypot(a[-1][0] - b[-1][0], a[-1][1] - b[-1][1]))
        errors.append((sum(ades) / len(ades), sum(fdes) / len(fdes)))
    return (
        min(e[0] for e in errors), min(e[1] for e in errors),
        sum(e[0] for e in errors) / len(errors),
        sum(e[1] for e in errors) / len(errors))


class TestDisplacementErrors(unittest.TestCase):

    def test_brute_force(self):
        """
        ADE and FDE agree with a loop over the positions.
        """
        rng = np.random.default_rng(0)
        for _ in range(20):
            a, b = rng.normal(size=(2, 11, 2)) * 10

            self.assertAlmostEqual(brute_ade(a, b), ade(a, b))
            self.assertAlmostEqual(
                math.hypot(*(a[-1] - b[-1])), fde(a, b))

    def test_trajectories(self):
        """
        Trajectories are compared by position.
        """
        a = constant_speed(VehicleState(0, 0, 0, 10))
        b = constant_speed(VehicleState(0, 3, 0, 10))

        self.assertAlmostEqual(3.0, ade(a, b))
        self.assertAlmostEqual(3.0, fde(a, b))

    def test_lengths(self):
        """
        Trajectories of different lengths cannot be compared.
        """
        with self.assertRaises(ValidationError):
            ade(np.zeros((3, 2)), np.zeros((4, 2)))


class TestRealism(unittest.TestCase):

    def test_scenario_errors(self):
        """
        Scenario errors average the errors of every vehicle.
        """
        real = traffic([10, 10])
        sample = shifted(real, 2.0)

        self.assertEqual((2.0, 2.0), tuple(
            round(e, 9) for e in scenario_errors(real, sample)))

    def test_vehicle_sets(self):
        """
        Samples must have the vehicles of the real scenario.
        """
        with self.assertRaises(ValidationError):
            scenario_errors(traffic([10, 10]), traffic([10]))

    def test_stats(self):
        """
        The best and the mean errors over samples are kept.
        """
        real = traffic([10, 10])
        samples = [shifted(real, dy) for dy in (3.0, 1.0, 2.0)]

        stats = realism_stats(real, samples)

        self.assertAlmostEqual(1.0, stats.min_sade)
        self.assertAlmostEqual(1.0, stats.min_sfde)
        self.assertAlmostEqual(2.0, stats.mean_sade)
        self.assertAlmostEqual(2.0, stats.mean_sfde)
        self.assertEqual(3, stats.samples)

    def test_stats_brute_force(self):
        """
        Realism stats agree with loops over samples, vehicles and positions
        on fifty random scenarios.
        """
        rng = np.random.default_rng(3)
        for _ in range(50):
            real = random_scenario(rng)
            samples = [
                random_scenario(rng, real.vehicles)
                for _ in range(int(rng.integers(1, 6)))]

            stats = realism_stats(real, samples)

            np.testing.assert_allclose(
                brute_realism(real, samples),
                (stats.min_sade, stats.min_sfde, stats.mean_sade,
                 stats.mean_sfde))
            self.assertEqual(len(samples), stats.samples)

    def test_no_samples(self):
        """
        Realism needs samples.
        """
        with self.assertRaises(ValidationError):
            realism_stats(traffic([10]), [])

    def test_combine(self):
        """
        Stats of several real scenarios are averaged.
        """
        combined = RealismStats.combine([
            RealismStats(1, 2, 3, 4, 5), RealismStats(3, 4, 5, 6, 5)])

        self.assertEqual(RealismStats(2.0, 3.0, 4.0, 5.0, 10), combined)

    def test_representative(self):
        """
        The closest sample represents each real scenario.
        """
        real = traffic([10, 10])
        samples = [shifted(real, dy) for dy in (3.0, 0.5, 2.0)]

        self.assertEqual(
            [samples[1]], representative_samples([real], [samples]))


class TestDiversity(unittest.TestCase):

    def setUp(self):
        self.scenarios = [
            traffic([10, 8]), traffic([6, 12, 9]), traffic([3]),
            traffic([14, 14]), traffic([0, 5])]

    def test_brute_force(self):
        """
        Pair differences agree with a loop over vehicles and timesteps.
        """
        for first in self.scenarios:
            for second in self.scenarios:
                np.testing.assert_allclose(
                    brute_pair_difference(first, second),
                    pair_difference(first, second), rtol=1e-9)

    def test_rigid_motion(self):
        """
        Moving a scenario does not change its differences.
        """
        first, second = self.scenarios[:2]
        moved = traffic([10, 8], x=50, y=-20, heading=2.0)

        np.testing.assert_allclose(
            pair_difference(first, second), pair_difference(moved, second),
            rtol=1e-9)

    def test_random_pairs(self):
        """
        Pairs are disjoint and depend on the seed only.
        """
        pairs = random_pairs(9, seed=2)

        items = [i for pair in pairs for i in pair]
        self.assertEqual(4, len(pairs))
        self.assertEqual(len(items), len(set(items)))
        self.assertEqual(pairs, random_pairs(9, seed=2))

    def test_own_baseline(self):
        """
        A dataset compared with itself has ratio one.
        """
        result = dataset_diversity(self.scenarios, seed=1)

        self.assertEqual(1.0, result.ratio)
        self.assertEqual(0.0, result.relative_error)
        self.assertEqual(2, result.pairs)

    def test_pairs(self):
        """
        Given pairs replace the random pairing.
        """
        result = dataset_diversity(
            self.scenarios, pairs=[(0, 1)], baseline=1.0)

        self.assertAlmostEqual(
            pair_difference(self.scenarios[0], self.scenarios[1]),
            result.value)
        self.assertAlmostEqual(result.value, result.ratio)

    def test_baseline_dataset(self):
        """
        A baseline dataset is paired with the same seed.
        """
        copies = [traffic([10]), traffic([10])]

        result = dataset_diversity(self.scenarios, seed=1, baseline=copies)

        self.assertEqual(0.0, result.baseline)
        self.assertEqual(math.inf, result.ratio)

    def test_zero(self):
        """
        Two datasets without diversity have ratio one.
        """
        copies = [traffic([10]), traffic([10])]

        result = dataset_diversity(copies, baseline=0.0)

        self.assertEqual(0.0, result.value)
        self.assertEqual(1.0, result.ratio)

    def test_too_small(self):
        """
        Diversity needs pairs.
        """
        with self.assertRaises(ValidationError):
            dataset_diversity([traffic([10])])
        with self.assertRaises(ValidationError):
            dataset_diversity([])


class TestDrivingMetrics(unittest.TestCase):

    def test_collision_rate(self):
        """
        Scenarios where the target touches another vehicle count as
        collisions.
        """
        crash = scenario_of(
            [vehicle(1, 0, 0, is_target=True), vehicle(2, 30, 0, speed=0)])
        calm = traffic([10, 10])

        result = driving_metrics([crash, calm, calm, calm])

        self.assertEqual(0.25, result.cr)
        self.assertEqual(4, result.scenarios)
        self.assertAlmostEqual(100.0, result.dis)

    def test_comfort(self):
        """
        Comfort is the reciprocal of the mean absolute acceleration.
        """
        states = [VehicleState(0.01 * i * i, 0, 0, 0.2 * i)
                  for i in range(101)]
        target = vehicle(1, 0, 0, speed=0, is_target=True)
        scenario = scenario_of(
            [target], {1: Trajectory.from_states(states)},
            network=straight_road())

        result = driving_metrics([scenario])

        self.assertAlmostEqual(0.5, result.comfort)

    def test_standing_still(self):
        """
        A target that never moves has bounded comfort.
        """
        scenario = traffic([0])

        self.assertAlmostEqual(1000.0, driving_metrics([scenario]).comfort)

    def test_empty(self):
        """
        Driving metrics need scenarios.
        """
        with self.assertRaises(ValidationError):
            driving_metrics([])


class TestMetricsReport(unittest.TestCase):

    def test_json(self):
        """
        Reports are JSON documents with missing parts set to null.
        """
        report = MetricsReport(
            driving=DrivingMetrics(0.25, 80, 2, 1, 4), name='base',
            metadata={'policy': 'idm'})

        document = json.loads(report.to_json())

        self.assertIsNone(document['realism'])
        self.assertEqual(0.25, document['driving']['cr'])
        self.assertEqual({'policy': 'idm'}, document['metadata'])

    def test_table(self):
        """
        Rows missing a column show a dash.
        """
        first = MetricsReport(
            realism=RealismStats(1, 2, 3, 4, 5),
            driving=DrivingMetrics(0.25, 80, 2, 1, 4))
        second = MetricsReport(
            driving=DrivingMetrics(0.5, 60, 1, 1, 4), name='other')

        lines = first.table([second]).splitlines()

        self.assertEqual(3, len(lines))
        self.assertTrue(lines[0].startswith('name      min-sADE'))
        self.assertIn('1.000', lines[1])
        self.assertIn('-', lines[2])
        self.assertIn('0.500', lines[2])


load_tests = inelegant.finder.TestFinder(
    __name__,
    metrics
).load_tests

if __name__ == "__main__":
    unittest.main()
