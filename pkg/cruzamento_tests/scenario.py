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
import tempfile
import unittest

import inelegant.finder
import numpy as np

from cruzamento import scenario
from cruzamento.errors import SchemaVersionError, ValidationError
from cruzamento.scenario import (
    T_S, Trajectory, VehicleState, canonicalize, dumps_scenario,
    loads_scenario, read_scenario, write_scenario)

from cruzamento_tests.reference import (
    constant_speed, crossroad, scenario_of, vehicle)


def two_vehicles(**kwargs):
    return scenario_of(
        [vehicle(0, 10, 0, is_target=True), vehicle(1, 40, 0, speed=5)],
        network=crossroad(), **kwargs)


class TestTrajectory(unittest.TestCase):

    def test_check_accepts_consistent_speeds(self):
        """
        A trajectory whose speeds agree with its positions should pass.
        """
        constant_speed(VehicleState(0, 0, 0.3, 12)).check()

    def test_check_refuses_inconsistent_speeds(self):
        """
        Speeds that disagree with the displacements by more than half a
        meter per second should be refused.
        """
        array = np.array(constant_speed(VehicleState(0, 0, 0, 10)).array)
        array[50, 3] = 11.0

        with self.assertRaises(ValidationError) as context:
            Trajectory(array).check()
        self.assertIn('step 50', str(context.exception))

    def test_check_refuses_non_finite(self):
        """
        Non-finite values should be refused.
        """
        array = np.array(constant_speed(VehicleState(0, 0, 0, 10)).array)
        array[7, 0] = np.nan

        with self.assertRaises(ValidationError):
            Trajectory(array).check()

    def test_headings_normalized(self):
        """
        Headings should be brought into ``(-pi, pi]``.
        """
        t = Trajectory([[0, 0, 3 * math.pi, 0], [0, 0, -math.pi, 0]])

        np.testing.assert_allclose([math.pi, math.pi], t.headings)

    def test_shape(self):
        """
        Only ``(n, 4)`` arrays make trajectories.
        """
        with self.assertRaises(ValidationError):
            Trajectory(np.zeros((5, 3)))


class TestScenario(unittest.TestCase):

    def test_target(self):
        """
        The target property should give the only target vehicle.
        """
        self.assertEqual(0, two_vehicles().target.id)

    def test_no_target(self):
        """
        A scenario needs exactly one target.
        """
        with self.assertRaises(ValidationError):
            scenario_of([vehicle(0, 0, 0), vehicle(1, 20, 0)])

    def test_two_targets(self):
        """
        Two targets are as bad as none.
        """
        with self.assertRaises(ValidationError):
            scenario_of([
                vehicle(0, 0, 0, is_target=True),
                vehicle(1, 20, 0, is_target=True)])

    def test_too_many_vehicles(self):
        """
        At most sixteen vehicles fit in a scenario.
        """
        vehicles = [vehicle(i, 10 * i, 0, is_target=i == 0)
                    for i in range(17)]

        with self.assertRaises(ValidationError) as context:
            scenario_of(vehicles)
        self.assertEqual('vehicles', context.exception.field_path)

    def test_trajectory_must_start_at_initial_state(self):
        """
        State 0 of every trajectory must be the initial state.
        """
        v = vehicle(0, 0, 0, is_target=True)

        with self.assertRaises(ValidationError) as context:
            scenario_of([v], {0: constant_speed(VehicleState(1, 0, 0, 10))})
        self.assertEqual('trajectories.0', context.exception.field_path)

    def test_unknown_provenance(self):
        """
        Provenances are dataset, generated or corner_case.
        """
        with self.assertRaises(ValidationError):
            two_vehicles(provenance='dream')

    def test_ordered_trajectories(self):
        """
        Trajectories should come in the order of the vehicles.
        """
        s = two_vehicles()

        self.assertEqual(
            [s.trajectories[0], s.trajectories[1]], s.ordered_trajectories())

    def test_replace(self):
        """
        ``replace()`` should give a new scenario with the given fields.
        """
        s = two_vehicles()
        other = s.replace(seed=5, provenance='dataset')

        self.assertEqual(5, other.seed)
        self.assertEqual('dataset', other.provenance)
        self.assertEqual(0, s.seed)


class TestCanonicalize(unittest.TestCase):

    def test_keeps_distances(self):
        """
        Canonicalization is rigid: distances between states are kept.
        """
        t = constant_speed(VehicleState(12, -7, 2.1, 9))
        c = canonicalize(t)

        np.testing.assert_allclose(
            np.linalg.norm(np.diff(t.positions, axis=0), axis=1),
            np.linalg.norm(np.diff(c.positions, axis=0), axis=1))
        np.testing.assert_allclose(t.speeds, c.speeds)

    def test_straight_line_on_x_axis(self):
        """
        A straight trajectory should end on the x axis.
        """
        c = canonicalize(constant_speed(VehicleState(12, -7, 2.1, 9)))

        np.testing.assert_allclose([90.0, 0.0], c.positions[-1], atol=1e-9)


class TestScenarioFile(unittest.TestCase):

    def test_text_is_deterministic(self):
        """
        The same scenario should always give the same text, and the text
        should give the same scenario back.
        """
        s = two_vehicles(seed=3, metadata={'id': '0001'})
        text = dumps_scenario(s)

        self.assertEqual(text, dumps_scenario(loads_scenario(text)))
        self.assertEqual(s, loads_scenario(text))

    def test_files(self):
        """
        Scenarios should go through files unchanged.
        """
        s = two_vehicles()
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'scenario.json')
            write_scenario(s, path)

            self.assertEqual(s, read_scenario(path))

    def test_schema_version(self):
        """
        Files from another schema version should be refused.
        """
        document = json.loads(dumps_scenario(two_vehicles()))
        document['version'] = 99

        with self.assertRaises(SchemaVersionError):
            loads_scenario(json.dumps(document))

    def test_wrong_length_names_vehicle(self):
        """
        A trajectory of the wrong length should be reported with its vehicle.
        """
        document = json.loads(dumps_scenario(two_vehicles()))
        document['trajectories']['1'] = document['trajectories']['1'][:50]

        with self.assertRaises(ValidationError) as context:
            loads_scenario(json.dumps(document))
        self.assertEqual('trajectories.1', context.exception.field_path)

    def test_missing_field(self):
        """
        Vehicles with missing fields should be reported by position.
        """
        document = json.loads(dumps_scenario(two_vehicles()))
        del document['vehicles'][1]['kind']

        with self.assertRaises(ValidationError) as context:
            loads_scenario(json.dumps(document))
        self.assertEqual('vehicles.1', context.exception.field_path)

    def test_not_json(self):
        """
        Text that is not JSON should be a validation error.
        """
        with self.assertRaises(ValidationError):
            loads_scenario('{')

    def test_horizon(self):
        """
        Written trajectories have ``T_S + 1`` states.
        """
        document = json.loads(dumps_scenario(two_vehicles()))

        self.assertEqual(T_S + 1, len(document['trajectories']['0']))


load_tests = inelegant.finder.TestFinder(
    __name__,
    scenario
).load_tests

if __name__ == "__main__":
    unittest.main()
