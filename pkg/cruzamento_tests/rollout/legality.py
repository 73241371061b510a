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
import math
import unittest

import inelegant.finder
import numpy as np
import shapely.geometry

from cruzamento.config import Configuration
from cruzamento.errors import ValidationError
from cruzamento.roadnet.geometry import box_polygon
from cruzamento.roadnet.network import Lane, RoadNetwork
from cruzamento.rollout import legality
from cruzamento.rollout.legality import (
    LegalityLimits, check_legality, first_collision, lane_excess)
from cruzamento.scenario import Trajectory, VehicleState

from cruzamento_tests.reference import (
    constant_speed, crossroad, straight_road, vehicle)


class TestLaneExcess(unittest.TestCase):

    def test_against_shapely(self):
        """
        The excess over the nearest lane surface is the smallest distance to
        a centerline minus half the lane width, as shapely computes it.
        """
        network = crossroad()
        rng = np.random.default_rng(5)
        points = rng.uniform(-20, 220, size=(200, 2))

        excess, _ = lane_excess(network, points)

        for point, value in zip(points, excess):
            expected = min(
                shapely.geometry.LineString(lane.shape).distance(
                    shapely.geometry.Point(point)) - lane.width / 2
                for lane in network.lanes.values())
            self.assertAlmostEqual(expected, value, places=6)


def random_drive(rng, steps=20, dt=0.1):
    """
    A vehicle of random size turning at a constant rate, with its trajectory.
    """
    x, y = rng.uniform(0, 30, 2)
    heading = rng.uniform(-math.pi, math.pi)
    speed = rng.uniform(0, 15)
    yaw_rate = rng.uniform(-0.5, 0.5)
    headings = heading + yaw_rate * dt * np.arange(steps + 1)
    moves = speed * dt * np.column_stack(
        [np.cos(headings[:-1]), np.sin(headings[:-1])])
    positions = np.vstack([[x, y], (x, y) + np.cumsum(moves, axis=0)])
    attributes = vehicle(
        int(rng.integers(1000)), x, y, heading, speed,
        length=rng.uniform(3.5, 6.0), width=rng.uniform(1.6, 2.2))
    return attributes, Trajectory.from_arrays(
        positions, headings, np.full(steps + 1, speed), dt)


class TestFirstCollision(unittest.TestCase):

    def test_against_shapely(self):
        """
        The first overlap of two boxes is the first step where their shapely
        polygons intersect, over a hundred random pairs of drives.
        """
        rng = np.random.default_rng(11)
        outcomes = []
        for _ in range(100):
            a, a_trajectory = random_drive(rng)
            b, b_trajectory = random_drive(rng)

            expected = next((
                step for step in range(len(a_trajectory))
                if box_polygon(
                    *a_trajectory.positions[step],
                    a_trajectory.headings[step], a.length, a.width
                ).intersects(box_polygon(
                    *b_trajectory.positions[step],
                    b_trajectory.headings[step], b.length, b.width))),
                None)

            self.assertEqual(
                expected, first_collision(a_trajectory, a, b_trajectory, b))
            outcomes.append(expected is None)
        self.assertIn(True, outcomes)
        self.assertIn(False, outcomes)


class TestCheckLegality(unittest.TestCase):

    def test_off_road(self):
        """
        A vehicle drifting off its lane fails the on-road rule.
        """
        state = VehicleState(20, 0, 0, 10)
        states = [
            VehicleState(state.x + i, -0.05 * i, 0, 10) for i in range(101)]

        report = check_legality(
            straight_road(), Trajectory.from_states(states), [],
            vehicle(1, 20, 0))

        self.assertFalse(report.on_road)
        self.assertFalse(report.passed)
        self.assertAlmostEqual(5.0, report.max_deviation, places=6)
        self.assertTrue(report.failures()[0].startswith('off road'))

    def test_margin(self):
        """
        Half a meter over the lane border is still on the road.
        """
        network = RoadNetwork([Lane('a', [(0, 0), (300, 0)], 3.5, 14)])

        def report(y):
            states = [VehicleState(20 + i, y, 0, 10) for i in range(101)]
            return check_legality(
                network, Trajectory.from_states(states), [],
                vehicle(1, 20, y))

        self.assertTrue(report(2.2).on_road)
        self.assertFalse(report(2.3).on_road)

    def test_collision(self):
        """
        The first step two boxes overlap is reported, with the other vehicle.
        """
        me = vehicle(1, 20, 0, speed=10)
        other = vehicle(2, 70, 0, speed=5)

        report = check_legality(
            straight_road(), constant_speed(me.initial_state),
            [(other, constant_speed(other.initial_state))], me)

        # The gap of 45.5 m closes at 5 m/s.
        self.assertEqual((2, 92), report.collision)
        self.assertEqual(
            'collides with vehicle 2 at step 92', report.failures()[0])

    def test_exempt(self):
        """
        Exempt vehicles, and the vehicle itself, do not collide.
        """
        me = vehicle(1, 20, 0, speed=10)
        other = vehicle(2, 70, 0, speed=5)
        others = [
            (other, constant_speed(other.initial_state)),
            (me, constant_speed(me.initial_state))]

        report = check_legality(
            straight_road(), constant_speed(me.initial_state), others, me,
            exempt_ids={2})

        self.assertIsNone(report.collision)
        self.assertTrue(report.passed)

    def test_earliest_collision(self):
        """
        With many collisions the earliest one is reported.
        """
        me = vehicle(1, 20, 0, speed=10)
        slow = vehicle(2, 70, 0, speed=5)
        parked = vehicle(3, 40, 0, speed=0)

        report = check_legality(
            straight_road(), constant_speed(me.initial_state),
            [(slow, constant_speed(slow.initial_state)),
             (parked, constant_speed(parked.initial_state))], me)

        self.assertEqual(3, report.collision[0])
        self.assertEqual(16, report.collision[1])

    def test_lateral_acceleration(self):
        """
        Turning a quarter circle in a second at 10 m/s is too much.
        """
        states = [VehicleState(20 + i, 0, 0, 10) for i in range(101)]
        states[50:60] = [
            VehicleState(70 + k, 0, math.pi / 2 * k / 10, 10)
            for k in range(10)]
        states[60:] = [
            VehicleState(80 + k, 0, math.pi / 2, 10) for k in range(41)]

        report = check_legality(
            straight_road(), Trajectory.from_states(states), [],
            vehicle(1, 20, 0))

        self.assertFalse(report.dynamics)
        self.assertAlmostEqual(
            10 * (math.pi / 20) / 0.1, report.max_lateral_accel)

    def test_initial_speed(self):
        """
        The first acceleration is measured against the initial speed.
        """
        states = [VehicleState(20, 0, 0, 15)] + [
            VehicleState(20 + i, 0, 0, 10) for i in range(1, 101)]

        report = check_legality(
            straight_road(), Trajectory.from_states(states), [],
            vehicle(1, 20, 0, speed=15))

        self.assertAlmostEqual(50.0, report.max_accel)
        self.assertFalse(report.passed)

    def test_lengths_differ(self):
        """
        Trajectories of different lengths cannot be compared.
        """
        me = vehicle(1, 20, 0)
        other = vehicle(2, 100, 0)

        with self.assertRaises(ValidationError):
            first_collision(
                constant_speed(me.initial_state), me,
                constant_speed(other.initial_state, steps=50), other)

    def test_limits_from_config(self):
        """
        The limits come from the ``[legality]`` section.
        """
        configuration = Configuration().override(
            {'legality.max_accel': '4'})

        self.assertEqual(
            LegalityLimits(max_accel=4.0),
            LegalityLimits.from_config(configuration))


load_tests = inelegant.finder.TestFinder(
    __name__,
    legality
).load_tests

if __name__ == "__main__":
    unittest.main()
